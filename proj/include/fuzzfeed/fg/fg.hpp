#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fuzzfeed/fuzz/fuzz.hpp"
#include "fuzzfeed/llm/extract.hpp"
#include "fuzzfeed/llm/provider.hpp"
#include "json.hpp"

namespace fuzzfeed::fg {

using llm::PromptKind;

/// A passing validity phase with at least this many trials and no adhering
/// input is reported as vacuous.
inline constexpr std::uint64_t kFuzzBlindMinTrials = 1000;

struct FgConfig {
  unsigned max_validity_iterations = 10;  // X: validity-fuzz runs per cycle
  unsigned max_cycles = 3;
  fuzz::FuzzBudget budget;
  fuzz::GeneratorConfig generator = fuzz::GeneratorConfig::defaults(0);
  bool fg_enabled = true;
  bool strict_fuzz_blind = false;
  bool shrink = true;
  unsigned fuzz_threads = 1;
  std::uint64_t step_limit = minilang::kDefaultStepLimit;
  std::string model;

  /// Throws std::invalid_argument.
  void validate() const;
};

enum class Outcome { Accepted, ExhaustedBudget, Malformed, FuzzBlind };

std::string_view to_string(Outcome outcome);
Outcome outcome_from_string(std::string_view name);

// ---------------------------------------------------------------------------
// Trace events

struct RunStarted {
  std::string program_id;
  FgConfig config;
};

struct PromptSent {
  PromptKind kind = PromptKind::InitialWp;
  std::string prompt_hash;
  int attempt = 1;
};

struct CandidateReceived {
  std::string response;
  std::optional<std::string> error;  // "<kind>: <message>" for extraction or provider errors
  bool provider_failed = false;
};

struct VerdictEvent {
  fuzz::Phase phase = fuzz::Phase::Validity;
  unsigned cycle = 0;
  unsigned iteration = 0;  // validity run within the cycle; 0 for weakness
  bool passed = false;
  std::uint64_t seed = 0;
  fuzz::PhaseStats stats;
  std::optional<FuzzInput> witness;
  std::optional<std::string> precondition_fault;
  bool vacuous = false;
};

struct RepairTriggered {
  PromptKind kind = PromptKind::RepairValidity;
};

struct CycleCompleted {
  unsigned cycle = 0;
};

struct TerminalOutcome {
  Outcome outcome = Outcome::Accepted;
};

using Event = std::variant<RunStarted, PromptSent, CandidateReceived, VerdictEvent, RepairTriggered, CycleCompleted,
                           TerminalOutcome>;

std::string event_name(const Event& e);

void to_json(nlohmann::json& j, const FgConfig& c);
void from_json(const nlohmann::json& j, FgConfig& c);
void to_json(nlohmann::json& j, const Event& e);
void from_json(const nlohmann::json& j, Event& e);

struct FgTrace {
  std::vector<Event> events;

  unsigned cycles_used() const;
  unsigned repairs() const;
  std::uint64_t llm_calls() const;
  bool fg_used() const { return repairs() > 0; }
  /// Validity-fuzz runs per cycle, in cycle order.
  std::vector<unsigned> validity_iterations() const;
};

void write_trace(const std::filesystem::path& path, const FgTrace& trace);
FgTrace read_trace(const std::filesystem::path& path);

struct WpOutcome {
  Outcome kind = Outcome::Malformed;
  /// Accepted: the final candidate. ExhaustedBudget: the last candidate that
  /// passed validity, else the last extracted one. FuzzBlind: the vacuous one.
  std::optional<llm::CandidateWp> candidate;
  FgTrace trace;
};

/// One InitialWp prompt, no fuzzing. Accepted carries the raw candidate.
WpOutcome zero_shot(const minilang::Program& program, const std::string& program_id, llm::ChatProvider& provider,
                    const FgConfig& config);

/// The fuzzing-guided loop: validity repairs up to X runs, then one weakness
/// check, for at most max_cycles cycles.
WpOutcome fg_generate(const minilang::Program& program, const std::string& program_id, llm::ChatProvider& provider,
                      const FgConfig& config);

/// zero_shot or fg_generate per config.fg_enabled.
WpOutcome generate_wp(const minilang::Program& program, const std::string& program_id, llm::ChatProvider& provider,
                      const FgConfig& config);

// ---------------------------------------------------------------------------
// Legality

struct TraceCheck {
  bool ok = true;
  std::size_t event_index = 0;
  std::string reason;
};

/// Checks that events form a legal path of the state machine, using the
/// budgets recorded in the RunStarted header.
TraceCheck validate_trace(const std::vector<Event>& events);

// ---------------------------------------------------------------------------
// Replay

struct DivergenceReport {
  bool diverged = false;
  std::size_t event_index = 0;
  std::string expected;  // recorded event, JSON
  std::string actual;    // replayed event, JSON
};

struct ReplayResult {
  WpOutcome outcome;
  DivergenceReport divergence;
};

/// The recorded PromptSent/CandidateReceived pairs as a transcript.
std::vector<llm::TranscriptEntry> transcript_from_trace(const FgTrace& trace);

/// Re-runs the program against the responses recorded in `recorded`, under
/// `config` (the recorded header's config when absent), and reports the first
/// event that differs.
ReplayResult replay_run(const minilang::Program& program, const FgTrace& recorded,
                        std::optional<FgConfig> config = std::nullopt);

}  // namespace fuzzfeed::fg
