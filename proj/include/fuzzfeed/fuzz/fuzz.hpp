#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>

#include "json.hpp"

#include "fuzzfeed/fuzz/generator.hpp"
#include "fuzzfeed/fuzz_input.hpp"
#include "fuzzfeed/minilang/minilang.hpp"

namespace fuzzfeed::fuzz {

using minilang::Program;

enum class Phase { Validity, Weakness };

std::string_view to_string(Phase phase);

/// Whichever limit is reached first ends a phase; at least one must be set.
struct FuzzBudget {
  std::optional<double> wall_clock_seconds = 10.0;
  std::optional<std::uint64_t> trial_limit = 100'000;

  void validate() const;

  static FuzzBudget trials(std::uint64_t n) { return {std::nullopt, n}; }
};

void to_json(nlohmann::json& j, const FuzzBudget& budget);
void from_json(const nlohmann::json& j, FuzzBudget& budget);

struct PhaseStats {
  std::uint64_t trials = 0;
  std::uint64_t precondition_true = 0;
  std::uint64_t precondition_false = 0;
  std::uint64_t precondition_faults = 0;       // runtime errors inside precondition (counted as false)
  std::uint64_t precondition_step_limits = 0;  // inconclusive trials
  std::uint64_t foo_step_limits = 0;           // inconclusive trials
  std::uint64_t foo_runs = 0;

  friend bool operator==(const PhaseStats&, const PhaseStats&) = default;
};

void to_json(nlohmann::json& j, const PhaseStats& stats);
void from_json(const nlohmann::json& j, PhaseStats& stats);

struct FuzzVerdict {
  bool counterexample = false;
  FuzzInput witness;           // shrunk when shrinking is on
  FuzzInput original_witness;  // as generated
  std::uint64_t witness_index = 0;
  std::uint64_t trials_run = 0;
  PhaseStats stats;
  double elapsed_seconds = 0.0;

  bool likely_pass() const { return !counterexample; }
};

struct FuzzOptions {
  FuzzBudget budget;
  GeneratorConfig generator;
  std::uint64_t step_limit = minilang::kDefaultStepLimit;
  bool shrink = true;
  /// 1 selects the serial loop; more selects the OpenMP kernel. Both return
  /// the lowest-index counterexample, so trial-limited runs agree exactly.
  unsigned threads = 1;
};

enum class TrialClass : std::uint8_t { NotRun, Pass, Counterexample, Inconclusive };

/// Classifies one input against the phase predicate:
///   validity: precondition true and foo fails
///   weakness: precondition false and foo returns 0
/// A step-limit hit on either side is Inconclusive.
TrialClass classify(const Program& program, const FuzzInput& input, Phase phase,
                    std::uint64_t step_limit = minilang::kDefaultStepLimit, PhaseStats* stats = nullptr);

bool is_counterexample(const Program& program, const FuzzInput& input, Phase phase,
                       std::uint64_t step_limit = minilang::kDefaultStepLimit);

FuzzVerdict run_phase(const Program& program, Phase phase, const FuzzOptions& options);
FuzzVerdict run_phase_serial(const Program& program, Phase phase, const FuzzOptions& options);
FuzzVerdict run_phase_parallel(const Program& program, Phase phase, const FuzzOptions& options);

inline FuzzVerdict validity_fuzz(const Program& program, const FuzzOptions& options) {
  return run_phase(program, Phase::Validity, options);
}
inline FuzzVerdict weakness_fuzz(const Program& program, const FuzzOptions& options) {
  return run_phase(program, Phase::Weakness, options);
}

/// Greedy shrink: drop elements, then move magnitudes toward zero, keeping the
/// counterexample property at every step. Never grows the input.
FuzzInput shrink(const Program& program, FuzzInput witness, Phase phase,
                 std::uint64_t step_limit = minilang::kDefaultStepLimit);

/// (total length, total magnitude), compared lexicographically by shrink.
std::pair<std::uint64_t, std::uint64_t> input_size(const FuzzInput& input);

// ---------------------------------------------------------------------------
// Exhaustive oracle over a finite domain.

class DomainTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kMaxExhaustiveInputs = 10'000'000;

struct ExhaustiveVerdict {
  bool counterexample = false;
  FuzzInput witness;
  std::uint64_t inputs_checked = 0;
};

/// Number of (a, b, c) triples with lengths <= max_len over `value_count`
/// values; saturates at UINT64_MAX.
std::uint64_t domain_size(std::size_t max_len, std::size_t value_count);

/// The index-th input of the domain in enumeration order.
FuzzInput domain_point(std::uint64_t index, std::size_t max_len, std::span<const std::int32_t> values);

/// Enumerates the domain and returns the first counterexample in enumeration
/// order. Throws DomainTooLarge beyond kMaxExhaustiveInputs.
ExhaustiveVerdict exhaustive_check(const Program& program, std::size_t max_len,
                                   std::span<const std::int32_t> values, Phase phase,
                                   std::uint64_t step_limit = minilang::kDefaultStepLimit,
                                   unsigned threads = 1);

inline constexpr std::int32_t kTinyDomainValues[] = {-1, 0, 1};
inline constexpr std::size_t kTinyDomainMaxLen = 2;

}  // namespace fuzzfeed::fuzz
