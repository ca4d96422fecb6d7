#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fuzzfeed/corpus/corpus.hpp"
#include "fuzzfeed/fg/fg.hpp"
#include "fuzzfeed/fuzz/fuzz.hpp"
#include "json.hpp"

namespace fuzzfeed::eval {

// ---------------------------------------------------------------------------
// Equivalence

struct EquivalenceOptions {
  fuzz::FuzzBudget budget = fuzz::FuzzBudget::trials(100'000);
  fuzz::GeneratorConfig generator = fuzz::GeneratorConfig::defaults(0);
  std::uint64_t step_limit = minilang::kDefaultStepLimit;
  bool exhaustive = true;  // tiny-domain enumeration before fuzzing
  unsigned threads = 1;
};

enum class SaidTrue { Truth, Candidate };

std::string_view to_string(SaidTrue s);

struct EquivalenceVerdict {
  bool equivalent = true;          // LikelyEquivalent
  std::uint64_t exhaustive_inputs = 0;
  std::uint64_t trials = 0;
  std::optional<FuzzInput> witness;  // NotEquivalent only
  SaidTrue said_true = SaidTrue::Truth;
};

/// Compares the `precondition` of `candidate` with `truth`'s ground truth on
/// the tiny domain and then on fuzzed inputs. Faulting predicates count as false.
EquivalenceVerdict check_equivalence(const minilang::Program& candidate, const corpus::BenchmarkProgram& truth,
                                     const EquivalenceOptions& options = {});

/// As above with two programs that both define `precondition`.
EquivalenceVerdict check_equivalence(const minilang::Program& candidate, const minilang::Program& truth,
                                     const EquivalenceOptions& options = {});

// ---------------------------------------------------------------------------
// Benchmark runs

struct BenchConfig {
  std::string label = "FG";  // configuration column
  fg::FgConfig fg;
  unsigned k = 5;
  unsigned workers = 1;
  std::uint64_t seed = 0;
  EquivalenceOptions equivalence;
};

struct DetailRow {
  std::string configuration;
  std::string benchmark;  // category name
  unsigned iteration = 0;  // 1-based
  std::string program_id;
  fg::Outcome outcome = fg::Outcome::Malformed;
  bool fg_used = false;
  bool correct = false;
  unsigned cycles = 0;
  std::uint64_t llm_calls = 0;
  double wall_seconds = 0.0;  // not serialized

  bool fg_success() const { return fg_used && correct; }
  friend bool operator==(const DetailRow& x, const DetailRow& y);
};

/// min, max and the mean in hundredths, rounded half up.
struct Stat {
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  std::int64_t avg_centi = 0;
  friend bool operator==(const Stat&, const Stat&) = default;
};

struct SummaryRow {
  std::string configuration;
  std::string benchmark;
  std::uint64_t n_programs = 0;
  Stat correct;
  std::int64_t correct_pct_centi = 0;  // mean correct / n_programs, hundredths of a percent
  Stat fg_usage;
  Stat fg_success;
  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct BenchmarkReport {
  unsigned iterations = 0;
  std::vector<SummaryRow> summary;
  std::vector<DetailRow> details;  // sorted by (configuration, iteration, program id)
};

/// Per-run hook, called once per finished program-iteration.
struct BenchObserver {
  virtual ~BenchObserver() = default;
  virtual void finished(const DetailRow& row, const fg::WpOutcome& outcome) = 0;
};

/// k iterations over the set; iterations run one after another, programs
/// within an iteration on up to `workers` threads.
BenchmarkReport run_benchmark(const corpus::BenchmarkSet& set, llm::ChatProvider& provider, const BenchConfig& config,
                              BenchObserver* observer = nullptr);

/// Folds detail rows into summary rows. `n_programs` maps category name to
/// set size; categories with rows but no entry use the distinct ids seen.
std::vector<SummaryRow> summarize(const std::vector<DetailRow>& details, unsigned iterations,
                                  const std::vector<std::pair<std::string, std::uint64_t>>& n_programs = {});

/// round-half-up(100 * num / den) hundredths.
std::int64_t centi_ratio(std::uint64_t num, std::uint64_t den);
/// "16.6", "6", "5.67"
std::string format_avg(std::int64_t centi);
/// "83.00"
std::string format_pct(std::int64_t centi);

// ---------------------------------------------------------------------------
// Report files

class ReportError : public std::runtime_error {
 public:
  enum class Kind { EmptyReport, Io, Parse };
  ReportError(Kind kind, std::string message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr const char* kReportCsv = "report.csv";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kDetailCsv = "detail.csv";

std::string report_csv(const BenchmarkReport& report);
std::string detail_csv(const BenchmarkReport& report);
nlohmann::json report_json(const BenchmarkReport& report);

/// Writes report.csv, report.json and detail.csv under `dir`.
void emit_report(const BenchmarkReport& report, const std::filesystem::path& dir);

std::vector<SummaryRow> parse_report_csv(const std::string& text);
std::vector<DetailRow> parse_detail_csv(const std::string& text);
BenchmarkReport parse_report_json(const nlohmann::json& j);

}  // namespace fuzzfeed::eval
