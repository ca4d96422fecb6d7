#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzfeed/fuzz/fuzz.hpp"
#include "fuzzfeed/minilang/minilang.hpp"

namespace fuzzfeed::corpus {

enum class Category { Existential, Universal, Sorting, Search };

inline constexpr Category kCategories[] = {Category::Existential, Category::Universal, Category::Sorting,
                                           Category::Search};

std::string_view to_string(Category c);
Category category_from_string(std::string_view name);

struct BenchmarkProgram {
  std::string id;
  Category category = Category::Existential;
  std::string description;
  std::string foo_source;    // file contents
  std::string truth_source;  // file contents: one `precondition` function
  minilang::ProgramPtr foo;        // foo only
  minilang::ProgramPtr with_truth;  // foo + truth as `precondition`
};

struct BenchmarkSet {
  std::string name;
  std::vector<BenchmarkProgram> programs;

  const BenchmarkProgram* find(std::string_view id) const;
  std::size_t count(Category c) const;
};

enum class CorpusErrorKind { ManifestMissing, ManifestInvalid, DuplicateId, FileMissing, ParseError, BadSignature };

std::string_view to_string(CorpusErrorKind kind);

class CorpusError : public std::runtime_error {
 public:
  CorpusError(CorpusErrorKind kind, std::string message);
  CorpusErrorKind kind() const { return kind_; }

 private:
  CorpusErrorKind kind_;
};

inline constexpr std::string_view kManifestName = "corpus.json";

/// Reads `<dir>/corpus.json` and every program it lists. Parse and type
/// errors are reported as "<file>:<line>:<col>: ...".
BenchmarkSet load_corpus(const std::filesystem::path& dir);

/// Attaches a precondition source to a benchmark's foo; throws MinilangError.
minilang::ProgramPtr with_precondition(const BenchmarkProgram& program, std::string_view precondition_source);

// ---------------------------------------------------------------------------
// Self-validation

enum class FindingSource { Fuzz, Exhaustive };

std::string_view to_string(FindingSource s);

struct Finding {
  std::string program_id;
  fuzz::Phase phase = fuzz::Phase::Validity;
  FindingSource source = FindingSource::Fuzz;
  FuzzInput witness;
  std::string detail;  // foo outcome and precondition value on the witness
};

struct ValidationOptions {
  fuzz::FuzzBudget budget;  // per phase
  std::uint64_t seed = 0;
  std::uint64_t step_limit = minilang::kDefaultStepLimit;
  unsigned threads = 1;
};

struct ValidationReport {
  std::size_t programs_checked = 0;
  std::vector<Finding> findings;
  bool clean() const { return findings.empty(); }
};

/// Fuzzes each truth in both phases and enumerates the tiny domain in both.
ValidationReport validate_corpus(const BenchmarkSet& set, const ValidationOptions& options = {});

std::string describe(const Finding& f);

}  // namespace fuzzfeed::corpus
