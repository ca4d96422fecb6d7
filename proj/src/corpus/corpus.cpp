#include "fuzzfeed/corpus/corpus.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fuzzfeed::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Existential: return "Existential";
    case Category::Universal: return "Universal";
    case Category::Sorting: return "Sorting";
    case Category::Search: return "Search";
  }
  return "?";
}

Category category_from_string(std::string_view name) {
  for (auto c : kCategories) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown category '" + std::string(name) + "'");
}

std::string_view to_string(CorpusErrorKind kind) {
  switch (kind) {
    case CorpusErrorKind::ManifestMissing: return "ManifestMissing";
    case CorpusErrorKind::ManifestInvalid: return "ManifestInvalid";
    case CorpusErrorKind::DuplicateId: return "DuplicateId";
    case CorpusErrorKind::FileMissing: return "FileMissing";
    case CorpusErrorKind::ParseError: return "ParseError";
    case CorpusErrorKind::BadSignature: return "BadSignature";
  }
  return "?";
}

CorpusError::CorpusError(CorpusErrorKind kind, std::string message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

const BenchmarkProgram* BenchmarkSet::find(std::string_view id) const {
  for (const auto& p : programs) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::size_t BenchmarkSet::count(Category c) const {
  std::size_t n = 0;
  for (const auto& p : programs) n += p.category == c;
  return n;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CorpusError(CorpusErrorKind::FileMissing, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CorpusError located(const fs::path& file, const minilang::MinilangError& e) {
  auto kind = e.kind() == minilang::ErrorKind::BadSignature ? CorpusErrorKind::BadSignature
                                                           : CorpusErrorKind::ParseError;
  return CorpusError(kind, fmt::format("{}:{}:{}: {}: {}", file.string(), e.pos().line, e.pos().column,
                                       minilang::error_kind_name(e.kind()), e.message()));
}

std::string field(const json& entry, const char* key, std::size_t index) {
  if (!entry.contains(key) || !entry[key].is_string()) {
    throw CorpusError(CorpusErrorKind::ManifestInvalid,
                      fmt::format("program #{} lacks string field '{}'", index + 1, key));
  }
  return entry[key].get<std::string>();
}

BenchmarkProgram load_program_entry(const fs::path& dir, const json& entry, std::size_t index) {
  BenchmarkProgram p;
  p.id = field(entry, "id", index);
  try {
    p.category = category_from_string(field(entry, "category", index));
  } catch (const std::invalid_argument& e) {
    throw CorpusError(CorpusErrorKind::ManifestInvalid, p.id + ": " + e.what());
  }
  p.description = entry.value("description", std::string{});
  const fs::path foo_file = dir / field(entry, "file", index);
  const fs::path truth_file = dir / field(entry, "truth", index);
  p.foo_source = read_file(foo_file);
  p.truth_source = read_file(truth_file);

  try {
    p.foo = minilang::load_program(p.foo_source);
  } catch (const minilang::MinilangError& e) {
    throw located(foo_file, e);
  }
  if (p.foo->precondition() != nullptr) {
    throw CorpusError(CorpusErrorKind::ParseError, foo_file.string() + ": program files define foo only");
  }
  try {
    auto truth = minilang::load_program(p.truth_source, {.allow_missing_foo = true});
    if (truth->find("foo") != nullptr || truth->precondition() == nullptr) {
      throw CorpusError(CorpusErrorKind::BadSignature,
                        truth_file.string() + ": truth files define exactly one 'precondition'");
    }
  } catch (const minilang::MinilangError& e) {
    throw located(truth_file, e);
  }
  try {
    p.with_truth = with_precondition(p, p.truth_source);
  } catch (const minilang::MinilangError& e) {
    throw located(truth_file, e);
  }
  return p;
}

}  // namespace

minilang::ProgramPtr with_precondition(const BenchmarkProgram& program, std::string_view precondition_source) {
  return minilang::load_program(minilang::attach_precondition(*program.foo, precondition_source));
}

BenchmarkSet load_corpus(const fs::path& dir) {
  const fs::path manifest = dir / kManifestName;
  if (!fs::is_regular_file(manifest)) {
    throw CorpusError(CorpusErrorKind::ManifestMissing, "no " + std::string(kManifestName) + " in " + dir.string());
  }
  json m;
  try {
    m = json::parse(read_file(manifest));
  } catch (const json::parse_error& e) {
    throw CorpusError(CorpusErrorKind::ManifestInvalid, manifest.string() + ": " + e.what());
  }
  if (!m.is_object() || !m.contains("programs") || !m["programs"].is_array()) {
    throw CorpusError(CorpusErrorKind::ManifestInvalid, manifest.string() + ": expected an object with 'programs'");
  }
  BenchmarkSet set;
  set.name = m.value("name", dir.filename().string());
  std::set<std::string> ids;
  for (std::size_t i = 0; i < m["programs"].size(); ++i) {
    auto p = load_program_entry(dir, m["programs"][i], i);
    if (!ids.insert(p.id).second) throw CorpusError(CorpusErrorKind::DuplicateId, "duplicate id '" + p.id + "'");
    set.programs.push_back(std::move(p));
  }
  return set;
}

std::string_view to_string(FindingSource s) { return s == FindingSource::Fuzz ? "fuzz" : "exhaustive"; }

namespace {

std::string witness_detail(const minilang::Program& program, const FuzzInput& w, std::uint64_t step_limit) {
  auto pre = minilang::eval_precondition(program, w, step_limit);
  auto out = minilang::run_foo(program, w, step_limit);
  return fmt::format("precondition {}, foo {}", pre.holds ? "true" : "false", minilang::describe(out));
}

}  // namespace

ValidationReport validate_corpus(const BenchmarkSet& set, const ValidationOptions& options) {
  ValidationReport report;
  for (std::size_t i = 0; i < set.programs.size(); ++i) {
    const auto& p = set.programs[i];
    const auto& program = *p.with_truth;
    for (auto phase : {fuzz::Phase::Validity, fuzz::Phase::Weakness}) {
      fuzz::FuzzOptions opts;
      opts.budget = options.budget;
      opts.generator = fuzz::GeneratorConfig::defaults(
          fuzz::mix_seed(fuzz::mix_seed(options.seed, i), static_cast<std::uint64_t>(phase)));
      opts.step_limit = options.step_limit;
      opts.threads = options.threads;
      auto v = fuzz::run_phase(program, phase, opts);
      if (v.counterexample) {
        report.findings.push_back(
            {p.id, phase, FindingSource::Fuzz, v.witness, witness_detail(program, v.witness, options.step_limit)});
      }
      auto ex = fuzz::exhaustive_check(program, fuzz::kTinyDomainMaxLen, fuzz::kTinyDomainValues, phase,
                                       options.step_limit, options.threads);
      if (ex.counterexample) {
        report.findings.push_back({p.id, phase, FindingSource::Exhaustive, ex.witness,
                                   witness_detail(program, ex.witness, options.step_limit)});
      }
    }
    ++report.programs_checked;
  }
  return report;
}

std::string describe(const Finding& f) {
  return fmt::format("{}: {} counterexample ({}) {}: {}", f.program_id, fuzz::to_string(f.phase), to_string(f.source),
                     to_json_string(f.witness), f.detail);
}

}  // namespace fuzzfeed::corpus
