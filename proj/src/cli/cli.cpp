#include "fuzzfeed/cli/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "fuzzfeed/corpus/corpus.hpp"
#include "fuzzfeed/eval/eval.hpp"
#include "fuzzfeed/fg/fg.hpp"

namespace fuzzfeed::cli {

namespace fs = std::filesystem;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  // fuzzing
  double fuzz_seconds = 10.0;
  std::uint64_t fuzz_trials = 100'000;
  std::optional<std::uint64_t> seed;
  unsigned fuzz_threads = 1;
  bool unshaped = false;
  bool no_shrink = false;
  // orchestration
  bool no_fg = false;
  unsigned max_validity_iters = 10;
  unsigned max_cycles = 3;
  bool strict_fuzz_blind = false;
  // provider
  std::string provider;
  std::string model = "gpt-4o";
  std::string base_url;
  std::string record;
  bool lenient_replay = false;
  // output
  std::string out = "out";
  bool verbose = false;
  // command arguments
  std::string program_file;
  std::string candidate_file;
  std::string truth_file;
  std::string corpus_dir;
  std::vector<std::string> trace_files;
  std::string trace_file;
  unsigned k = 5;
  unsigned workers = 1;
  std::uint64_t judge_trials = 100'000;
  std::string label;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string program_id_of(const fs::path& p) {
  std::string name = p.filename().string();
  if (name.size() > 5 && name.ends_with(".mini")) name.resize(name.size() - 5);
  return name;
}

std::string located(const fs::path& file, const minilang::MinilangError& e) {
  return fmt::format("{}:{}:{}: {}: {}", file.string(), e.pos().line, e.pos().column,
                     minilang::error_kind_name(e.kind()), e.message());
}

// foo only, even when the file also carries a precondition
minilang::ProgramPtr load_foo(const fs::path& file) {
  const std::string text = read_file(file);
  try {
    auto p = minilang::load_program(text);
    if (p->precondition() == nullptr) return p;
    return minilang::load_program(std::string(p->function_source(p->foo())));
  } catch (const minilang::MinilangError& e) {
    throw ConfigError(located(file, e));
  }
}

// Attaches the precondition found in `file` (which may also repeat foo).
minilang::ProgramPtr load_with_precondition(const minilang::Program& foo, const fs::path& file) {
  const std::string text = read_file(file);
  try {
    auto c = minilang::load_program(text, {.allow_missing_foo = true});
    const auto* pre = c->precondition();
    if (pre == nullptr) throw ConfigError(file.string() + ": no 'precondition' function");
    if (const auto* f = c->find("foo"); f != nullptr && !minilang::same_function(*f, foo.foo())) {
      throw ConfigError(file.string() + ": its foo differs from the program's");
    }
    return minilang::load_program(minilang::attach_precondition(foo, c->function_source(*pre)));
  } catch (const minilang::MinilangError& e) {
    throw ConfigError(located(file, e));
  }
}

std::uint64_t resolve_seed(const Options& o, std::ostream& out) {
  std::uint64_t seed = 0;
  if (o.seed) {
    seed = *o.seed;
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  fmt::print(out, "seed: {}\n", seed);
  return seed;
}

fuzz::FuzzBudget budget_of(const Options& o) {
  fuzz::FuzzBudget b;
  b.wall_clock_seconds = o.fuzz_seconds > 0 ? std::optional<double>(o.fuzz_seconds) : std::nullopt;
  b.trial_limit = o.fuzz_trials > 0 ? std::optional<std::uint64_t>(o.fuzz_trials) : std::nullopt;
  if (!b.wall_clock_seconds && !b.trial_limit) {
    throw ConfigError("--fuzz-seconds 0 and --fuzz-trials 0 leave fuzzing unbounded");
  }
  return b;
}

fuzz::GeneratorConfig generator_of(const Options& o, std::uint64_t seed) {
  return o.unshaped ? fuzz::GeneratorConfig::unshaped(seed) : fuzz::GeneratorConfig::defaults(seed);
}

fg::FgConfig fg_config_of(const Options& o, std::uint64_t seed) {
  fg::FgConfig c;
  c.max_validity_iterations = o.max_validity_iters;
  c.max_cycles = o.max_cycles;
  c.budget = budget_of(o);
  c.generator = generator_of(o, seed);
  c.fg_enabled = !o.no_fg;
  c.strict_fuzz_blind = o.strict_fuzz_blind;
  c.shrink = !o.no_shrink;
  c.fuzz_threads = o.fuzz_threads;
  c.model = o.model;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

struct ProviderHandle {
  std::shared_ptr<llm::ChatProvider> provider;
  llm::ReplayProvider* replay = nullptr;
  std::string kind;
};

ProviderHandle make_provider(const Options& o) {
  ProviderHandle h;
  const std::string& spec = o.provider;
  try {
    if (spec == "http") {
      llm::HttpConfig hc;
      if (!o.base_url.empty()) hc.base_url = o.base_url;
      hc.model = o.model;
      hc.api_key = llm::api_key_from_environment();
      if (hc.api_key.empty()) throw ConfigError("--provider http needs FUZZFEED_API_KEY or OPENAI_API_KEY");
      h.provider = std::make_shared<llm::HttpProvider>(hc);
      h.kind = o.model;
    } else if (spec.starts_with("replay:")) {
      auto r = llm::ReplayProvider::from_file(spec.substr(7), o.lenient_replay);
      h.replay = r.get();
      h.provider = std::move(r);
      h.kind = "replay";
    } else if (spec.starts_with("scripted:")) {
      h.provider = llm::ScriptedProvider::from_file(spec.substr(9));
      h.kind = "scripted";
    } else {
      throw ConfigError("--provider must be http, replay:<path> or scripted:<path>");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!o.record.empty()) h.provider = std::make_shared<llm::RecordingProvider>(h.provider, o.record);
  return h;
}

void report_divergences(const ProviderHandle& h, std::ostream& err) {
  if (h.replay != nullptr && h.replay->divergences() > 0) {
    fmt::print(err, "warning: {} replayed request(s) differed from the recording\n", h.replay->divergences());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
}

int exit_code_for(fg::Outcome o) {
  switch (o) {
    case fg::Outcome::Accepted: return kExitOk;
    case fg::Outcome::Malformed: return kExitMalformed;
    case fg::Outcome::ExhaustedBudget:
    case fg::Outcome::FuzzBlind: return kExitExhausted;
  }
  return kExitConfig;
}

std::string candidate_text(const llm::CandidateWp& c) {
  const auto& p = *c.program;
  return std::string(p.function_source(*p.precondition())) + "\n";
}

// ---------------------------------------------------------------------------

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  auto foo = load_foo(o.program_file);
  const std::string id = program_id_of(o.program_file);
  const auto seed = resolve_seed(o, out);
  auto config = fg_config_of(o, seed);
  auto h = make_provider(o);

  auto result = fg::generate_wp(*foo, id, *h.provider, config);
  report_divergences(h, err);

  const fs::path dir = o.out;
  ensure_dir(dir);
  const fs::path trace_path = dir / (id + ".trace.jsonl");
  fg::write_trace(trace_path, result.trace);
  fmt::print(out, "outcome: {}\n", fg::to_string(result.kind));
  fmt::print(out, "cycles: {}  repairs: {}  llm calls: {}\n", result.trace.cycles_used(), result.trace.repairs(),
             result.trace.llm_calls());
  if (result.candidate) {
    const fs::path cand_path = dir / (id + ".candidate.mini");
    std::ofstream(cand_path, std::ios::binary) << candidate_text(*result.candidate);
    fmt::print(out, "candidate: {}\n", cand_path.string());
  }
  fmt::print(out, "trace: {}\n", trace_path.string());
  if (o.verbose) {
    for (const auto& e : result.trace.events) fmt::print(out, "  {}\n", nlohmann::json(e).dump());
  }
  return exit_code_for(result.kind);
}

int cmd_check(const Options& o, std::ostream& out, std::ostream&) {
  auto foo = load_foo(o.program_file);
  auto candidate = load_with_precondition(*foo, o.candidate_file);
  minilang::ProgramPtr truth;
  if (!o.truth_file.empty()) truth = load_with_precondition(*foo, o.truth_file);
  const auto seed = resolve_seed(o, out);

  bool clean = true;
  for (auto phase : {fuzz::Phase::Validity, fuzz::Phase::Weakness}) {
    fuzz::FuzzOptions opts;
    opts.budget = budget_of(o);
    opts.generator = generator_of(o, fuzz::mix_seed(seed, static_cast<std::uint64_t>(phase)));
    opts.shrink = !o.no_shrink;
    opts.threads = o.fuzz_threads;
    auto v = fuzz::run_phase(*candidate, phase, opts);
    if (v.counterexample) {
      clean = false;
      auto pre = minilang::eval_precondition(*candidate, v.witness);
      auto foo_out = minilang::run_foo(*candidate, v.witness);
      fmt::print(out, "{}: counterexample after {} trials\n  witness: {}\n  precondition {}, foo {}\n",
                 fuzz::to_string(phase), v.trials_run, to_json_string(v.witness), pre.holds ? "true" : "false",
                 minilang::describe(foo_out));
    } else {
      fmt::print(out, "{}: likely pass ({} trials, {} with precondition true)\n", fuzz::to_string(phase),
                 v.trials_run, v.stats.precondition_true);
    }
  }
  if (truth) {
    eval::EquivalenceOptions eq;
    eq.generator = fuzz::GeneratorConfig::defaults(fuzz::mix_seed(seed, 2));
    eq.budget = budget_of(o);
    eq.threads = o.fuzz_threads;
    auto v = eval::check_equivalence(*candidate, *truth, eq);
    if (v.equivalent) {
      fmt::print(out, "equivalence: likely equivalent ({} tiny-domain inputs, {} fuzzed)\n", v.exhaustive_inputs,
                 v.trials);
    } else {
      fmt::print(out, "equivalence: not equivalent, only the {} holds on\n  witness: {}\n", eval::to_string(v.said_true),
                 to_json_string(*v.witness));
    }
  }
  return clean ? kExitOk : kExitCounterexample;
}

corpus::BenchmarkSet load_set(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError(dir + " is not a directory");
  try {
    auto set = corpus::load_corpus(dir);
    if (set.programs.empty()) throw ConfigError(dir + ": corpus has no programs");
    return set;
  } catch (const corpus::CorpusError& e) {
    throw ConfigError(e.what());
  }
}

int cmd_corpus_validate(const Options& o, std::ostream& out, std::ostream&) {
  auto set = load_set(o.corpus_dir);
  corpus::ValidationOptions v;
  v.budget = budget_of(o);
  v.seed = resolve_seed(o, out);
  v.threads = o.fuzz_threads;
  auto report = corpus::validate_corpus(set, v);
  for (const auto& f : report.findings) fmt::print(out, "finding: {}\n", corpus::describe(f));
  fmt::print(out, "{} programs checked, {} finding(s)\n", report.programs_checked, report.findings.size());
  return report.clean() ? kExitOk : kExitCounterexample;
}

class TraceWriter : public eval::BenchObserver {
 public:
  TraceWriter(fs::path dir, std::ostream& out, bool verbose) : dir_(std::move(dir)), out_(out), verbose_(verbose) {}

  void finished(const eval::DetailRow& row, const fg::WpOutcome& outcome) override {
    const fs::path d = dir_ / fmt::format("it{}", row.iteration);
    ensure_dir(d);
    fg::write_trace(d / (row.program_id + ".trace.jsonl"), outcome.trace);
    if (verbose_) {
      fmt::print(out_, "  [{}] {:<24} {:<16} correct={} fg_used={} calls={} {:.2f}s\n", row.iteration,
                 row.program_id, fg::to_string(row.outcome), int(row.correct), int(row.fg_used), row.llm_calls,
                 row.wall_seconds);
    }
    wall_ += row.wall_seconds;
  }

  double wall() const { return wall_; }

 private:
  fs::path dir_;
  std::ostream& out_;
  bool verbose_;
  double wall_ = 0.0;
};

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.k < 1) throw ConfigError("-k must be at least 1");
  if (o.workers < 1) throw ConfigError("--workers must be at least 1");
  auto set = load_set(o.corpus_dir);

  // tiny-domain gate on the truths
  corpus::ValidationOptions vo;
  vo.budget = fuzz::FuzzBudget::trials(1);
  auto pre = corpus::validate_corpus(set, vo);
  if (!pre.clean()) {
    for (const auto& f : pre.findings) fmt::print(err, "finding: {}\n", corpus::describe(f));
    throw ConfigError(o.corpus_dir + ": corpus does not validate");
  }

  const auto seed = resolve_seed(o, out);
  eval::BenchConfig bc;
  bc.fg = fg_config_of(o, seed);
  bc.k = o.k;
  bc.workers = o.workers;
  bc.seed = seed;
  bc.equivalence.budget = fuzz::FuzzBudget::trials(o.judge_trials);
  bc.equivalence.threads = o.fuzz_threads;
  auto h = make_provider(o);
  bc.label = o.label.empty() ? h.kind + (o.no_fg ? "" : "-FG") : o.label;

  const fs::path dir = o.out;
  ensure_dir(dir);
  TraceWriter traces(dir / "traces", out, o.verbose);
  auto report = eval::run_benchmark(set, *h.provider, bc, &traces);
  report_divergences(h, err);
  eval::emit_report(report, dir);

  fmt::print(out, "{:<14} {:<12} {:>3}  {:<22} {:<14} {}\n", "configuration", "benchmark", "n", "correct",
             "fg usage", "fg success");
  for (const auto& s : report.summary) {
    fmt::print(out, "{:<14} {:<12} {:>3}  {:<22} {:<14} {}\n", s.configuration, s.benchmark, s.n_programs,
               fmt::format("{}-{} ({}, {}%)", s.correct.min, s.correct.max, eval::format_avg(s.correct.avg_centi),
                           eval::format_pct(s.correct_pct_centi)),
               fmt::format("{}-{} ({})", s.fg_usage.min, s.fg_usage.max, eval::format_avg(s.fg_usage.avg_centi)),
               fmt::format("{}-{} ({})", s.fg_success.min, s.fg_success.max,
                           eval::format_avg(s.fg_success.avg_centi)));
  }
  fmt::print(out, "total generation wall time: {:.1f}s\n", traces.wall());
  fmt::print(out, "reports: {}\n", dir.string());
  return kExitOk;
}

int cmd_replay(const Options& o, std::ostream& out, std::ostream&) {
  fg::FgTrace trace;
  try {
    trace = fg::read_trace(o.trace_file);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  auto foo = load_foo(o.program_file);
  std::optional<fg::FgConfig> override;
  if (o.seed) {
    if (trace.events.empty() || !std::holds_alternative<fg::RunStarted>(trace.events.front())) {
      throw ConfigError(o.trace_file + ": trace must start with RunStarted");
    }
    override = std::get<fg::RunStarted>(trace.events.front()).config;
    override->generator.seed = *o.seed;
  }
  fg::ReplayResult r;
  try {
    r = fg::replay_run(*foo, trace, override);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  fmt::print(out, "outcome: {}\n", fg::to_string(r.outcome.kind));
  if (!r.divergence.diverged) {
    fmt::print(out, "no divergence over {} events\n", trace.events.size());
    return kExitOk;
  }
  fmt::print(out, "diverged at event {}\n  recorded: {}\n  replayed: {}\n", r.divergence.event_index,
             r.divergence.expected, r.divergence.actual);
  return kExitCounterexample;
}

int cmd_validate_trace(const Options& o, std::ostream& out, std::ostream&) {
  bool all_ok = true;
  for (const auto& file : o.trace_files) {
    fg::FgTrace trace;
    try {
      trace = fg::read_trace(file);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    auto check = fg::validate_trace(trace.events);
    if (check.ok) {
      fmt::print(out, "{}: ok\n", file);
    } else {
      all_ok = false;
      fmt::print(out, "{}: illegal at event {}: {}\n", file, check.event_index, check.reason);
    }
  }
  return all_ok ? kExitOk : kExitCounterexample;
}

void add_fuzz_options(CLI::App* app, Options& o) {
  app->add_option("--fuzz-seconds", o.fuzz_seconds, "Wall-clock budget per fuzz phase; 0 disables it")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--fuzz-trials", o.fuzz_trials, "Trial budget per fuzz phase; 0 disables it");
  app->add_option("--seed", o.seed, "Master seed (random and printed when absent)");
  app->add_option("--fuzz-threads", o.fuzz_threads, "OpenMP threads inside each fuzz phase")
      ->check(CLI::PositiveNumber);
  app->add_flag("--paper-faithful,--unshaped", o.unshaped, "Plain random generation without shaped draws");
}

void add_generation_options(CLI::App* app, Options& o) {
  add_fuzz_options(app, o);
  app->add_flag("--no-fg", o.no_fg, "Zero-shot: one prompt, no fuzzing");
  app->add_option("--max-validity-iters", o.max_validity_iters, "Validity-fuzz runs per cycle (X)")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-cycles", o.max_cycles, "FG cycles")->check(CLI::PositiveNumber);
  app->add_flag("--strict-fuzz-blind", o.strict_fuzz_blind, "Stop with FuzzBlind on a vacuous validity pass");
  app->add_flag("--no-shrink", o.no_shrink, "Report counterexamples as generated");
  app->add_option("--provider", o.provider, "http | replay:<path> | scripted:<path>")->required();
  app->add_option("--model", o.model, "Model name for the http provider");
  app->add_option("--base-url", o.base_url, "Chat-completions base URL");
  app->add_option("--record", o.record, "Append every exchange to this transcript");
  app->add_flag("--lenient-replay", o.lenient_replay, "Replay responses even when the request differs");
  app->add_option("--out", o.out, "Output directory");
  app->add_flag("-v,--verbose", o.verbose, "Print per-event or per-run details");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fuzzing-guided weakest-precondition generation", "fuzzfeed"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");
  Options o;

  auto* gen = app.add_subcommand("generate", "Generate a precondition for one program");
  gen->add_option("program", o.program_file, "Program file (.mini)")->required();
  add_generation_options(gen, o);

  auto* bench = app.add_subcommand("bench", "Run k iterations over a corpus and write reports");
  bench->add_option("corpus", o.corpus_dir, "Corpus directory")->required();
  bench->add_option("-k", o.k, "Iterations");
  bench->add_option("--workers", o.workers, "Programs generated concurrently");
  bench->add_option("--judge-trials", o.judge_trials, "Fuzz trials when judging equivalence")
      ->check(CLI::PositiveNumber);
  bench->add_option("--config-label", o.label, "Configuration column in the reports");
  add_generation_options(bench, o);

  auto* check = app.add_subcommand("check", "Fuzz a candidate precondition against its program");
  check->add_option("program", o.program_file, "Program file")->required();
  check->add_option("candidate", o.candidate_file, "File with a precondition function")->required();
  check->add_option("--truth", o.truth_file, "Ground truth to compare against");
  check->add_flag("--no-shrink", o.no_shrink, "Report counterexamples as generated");
  add_fuzz_options(check, o);

  auto* validate = app.add_subcommand("corpus-validate", "Check every ground truth of a corpus");
  validate->add_option("corpus", o.corpus_dir, "Corpus directory")->required();
  add_fuzz_options(validate, o);

  auto* replay = app.add_subcommand("replay", "Re-run a recorded trace and report the first divergence");
  replay->add_option("trace", o.trace_file, "Trace file (.trace.jsonl)")->required();
  replay->add_option("program", o.program_file, "Program file")->required();
  replay->add_option("--seed", o.seed, "Replace the recorded seed");

  auto* vtrace = app.add_subcommand("validate-trace", "Check traces against the FG state machine");
  vtrace->add_option("traces", o.trace_files, "Trace files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(o, out, err);
    if (*bench) return cmd_bench(o, out, err);
    if (*check) return cmd_check(o, out, err);
    if (*validate) return cmd_corpus_validate(o, out, err);
    if (*replay) return cmd_replay(o, out, err);
    if (*vtrace) return cmd_validate_trace(o, out, err);
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const eval::ReportError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace fuzzfeed::cli
