#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fuzzfeed/eval/eval.hpp"
#include "support/reference.hpp"
#include "support/sources.hpp"

using namespace fuzzfeed;
using namespace fuzzfeed::eval;
using fuzzfeed::testing::motivating_candidate;
using fuzzfeed::testing::read_text;
using fuzzfeed::testing::source_path;
namespace fs = std::filesystem;

namespace {

const corpus::BenchmarkSet& builtin() {
  static const corpus::BenchmarkSet set = corpus::load_corpus(source_path("corpus/builtin"));
  return set;
}

const corpus::BenchmarkProgram& program(const std::string& id) {
  const auto* p = builtin().find(id);
  REQUIRE(p != nullptr);
  return *p;
}

std::string response(const corpus::BenchmarkProgram& p, const std::string& pre) {
  return "```\n" + p.foo_source + "\n" + pre + "```\n";
}

corpus::BenchmarkSet subset(const std::vector<std::string>& ids) {
  corpus::BenchmarkSet s{"subset", {}};
  for (const auto& id : ids) s.programs.push_back(program(id));
  return s;
}

eval::BenchmarkReport reference() { return testing::reference_report(source_path("fixtures/reference_rows.json")); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

BenchConfig quick_bench(bool fg_enabled, unsigned k) {
  BenchConfig c;
  c.label = fg_enabled ? "scripted-FG" : "scripted";
  c.k = k;
  c.seed = 11;
  c.fg.fg_enabled = fg_enabled;
  c.fg.budget = fuzz::FuzzBudget::trials(5000);
  c.equivalence.budget = fuzz::FuzzBudget::trials(5000);
  return c;
}

}  // namespace

TEST_CASE("rounding helpers") {
  CHECK(centi_ratio(83, 5) == 1660);
  CHECK(centi_ratio(2, 3) == 67);
  CHECK(centi_ratio(1, 8) == 13);   // 12.5 rounds up
  CHECK(centi_ratio(100 * 165, 180) == 9167);
  CHECK(format_avg(1660) == "16.6");
  CHECK(format_avg(600) == "6");
  CHECK(format_avg(567) == "5.67");
  CHECK(format_avg(5) == "0.05");
  CHECK(format_pct(8300) == "83.00");
  CHECK(format_pct(10000) == "100.00");
}

TEST_CASE("reference counts give the expected percentages") {
  auto r = reference();
  auto csv = lines(report_csv(r));
  REQUIRE(csv.size() == 5);
  CHECK(csv[1] == "GPT-4o-FG,Existential,20,16,17,16.6,83.00,5,7,6,5,6,5.6");
  CHECK(csv[2] == "GPT-4o-FG,Universal,36,32,34,33,91.67,6,10,7.8,6,9,6.8");
  CHECK(csv[3] == "GPT-4o-FG,Sorting,8,4,6,5.4,67.50,4,6,4.6,2,4,2.6");
  CHECK(csv[4] == "GPT-4o-FG,Search,6,5,6,5.8,96.67,1,2,1.8,1,2,1.6");
}

TEST_CASE("report files round-trip") {
  auto r = reference();
  auto dir = fs::temp_directory_path() / "fuzzfeed-tests" / "report";
  fs::remove_all(dir);
  emit_report(r, dir);
  CHECK(parse_report_csv(read_text(dir / kReportCsv)) == r.summary);
  auto details = parse_detail_csv(read_text(dir / kDetailCsv));
  CHECK(details == r.details);
  auto back = parse_report_json(nlohmann::json::parse(read_text(dir / kReportJson)));
  CHECK(back.iterations == r.iterations);
  CHECK(back.summary == r.summary);
  CHECK(back.details == r.details);

  std::vector<std::pair<std::string, std::uint64_t>> sizes = {
      {"Existential", 20}, {"Universal", 36}, {"Sorting", 8}, {"Search", 6}};
  CHECK(summarize(details, r.iterations, sizes) == r.summary);
}

TEST_CASE("CSV cells with commas are quoted") {
  auto r = reference();
  for (auto& d : r.details) d.configuration = "a,\"b\"";
  r.summary = summarize(r.details, r.iterations);
  auto back = parse_report_csv(report_csv(r));
  CHECK(back == r.summary);
  CHECK(back[0].configuration == "a,\"b\"");
}

TEST_CASE("empty reports are rejected") {
  BenchmarkReport empty;
  try {
    emit_report(empty, fs::temp_directory_path() / "fuzzfeed-tests" / "empty");
    FAIL("expected EmptyReport");
  } catch (const ReportError& e) {
    CHECK(e.kind() == ReportError::Kind::EmptyReport);
  }
  CHECK_THROWS_AS(summarize({}, 0), ReportError);
  CHECK_THROWS_AS(parse_report_csv("nope\n"), ReportError);
}

TEST_CASE("equivalence judgments") {
  const auto& sc = program("sorting_copy");
  auto final_c = corpus::with_precondition(sc, motivating_candidate("final"));
  auto strong = corpus::with_precondition(sc, motivating_candidate("strong"));

  SUBCASE("structurally different sortedness check") {
    auto v = check_equivalence(*final_c, sc);
    CHECK(v.equivalent);
    CHECK(v.exhaustive_inputs == fuzz::domain_size(2, 3));
    CHECK(v.trials == 100000);
  }
  SUBCASE("the too-strong candidate disagrees on a short c") {
    auto v = check_equivalence(*strong, *final_c);
    REQUIRE_FALSE(v.equivalent);
    REQUIRE(v.witness);
    CHECK(v.said_true == SaidTrue::Truth);
    CHECK(v.witness->c.size() < v.witness->a.size());
    CHECK(minilang::eval_precondition(*final_c, *v.witness).holds);
    CHECK_FALSE(minilang::eval_precondition(*strong, *v.witness).holds);
  }
  SUBCASE("reflexive") {
    auto v = check_equivalence(*sc.with_truth, sc);
    CHECK(v.equivalent);
  }
  SUBCASE("a disagreement outside the tiny domain is found by fuzzing") {
    const auto& hundred = program("exists_hundred");
    auto never = corpus::with_precondition(hundred, "bool precondition(int[] a, int[] b, int[] c) { return false; }");
    auto v = check_equivalence(*never, hundred);
    REQUIRE_FALSE(v.equivalent);
    CHECK(v.said_true == SaidTrue::Truth);
    CHECK(v.exhaustive_inputs == fuzz::domain_size(2, 3));
    CHECK(v.trials > 0);
  }
  SUBCASE("parallel search returns the serial witness") {
    EquivalenceOptions opts;
    opts.exhaustive = false;
    opts.generator = fuzz::GeneratorConfig::defaults(5);
    auto serial = check_equivalence(*strong, *final_c, opts);
    opts.threads = 4;
    auto parallel = check_equivalence(*strong, *final_c, opts);
    REQUIRE(serial.witness);
    REQUIRE(parallel.witness);
    CHECK(*serial.witness == *parallel.witness);
    CHECK(serial.trials == parallel.trials);
  }
}

TEST_CASE("equivalent candidates get the same phase verdicts as the truth") {
  const auto& sc = program("sorting_copy");
  auto final_c = corpus::with_precondition(sc, motivating_candidate("final"));
  REQUIRE(check_equivalence(*final_c, sc).equivalent);
  fuzz::FuzzOptions opts;
  opts.budget = fuzz::FuzzBudget::trials(20000);
  for (std::uint64_t seed : {1, 2, 3}) {
    opts.generator = fuzz::GeneratorConfig::defaults(seed);
    for (auto phase : {fuzz::Phase::Validity, fuzz::Phase::Weakness}) {
      CHECK(fuzz::run_phase(*final_c, phase, opts).counterexample ==
            fuzz::run_phase(*sc.with_truth, phase, opts).counterexample);
    }
  }
}

TEST_CASE("zero-shot benchmark correct on three of four programs") {
  auto set = subset({"exists_hundred", "double_index", "sorting_copy", "search_absent_zero"});
  std::vector<llm::ScriptEntry> script;
  for (unsigned it = 0; it < 5; ++it) {
    for (const auto& p : set.programs) {
      std::string pre = p.id == "sorting_copy" ? motivating_candidate("initial") : p.truth_source;
      script.push_back({p.id, response(p, pre)});
    }
  }
  llm::ScriptedProvider provider(script);
  auto r = run_benchmark(set, provider, quick_bench(false, 5));
  REQUIRE(r.details.size() == 20);
  std::uint64_t correct = 0;
  for (const auto& s : r.summary) {
    correct += s.correct.avg_centi;
    CHECK(s.correct.min == s.correct.max);
    CHECK(s.fg_usage.max == 0);
  }
  CHECK(correct == 300);
  for (const auto& d : r.details) {
    CHECK(d.correct == (d.program_id != "sorting_copy"));
    CHECK(d.outcome == fg::Outcome::Accepted);
  }
  BenchmarkReport pooled = r;
  for (auto& d : pooled.details) d.benchmark = "All";
  auto rows = summarize(pooled.details, 5);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].correct.avg_centi == 300);
  CHECK(format_pct(rows[0].correct_pct_centi) == "75.00");
}

TEST_CASE("FG benchmark repairs exactly one program") {
  auto set = subset({"exists_hundred", "sorting_copy", "search_absent_zero"});
  const unsigned k = 2;
  std::vector<llm::ScriptEntry> script;
  for (unsigned it = 0; it < k; ++it) {
    for (const auto& p : set.programs) {
      if (p.id == "sorting_copy") {
        for (auto stage : {"initial", "strong", "regressed", "final"}) {
          script.push_back({p.id, response(p, motivating_candidate(stage))});
        }
      } else {
        script.push_back({p.id, response(p, p.truth_source)});
      }
    }
  }
  auto run = [&](unsigned workers) {
    llm::ScriptedProvider provider(script);
    auto c = quick_bench(true, k);
    c.fg.budget = fuzz::FuzzBudget::trials(20000);
    c.workers = workers;
    return run_benchmark(set, provider, c);
  };
  auto r = run(1);
  std::int64_t usage = 0, success = 0;
  for (const auto& s : r.summary) {
    usage += s.fg_usage.avg_centi;
    success += s.fg_success.avg_centi;
  }
  CHECK(usage == 100);
  CHECK(success == 100);
  for (const auto& d : r.details) {
    CHECK(d.correct);
    if (d.program_id == "sorting_copy") {
      CHECK(d.cycles == 2);
      CHECK(d.llm_calls == 4);
    }
  }

  auto parallel = run(3);
  CHECK(parallel.details == r.details);
  CHECK(parallel.summary == r.summary);
}

TEST_CASE("provider failures count as Malformed and incorrect") {
  auto set = subset({"exists_hundred", "double_index"});
  llm::ScriptedProvider provider({{std::string("exists_hundred"), response(program("exists_hundred"),
                                                                           program("exists_hundred").truth_source)}});
  auto r = run_benchmark(set, provider, quick_bench(true, 1));
  REQUIRE(r.details.size() == 2);
  CHECK(r.details[0].program_id == "double_index");
  CHECK(r.details[0].outcome == fg::Outcome::Malformed);
  CHECK_FALSE(r.details[0].correct);
  CHECK(r.details[1].correct);
}

TEST_CASE("benchmark rejects k = 0") {
  llm::ScriptedProvider provider({});
  auto c = quick_bench(false, 0);
  CHECK_THROWS_AS(run_benchmark(builtin(), provider, c), std::invalid_argument);
}
