#include <filesystem>
#include <fstream>
#include <functional>

#include "doctest.h"
#include "fuzzfeed/corpus/corpus.hpp"
#include "support/mutate.hpp"
#include "support/sources.hpp"

using namespace fuzzfeed;
using namespace fuzzfeed::corpus;
using fuzzfeed::testing::motivating_candidate;
using fuzzfeed::testing::source_path;
namespace fs = std::filesystem;

namespace {

const BenchmarkSet& builtin() {
  static const BenchmarkSet set = load_corpus(source_path("corpus/builtin"));
  return set;
}

bool any_stmt(const std::vector<minilang::Stmt>& body, const std::function<bool(const minilang::Stmt&)>& pred) {
  for (const auto& s : body) {
    if (pred(s) || any_stmt(s.body, pred) || any_stmt(s.else_body, pred)) return true;
  }
  return false;
}

bool any_expr(const minilang::Expr* e, const std::function<bool(const minilang::Expr&)>& pred) {
  return e != nullptr && (pred(*e) || any_expr(e->lhs.get(), pred) || any_expr(e->rhs.get(), pred));
}

bool uses_expr(const std::vector<minilang::Stmt>& body, const std::function<bool(const minilang::Expr&)>& pred) {
  return any_stmt(body, [&](const minilang::Stmt& s) {
    return any_expr(s.value.get(), pred) || any_expr(s.cond.get(), pred) || any_expr(s.index.get(), pred) ||
           (s.init && any_expr(s.init->value.get(), pred));
  });
}

bool is_loop(const minilang::Stmt& s) {
  return s.kind == minilang::StmtKind::While || s.kind == minilang::StmtKind::For;
}

bool returns_literal(const minilang::Stmt& s, bool v) {
  return s.kind == minilang::StmtKind::Return && s.value && s.value->kind == minilang::ExprKind::BoolLit &&
         (s.value->value != 0) == v;
}

// A loop whose body returns the given literal somewhere.
bool loop_returning(const minilang::FunctionDef& fn, bool v) {
  return any_stmt(fn.body, [&](const minilang::Stmt& s) {
    return is_loop(s) && any_stmt(s.body, [&](const minilang::Stmt& t) { return returns_literal(t, v); });
  });
}

fs::path scratch_corpus(const std::string& name) {
  auto dir = fs::temp_directory_path() / "fuzzfeed-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string manifest_for(const std::string& id, const std::string& category = "Sorting") {
  return R"({"name":"t","programs":[{"id":")" + id + R"(","category":")" + category + R"(","file":")" + id +
         R"(.mini","truth":")" + id + R"(.truth.mini","description":"d"}]})";
}

}  // namespace

TEST_CASE("builtin corpus loads with every category represented") {
  const auto& set = builtin();
  CHECK(set.name == "builtin");
  CHECK(set.programs.size() == 18);
  for (auto c : kCategories) CHECK(set.count(c) >= 4);
  for (const auto& p : set.programs) {
    CHECK(p.foo->precondition() == nullptr);
    CHECK(p.with_truth->precondition() != nullptr);
    CHECK_FALSE(p.description.empty());
  }
  REQUIRE(set.find("sorting_copy") != nullptr);
  CHECK(set.find("sorting_copy")->category == Category::Sorting);
  CHECK(set.find("nope") == nullptr);
}

TEST_CASE("category fidelity is structural") {
  for (const auto& p : builtin().programs) {
    CAPTURE(p.id);
    const auto& truth = *p.with_truth->precondition();
    const auto& foo = p.with_truth->foo();
    switch (p.category) {
      case Category::Existential: CHECK(loop_returning(truth, true)); break;
      case Category::Universal: CHECK(loop_returning(truth, false)); break;
      case Category::Sorting:
        CHECK(uses_expr(foo.body, [](const minilang::Expr& e) { return e.kind == minilang::ExprKind::Sort; }));
        break;
      case Category::Search:
        CHECK(uses_expr(foo.body,
                        [](const minilang::Expr& e) { return e.kind == minilang::ExprKind::BinarySearch; }));
        break;
    }
  }
}

TEST_CASE("corpus carries the value-swap and overflow regressions") {
  const auto& set = builtin();
  int swaps = 0;
  for (const auto& p : set.programs) {
    // x = y; y = t; with t a fresh copy of x
    swaps += p.foo_source.find("int t = ") != std::string::npos;
  }
  CHECK(swaps >= 1);
  const auto* wrap = set.find("add_no_wrap");
  REQUIRE(wrap != nullptr);
  CHECK(wrap->category == Category::Universal);
  FuzzInput overflow{{2147483647}, {1}, {}};
  CHECK(minilang::is_failure(minilang::run_foo(*wrap->foo, overflow)));
  CHECK_FALSE(minilang::eval_precondition(*wrap->with_truth, overflow).holds);
}

TEST_CASE("builtin truths validate cleanly") {
  ValidationOptions opts;
  opts.budget = fuzz::FuzzBudget::trials(20000);
  opts.seed = 3;
  auto report = validate_corpus(builtin(), opts);
  CHECK(report.programs_checked == builtin().programs.size());
  for (const auto& f : report.findings) FAIL_CHECK(describe(f));
}

TEST_CASE("wrong truths are reported as findings") {
  auto set = builtin();
  auto& p = set.programs[static_cast<std::size_t>(set.find("sorting_copy") - set.programs.data())];
  BenchmarkSet one{"one", {p}};
  ValidationOptions opts;
  opts.budget = fuzz::FuzzBudget::trials(20000);

  one.programs[0].with_truth = with_precondition(p, motivating_candidate("initial"));
  auto r = validate_corpus(one, opts);
  bool validity = false;
  for (const auto& f : r.findings) validity = validity || f.phase == fuzz::Phase::Validity;
  CHECK(validity);

  one.programs[0].with_truth = with_precondition(p, motivating_candidate("strong"));
  r = validate_corpus(one, opts);
  REQUIRE_FALSE(r.clean());
  for (const auto& f : r.findings) {
    CHECK(f.phase == fuzz::Phase::Weakness);
    CHECK(describe(f).find("weakness") != std::string::npos);
  }
}

TEST_CASE("load errors") {
  SUBCASE("missing manifest") {
    auto dir = scratch_corpus("no-manifest");
    try {
      load_corpus(dir);
      FAIL("expected an error");
    } catch (const CorpusError& e) {
      CHECK(e.kind() == CorpusErrorKind::ManifestMissing);
    }
  }
  SUBCASE("truth with the wrong signature") {
    auto dir = scratch_corpus("bad-signature");
    write(dir / "corpus.json", manifest_for("p"));
    write(dir / "p.mini", "int foo(int[] a, int[] b, int[] c) { return 0; }\n");
    write(dir / "p.truth.mini", "// comment\nbool precondition(int[] a, int[] b) { return true; }\n");
    try {
      load_corpus(dir);
      FAIL("expected an error");
    } catch (const CorpusError& e) {
      CHECK(e.kind() == CorpusErrorKind::BadSignature);
      CHECK(std::string(e.what()).find("p.truth.mini:2:") != std::string::npos);
    }
  }
  SUBCASE("syntax error carries file and line") {
    auto dir = scratch_corpus("syntax");
    write(dir / "corpus.json", manifest_for("p"));
    write(dir / "p.mini", "int foo(int[] a, int[] b, int[] c) {\n  return 0\n}\n");
    write(dir / "p.truth.mini", "bool precondition(int[] a, int[] b, int[] c) { return true; }\n");
    try {
      load_corpus(dir);
      FAIL("expected an error");
    } catch (const CorpusError& e) {
      CHECK(e.kind() == CorpusErrorKind::ParseError);
      CHECK(std::string(e.what()).find("p.mini:3:") != std::string::npos);
    }
  }
  SUBCASE("unknown category and duplicate ids") {
    auto dir = scratch_corpus("manifest");
    write(dir / "p.mini", "int foo(int[] a, int[] b, int[] c) { return 0; }\n");
    write(dir / "p.truth.mini", "bool precondition(int[] a, int[] b, int[] c) { return true; }\n");
    write(dir / "corpus.json", manifest_for("p", "Other"));
    CHECK_THROWS_AS(load_corpus(dir), CorpusError);
    write(dir / "corpus.json",
          R"({"programs":[{"id":"p","category":"Search","file":"p.mini","truth":"p.truth.mini"},)"
          R"({"id":"p","category":"Search","file":"p.mini","truth":"p.truth.mini"}]})");
    try {
      load_corpus(dir);
      FAIL("expected an error");
    } catch (const CorpusError& e) {
      CHECK(e.kind() == CorpusErrorKind::DuplicateId);
    }
  }
  SUBCASE("missing program file") {
    auto dir = scratch_corpus("missing-file");
    write(dir / "corpus.json", manifest_for("p"));
    try {
      load_corpus(dir);
      FAIL("expected an error");
    } catch (const CorpusError& e) {
      CHECK(e.kind() == CorpusErrorKind::FileMissing);
    }
  }
}

TEST_CASE("mutated and weakened truths stay well-formed") {
  for (const auto& p : builtin().programs) {
    CAPTURE(p.id);
    auto dropped = fuzzfeed::testing::drop_conjunct(p.truth_source);
    REQUIRE(dropped);
    CHECK_NOTHROW(with_precondition(p, *dropped));
    CHECK(*dropped != minilang::print_function(*with_precondition(p, p.truth_source)->precondition()));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CHECK_NOTHROW(with_precondition(p, fuzzfeed::testing::mutate_precondition(p.truth_source, seed)));
    }
  }
  CHECK(fuzzfeed::testing::mutate_precondition(fuzzfeed::testing::copy_sort_truth(), 3) ==
        fuzzfeed::testing::mutate_precondition(fuzzfeed::testing::copy_sort_truth(), 3));
}
