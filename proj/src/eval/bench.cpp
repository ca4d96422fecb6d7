#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "fuzzfeed/eval/eval.hpp"

namespace fuzzfeed::eval {

bool operator==(const DetailRow& x, const DetailRow& y) {
  return x.configuration == y.configuration && x.benchmark == y.benchmark && x.iteration == y.iteration &&
         x.program_id == y.program_id && x.outcome == y.outcome && x.fg_used == y.fg_used &&
         x.correct == y.correct && x.cycles == y.cycles && x.llm_calls == y.llm_calls;
}

std::int64_t centi_ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw std::invalid_argument("ratio with zero denominator");
  return static_cast<std::int64_t>((200 * num + den) / (2 * den));
}

std::string format_avg(std::int64_t centi) {
  auto whole = centi / 100;
  auto frac = centi % 100;
  if (frac == 0) return fmt::format("{}", whole);
  if (frac % 10 == 0) return fmt::format("{}.{}", whole, frac / 10);
  return fmt::format("{}.{:02}", whole, frac);
}

std::string format_pct(std::int64_t centi) { return fmt::format("{}.{:02}", centi / 100, centi % 100); }

namespace {

int category_rank(const std::string& name) {
  for (int i = 0; i < 4; ++i) {
    if (corpus::to_string(corpus::kCategories[i]) == name) return i;
  }
  return 4;
}

Stat stat_of(const std::vector<std::uint64_t>& per_iteration) {
  Stat s;
  s.min = *std::min_element(per_iteration.begin(), per_iteration.end());
  s.max = *std::max_element(per_iteration.begin(), per_iteration.end());
  std::uint64_t sum = 0;
  for (auto v : per_iteration) sum += v;
  s.avg_centi = centi_ratio(sum, per_iteration.size());
  return s;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<DetailRow>& details, unsigned iterations,
                                  const std::vector<std::pair<std::string, std::uint64_t>>& n_programs) {
  if (iterations == 0) throw ReportError(ReportError::Kind::EmptyReport, "report has no iterations");
  struct Acc {
    std::vector<std::uint64_t> correct, usage, success;
    std::set<std::string> ids;
  };
  auto key_less = [](const std::pair<std::string, std::string>& x, const std::pair<std::string, std::string>& y) {
    if (x.first != y.first) return x.first < y.first;
    int rx = category_rank(x.second), ry = category_rank(y.second);
    return rx != ry ? rx < ry : x.second < y.second;
  };
  std::map<std::pair<std::string, std::string>, Acc, decltype(key_less)> groups(key_less);
  for (const auto& r : details) {
    if (r.iteration < 1 || r.iteration > iterations) {
      throw ReportError(ReportError::Kind::Parse, fmt::format("row for {} has iteration {} outside 1..{}",
                                                              r.program_id, r.iteration, iterations));
    }
    auto& a = groups[{r.configuration, r.benchmark}];
    if (a.correct.empty()) {
      a.correct.assign(iterations, 0);
      a.usage.assign(iterations, 0);
      a.success.assign(iterations, 0);
    }
    a.ids.insert(r.program_id);
    a.correct[r.iteration - 1] += r.correct;
    a.usage[r.iteration - 1] += r.fg_used;
    a.success[r.iteration - 1] += r.fg_success();
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, a] : groups) {
    SummaryRow s;
    s.configuration = key.first;
    s.benchmark = key.second;
    s.n_programs = a.ids.size();
    for (const auto& [name, n] : n_programs) {
      if (name == key.second) s.n_programs = n;
    }
    s.correct = stat_of(a.correct);
    std::uint64_t sum = 0;
    for (auto v : a.correct) sum += v;
    s.correct_pct_centi = centi_ratio(100 * sum, std::uint64_t{iterations} * s.n_programs);
    s.fg_usage = stat_of(a.usage);
    s.fg_success = stat_of(a.success);
    out.push_back(std::move(s));
  }
  return out;
}

BenchmarkReport run_benchmark(const corpus::BenchmarkSet& set, llm::ChatProvider& provider, const BenchConfig& config,
                              BenchObserver* observer) {
  if (config.k < 1) throw std::invalid_argument("k must be at least 1");
  if (config.workers < 1) throw std::invalid_argument("workers must be at least 1");
  config.fg.validate();

  BenchmarkReport report;
  report.iterations = config.k;
  std::mutex observer_mu;

  for (unsigned it = 1; it <= config.k; ++it) {
    std::vector<DetailRow> rows(set.programs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto work = [&] {
      for (std::size_t p = next++; p < set.programs.size(); p = next++) {
        try {
          const auto& prog = set.programs[p];
          fg::FgConfig c = config.fg;
          c.generator.seed = fuzz::mix_seed(fuzz::mix_seed(config.seed, it), p);
          const auto start = std::chrono::steady_clock::now();
          auto out = fg::generate_wp(*prog.foo, prog.id, provider, c);

          DetailRow& r = rows[p];
          r.configuration = config.label;
          r.benchmark = std::string(corpus::to_string(prog.category));
          r.iteration = it;
          r.program_id = prog.id;
          r.outcome = out.kind;
          r.fg_used = out.trace.fg_used();
          r.cycles = out.trace.cycles_used();
          r.llm_calls = out.trace.llm_calls();
          if (out.kind != fg::Outcome::Malformed && out.candidate) {
            auto eq = config.equivalence;
            eq.generator.seed = fuzz::mix_seed(c.generator.seed, 0x6a75646765ULL);
            r.correct = check_equivalence(*out.candidate->program, prog, eq).equivalent;
          }
          r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          if (observer != nullptr) {
            std::lock_guard lock(observer_mu);
            observer->finished(r, out);
          }
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
          next = set.programs.size();
        }
      }
    };

    if (config.workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < std::min<std::size_t>(config.workers, set.programs.size()); ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (auto& r : rows) report.details.push_back(std::move(r));
  }

  std::stable_sort(report.details.begin(), report.details.end(), [](const DetailRow& x, const DetailRow& y) {
    if (x.configuration != y.configuration) return x.configuration < y.configuration;
    if (x.iteration != y.iteration) return x.iteration < y.iteration;
    return x.program_id < y.program_id;
  });

  std::vector<std::pair<std::string, std::uint64_t>> sizes;
  for (auto c : corpus::kCategories) {
    if (set.count(c) > 0) sizes.emplace_back(std::string(corpus::to_string(c)), set.count(c));
  }
  report.summary = summarize(report.details, report.iterations, sizes);
  return report;
}

}  // namespace fuzzfeed::eval
