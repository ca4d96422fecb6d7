#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>

#include "fuzzfeed/eval/eval.hpp"

namespace fuzzfeed::eval {

std::string_view to_string(SaidTrue s) { return s == SaidTrue::Truth ? "truth" : "candidate"; }

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

struct Search {
  std::uint64_t examined = 0;
  std::uint64_t hit = kNone;
};

// Lowest index in [0, limit) where differs(input(i)) holds, stopping at the deadline.
template <typename Input, typename Differs>
Search first_difference(std::uint64_t limit, std::optional<Clock::time_point> deadline, unsigned threads,
                        Input input, Differs differs) {
  Search s;
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < limit; ++i) {
      if (deadline && (i & 63) == 0 && Clock::now() >= *deadline) break;
      ++s.examined;
      if (differs(input(i))) {
        s.hit = i;
        break;
      }
    }
    return s;
  }
  const std::uint64_t batch = static_cast<std::uint64_t>(threads) * 256;
  for (std::uint64_t start = 0; start < limit; start += batch) {
    if (deadline && Clock::now() >= *deadline) break;
    const std::uint64_t end = std::min(limit, start + batch);
    std::atomic<std::uint64_t> best{kNone};
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::int64_t j = static_cast<std::int64_t>(start); j < static_cast<std::int64_t>(end); ++j) {
      const auto i = static_cast<std::uint64_t>(j);
      if (i > best.load(std::memory_order_relaxed)) continue;
      if (differs(input(i))) {
        auto cur = best.load();
        while (i < cur && !best.compare_exchange_weak(cur, i)) {
        }
      }
    }
    if (best.load() != kNone) {
      s.hit = best.load();
      s.examined = s.hit + 1;
      return s;
    }
    s.examined = end;
  }
  return s;
}

}  // namespace

EquivalenceVerdict check_equivalence(const minilang::Program& candidate, const minilang::Program& truth,
                                     const EquivalenceOptions& options) {
  options.budget.validate();
  const auto step_limit = options.step_limit;
  auto differs = [&](const FuzzInput& in) {
    return minilang::eval_precondition(candidate, in, step_limit).holds !=
           minilang::eval_precondition(truth, in, step_limit).holds;
  };
  auto found = [&](const FuzzInput& w, EquivalenceVerdict& v) {
    v.equivalent = false;
    v.witness = w;
    v.said_true = minilang::eval_precondition(truth, w, step_limit).holds ? SaidTrue::Truth : SaidTrue::Candidate;
  };

  EquivalenceVerdict v;
  if (options.exhaustive) {
    const auto n = fuzz::domain_size(fuzz::kTinyDomainMaxLen, std::size(fuzz::kTinyDomainValues));
    auto point = [](std::uint64_t i) {
      return fuzz::domain_point(i, fuzz::kTinyDomainMaxLen, fuzz::kTinyDomainValues);
    };
    auto s = first_difference(n, std::nullopt, options.threads, point, differs);
    v.exhaustive_inputs = s.examined;
    if (s.hit != kNone) {
      found(point(s.hit), v);
      return v;
    }
  }

  std::optional<Clock::time_point> deadline;
  if (options.budget.wall_clock_seconds) {
    deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                  std::chrono::duration<double>(*options.budget.wall_clock_seconds));
  }
  const std::uint64_t limit = options.budget.trial_limit.value_or(kNone - 1);
  auto draw = [&](std::uint64_t i) { return fuzz::generate(options.generator, i); };
  auto s = first_difference(limit, deadline, options.threads, draw, differs);
  v.trials = s.examined;
  if (s.hit != kNone) found(draw(s.hit), v);
  return v;
}

EquivalenceVerdict check_equivalence(const minilang::Program& candidate, const corpus::BenchmarkProgram& truth,
                                     const EquivalenceOptions& options) {
  return check_equivalence(candidate, *truth.with_truth, options);
}

}  // namespace fuzzfeed::eval
