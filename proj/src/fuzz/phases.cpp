#include <algorithm>
#include <atomic>
#include <chrono>
#include <vector>

#include "fuzzfeed/fuzz/fuzz.hpp"

namespace fuzzfeed::fuzz {

using minilang::PreconditionFault;
using Clock = std::chrono::steady_clock;

std::string_view to_string(Phase phase) { return phase == Phase::Validity ? "validity" : "weakness"; }

void FuzzBudget::validate() const {
  if (!wall_clock_seconds && !trial_limit) {
    throw std::invalid_argument("fuzz budget needs a wall-clock limit, a trial limit, or both");
  }
  if (wall_clock_seconds && !(*wall_clock_seconds > 0.0)) {
    throw std::invalid_argument("wall-clock limit must be positive");
  }
  if (trial_limit && *trial_limit == 0) throw std::invalid_argument("trial limit must be positive");
}

void to_json(nlohmann::json& j, const FuzzBudget& b) {
  j = nlohmann::json::object();
  j["wall_clock_seconds"] = b.wall_clock_seconds ? nlohmann::json(*b.wall_clock_seconds) : nlohmann::json();
  j["trial_limit"] = b.trial_limit ? nlohmann::json(*b.trial_limit) : nlohmann::json();
}

void from_json(const nlohmann::json& j, FuzzBudget& b) {
  const auto& w = j.at("wall_clock_seconds");
  const auto& t = j.at("trial_limit");
  b.wall_clock_seconds = w.is_null() ? std::nullopt : std::optional<double>(w.get<double>());
  b.trial_limit = t.is_null() ? std::nullopt : std::optional<std::uint64_t>(t.get<std::uint64_t>());
}

void to_json(nlohmann::json& j, const PhaseStats& s) {
  j = nlohmann::json{{"trials", s.trials},
                     {"precondition_true", s.precondition_true},
                     {"precondition_false", s.precondition_false},
                     {"precondition_faults", s.precondition_faults},
                     {"precondition_step_limits", s.precondition_step_limits},
                     {"foo_step_limits", s.foo_step_limits},
                     {"foo_runs", s.foo_runs}};
}

void from_json(const nlohmann::json& j, PhaseStats& s) {
  s.trials = j.at("trials").get<std::uint64_t>();
  s.precondition_true = j.at("precondition_true").get<std::uint64_t>();
  s.precondition_false = j.at("precondition_false").get<std::uint64_t>();
  s.precondition_faults = j.at("precondition_faults").get<std::uint64_t>();
  s.precondition_step_limits = j.at("precondition_step_limits").get<std::uint64_t>();
  s.foo_step_limits = j.at("foo_step_limits").get<std::uint64_t>();
  s.foo_runs = j.at("foo_runs").get<std::uint64_t>();
}

namespace {

void add(PhaseStats& into, const PhaseStats& d) {
  into.trials += d.trials;
  into.precondition_true += d.precondition_true;
  into.precondition_false += d.precondition_false;
  into.precondition_faults += d.precondition_faults;
  into.precondition_step_limits += d.precondition_step_limits;
  into.foo_step_limits += d.foo_step_limits;
  into.foo_runs += d.foo_runs;
}

void require_precondition(const Program& program) {
  if (program.precondition() == nullptr) {
    throw minilang::MinilangError(minilang::ErrorKind::MissingPrecondition, {},
                                  "program does not define 'precondition'");
  }
}

void prepare(const Program& program, const FuzzOptions& options) {
  options.budget.validate();
  options.generator.validate();
  require_precondition(program);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void finish(FuzzVerdict& v, const Program& program, Phase phase, const FuzzOptions& options,
            Clock::time_point t0) {
  v.trials_run = v.stats.trials;
  if (v.counterexample) {
    v.witness = options.shrink ? shrink(program, v.original_witness, phase, options.step_limit)
                               : v.original_witness;
  }
  v.elapsed_seconds = seconds_since(t0);
}

void fetch_min(std::atomic<std::uint64_t>& target, std::uint64_t value) {
  std::uint64_t cur = target.load(std::memory_order_relaxed);
  while (value < cur && !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
  }
}

}  // namespace

TrialClass classify(const Program& program, const FuzzInput& input, Phase phase, std::uint64_t step_limit,
                    PhaseStats* stats) {
  PhaseStats local;
  PhaseStats& s = stats != nullptr ? *stats : local;
  ++s.trials;
  auto pre = minilang::eval_precondition(program, input, step_limit);
  if (pre.fault == PreconditionFault::StepLimitInPrecondition) {
    ++s.precondition_step_limits;
    return TrialClass::Inconclusive;
  }
  if (pre.fault) ++s.precondition_faults;
  if (pre.holds) {
    ++s.precondition_true;
  } else {
    ++s.precondition_false;
  }
  if (pre.holds != (phase == Phase::Validity)) return TrialClass::Pass;

  ++s.foo_runs;
  auto out = minilang::run_foo(program, input, step_limit);
  if (minilang::is_step_limit(out)) {
    ++s.foo_step_limits;
    return TrialClass::Inconclusive;
  }
  bool hit = phase == Phase::Validity ? minilang::is_failure(out) : minilang::is_success_zero(out);
  return hit ? TrialClass::Counterexample : TrialClass::Pass;
}

bool is_counterexample(const Program& program, const FuzzInput& input, Phase phase, std::uint64_t step_limit) {
  return classify(program, input, phase, step_limit) == TrialClass::Counterexample;
}

FuzzVerdict run_phase_serial(const Program& program, Phase phase, const FuzzOptions& options) {
  prepare(program, options);
  auto t0 = Clock::now();
  const auto& budget = options.budget;
  FuzzVerdict v;
  for (std::uint64_t i = 0;; ++i) {
    if (budget.trial_limit && i >= *budget.trial_limit) break;
    if (budget.wall_clock_seconds && seconds_since(t0) >= *budget.wall_clock_seconds) break;
    FuzzInput input = generate(options.generator, i);
    if (classify(program, input, phase, options.step_limit, &v.stats) == TrialClass::Counterexample) {
      v.counterexample = true;
      v.original_witness = std::move(input);
      v.witness_index = i;
      break;
    }
  }
  finish(v, program, phase, options, t0);
  return v;
}

FuzzVerdict run_phase_parallel(const Program& program, Phase phase, const FuzzOptions& options) {
  prepare(program, options);
  auto t0 = Clock::now();
  const auto& budget = options.budget;
  const int threads = static_cast<int>(std::max(1u, options.threads));
  const std::uint64_t batch = static_cast<std::uint64_t>(threads) * 256;
  const double wall = budget.wall_clock_seconds.value_or(0.0);
  const bool timed = budget.wall_clock_seconds.has_value();

  struct Record {
    TrialClass cls = TrialClass::NotRun;
    PhaseStats stats;
  };
  std::vector<Record> records;
  FuzzVerdict v;
  bool stop = false;

  for (std::uint64_t base = 0; !stop; base += batch) {
    std::uint64_t end = base + batch;
    if (budget.trial_limit) {
      if (base >= *budget.trial_limit) break;
      end = std::min(end, *budget.trial_limit);
    }
    if (timed && seconds_since(t0) >= wall) break;

    const auto n = static_cast<std::int64_t>(end - base);
    records.assign(static_cast<std::size_t>(n), Record{});
    std::atomic<std::uint64_t> first_hit{end};
    std::atomic<bool> expired{false};

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::int64_t k = 0; k < n; ++k) {
      const std::uint64_t i = base + static_cast<std::uint64_t>(k);
      if (i > first_hit.load(std::memory_order_relaxed)) continue;
      if (timed && (expired.load(std::memory_order_relaxed) || seconds_since(t0) >= wall)) {
        expired.store(true, std::memory_order_relaxed);
        continue;
      }
      auto& r = records[static_cast<std::size_t>(k)];
      r.cls = classify(program, generate(options.generator, i), phase, options.step_limit, &r.stats);
      if (r.cls == TrialClass::Counterexample) fetch_min(first_hit, i);
    }

    // Fold in index order; the first unrun trial marks the deadline.
    for (std::int64_t k = 0; k < n; ++k) {
      const auto& r = records[static_cast<std::size_t>(k)];
      if (r.cls == TrialClass::NotRun) {
        stop = true;
        break;
      }
      add(v.stats, r.stats);
      if (r.cls == TrialClass::Counterexample) {
        v.counterexample = true;
        v.witness_index = base + static_cast<std::uint64_t>(k);
        v.original_witness = generate(options.generator, v.witness_index);
        stop = true;
        break;
      }
    }
  }
  finish(v, program, phase, options, t0);
  return v;
}

FuzzVerdict run_phase(const Program& program, Phase phase, const FuzzOptions& options) {
  return options.threads <= 1 ? run_phase_serial(program, phase, options)
                              : run_phase_parallel(program, phase, options);
}

}  // namespace fuzzfeed::fuzz
