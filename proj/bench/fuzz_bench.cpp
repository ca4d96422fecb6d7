#include <benchmark/benchmark.h>

#include "fuzzfeed/corpus/corpus.hpp"
#include "fuzzfeed/eval/eval.hpp"
#include "fuzzfeed/fuzz/fuzz.hpp"

using namespace fuzzfeed;

namespace {

const corpus::BenchmarkSet& builtin() {
  static const corpus::BenchmarkSet set = corpus::load_corpus(FUZZFEED_SOURCE_DIR "/corpus/builtin");
  return set;
}

// no counterexamples: each run uses its full budget
const minilang::Program& sorting_truth() { return *builtin().find("sorting_copy")->with_truth; }

fuzz::FuzzOptions options(unsigned threads) {
  fuzz::FuzzOptions o;
  o.budget = fuzz::FuzzBudget::trials(20'000);
  o.generator = fuzz::GeneratorConfig::defaults(1);
  o.shrink = false;
  o.threads = threads;
  return o;
}

void BM_ValiditySerial(benchmark::State& state) {
  auto o = options(1);
  for (auto _ : state) benchmark::DoNotOptimize(fuzz::run_phase_serial(sorting_truth(), fuzz::Phase::Validity, o));
  state.SetItemsProcessed(state.iterations() * 20'000);
}

void BM_ValidityParallel(benchmark::State& state) {
  auto o = options(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fuzz::run_phase_parallel(sorting_truth(), fuzz::Phase::Validity, o));
  state.SetItemsProcessed(state.iterations() * 20'000);
}

void BM_WeaknessSerial(benchmark::State& state) {
  auto o = options(1);
  for (auto _ : state) benchmark::DoNotOptimize(fuzz::run_phase_serial(sorting_truth(), fuzz::Phase::Weakness, o));
  state.SetItemsProcessed(state.iterations() * 20'000);
}

void BM_WeaknessParallel(benchmark::State& state) {
  auto o = options(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fuzz::run_phase_parallel(sorting_truth(), fuzz::Phase::Weakness, o));
  state.SetItemsProcessed(state.iterations() * 20'000);
}

// threads == 1 is the serial loop
void BM_Exhaustive(benchmark::State& state) {
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuzz::exhaustive_check(sorting_truth(), 3, fuzz::kTinyDomainValues,
                                                    fuzz::Phase::Validity, minilang::kDefaultStepLimit, threads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(fuzz::domain_size(3, 3)));
}

void BM_Equivalence(benchmark::State& state) {
  eval::EquivalenceOptions o;
  o.budget = fuzz::FuzzBudget::trials(20'000);
  o.threads = static_cast<unsigned>(state.range(0));
  const auto& sc = *builtin().find("sorting_copy");
  for (auto _ : state) benchmark::DoNotOptimize(eval::check_equivalence(*sc.with_truth, sc, o));
}

}  // namespace

BENCHMARK(BM_ValiditySerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ValidityParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WeaknessSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WeaknessParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Exhaustive)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Equivalence)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
