#include <cstdlib>

#include "fuzzfeed/fuzz/fuzz.hpp"

namespace fuzzfeed::fuzz {

std::pair<std::uint64_t, std::uint64_t> input_size(const FuzzInput& input) {
  std::uint64_t magnitude = 0;
  for (const auto* xs : {&input.a, &input.b, &input.c}) {
    for (std::int32_t x : *xs) magnitude += static_cast<std::uint64_t>(std::llabs(static_cast<long long>(x)));
  }
  return {input.total_length(), magnitude};
}

FuzzInput shrink(const Program& program, FuzzInput witness, Phase phase, std::uint64_t step_limit) {
  if (!is_counterexample(program, witness, phase, step_limit)) return witness;
  auto still = [&](const FuzzInput& in) { return is_counterexample(program, in, phase, step_limit); };

  bool progress = true;
  while (progress) {
    progress = false;
    for (auto member : {&FuzzInput::a, &FuzzInput::b, &FuzzInput::c}) {
      for (std::size_t i = 0; i < (witness.*member).size();) {
        FuzzInput next = witness;
        auto& xs = next.*member;
        xs.erase(xs.begin() + static_cast<std::ptrdiff_t>(i));
        if (still(next)) {
          witness = std::move(next);
          progress = true;
        } else {
          ++i;
        }
      }
    }
    for (auto member : {&FuzzInput::a, &FuzzInput::b, &FuzzInput::c}) {
      for (std::size_t i = 0; i < (witness.*member).size(); ++i) {
        for (;;) {
          std::int32_t v = (witness.*member)[i];
          if (v == 0) break;
          FuzzInput next = witness;
          (next.*member)[i] = 0;
          if (still(next)) {
            witness = std::move(next);
            progress = true;
            break;
          }
          std::int32_t half = v / 2;
          if (half == v) break;
          (next.*member)[i] = half;
          if (!still(next)) break;
          witness = std::move(next);
          progress = true;
        }
      }
    }
  }
  return witness;
}

}  // namespace fuzzfeed::fuzz
