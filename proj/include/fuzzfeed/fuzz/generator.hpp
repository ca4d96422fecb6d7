#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fuzzfeed/fuzz_input.hpp"

namespace fuzzfeed::fuzz {

/// SplitMix64; small state so a fresh stream per draw index is cheap.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  /// True with probability p.
  bool chance(double p);

 private:
  std::uint64_t state_;
};

/// Mixes two words into a seed; used to derive per-draw and per-phase streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

enum class LengthDistribution {
  Uniform,        // every length in [0, max_len] equally likely
  Geometric,      // failures-before-success with the configured mean, capped at max_len
  DomainUniform,  // P(len) proportional to |dictionary|^len: uniform over the finite domain
};

enum class ValueMode {
  FullRange,   // uniform over all 32-bit values
  SmallRange,  // uniform over [-8, 8]
  Dictionary,  // uniform over the dictionary
  Mixed,       // full-range 5/8, small-range 3/8 of non-dictionary draws
};

std::string_view to_string(LengthDistribution d);
std::string_view to_string(ValueMode m);

inline constexpr std::int32_t kSmallRangeBound = 8;

struct GeneratorConfig {
  std::size_t max_len = 16;
  LengthDistribution length_distribution = LengthDistribution::Geometric;
  double mean_length = 4.0;
  ValueMode value_mode = ValueMode::Mixed;
  std::vector<std::int32_t> dictionary = {0, 1, -1, 2, -2, std::numeric_limits<std::int32_t>::min(),
                                          std::numeric_limits<std::int32_t>::max(), 100};
  /// Probability that an element is drawn from the dictionary regardless of mode.
  double dictionary_bias = 0.2;
  /// Probability that a draw is shaped (equal lengths and/or sorted arrays).
  double structure_bias = 0.3;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;

  static GeneratorConfig defaults(std::uint64_t seed);
  /// Defaults without shaped draws, closest to a plain random generator.
  static GeneratorConfig unshaped(std::uint64_t seed);
  /// Uniform over every (a, b, c) with lengths <= max_len and elements in `values`.
  static GeneratorConfig finite_domain(std::uint64_t seed, std::size_t max_len,
                                       std::vector<std::int32_t> values);
  /// finite_domain(seed, 2, {-1, 0, 1})
  static GeneratorConfig tiny_domain(std::uint64_t seed);
};

void to_json(nlohmann::json& j, const GeneratorConfig& config);
void from_json(const nlohmann::json& j, GeneratorConfig& config);

/// Draw `index` of the stream named by config.seed. Pure in (config, index).
FuzzInput generate(const GeneratorConfig& config, std::uint64_t index);

}  // namespace fuzzfeed::fuzz
