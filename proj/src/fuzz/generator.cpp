#include "fuzzfeed/fuzz/generator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fuzzfeed::fuzz {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
}

bool SplitMix64::chance(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53 < p;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 salt_stream(salt);
  SplitMix64 mixed(seed ^ salt_stream());
  return mixed();
}

std::string_view to_string(LengthDistribution d) {
  switch (d) {
    case LengthDistribution::Uniform: return "uniform";
    case LengthDistribution::Geometric: return "geometric";
    case LengthDistribution::DomainUniform: return "domain-uniform";
  }
  return "?";
}

std::string_view to_string(ValueMode m) {
  switch (m) {
    case ValueMode::FullRange: return "full-range";
    case ValueMode::SmallRange: return "small-range";
    case ValueMode::Dictionary: return "dictionary";
    case ValueMode::Mixed: return "mixed";
  }
  return "?";
}

namespace {

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

// n^len for len in [0, max_len], or 0 on overflow past 2^62.
std::vector<std::uint64_t> length_weights(std::size_t n, std::size_t max_len) {
  std::vector<std::uint64_t> w;
  std::uint64_t cur = 1;
  for (std::size_t len = 0; len <= max_len; ++len) {
    w.push_back(cur);
    if (len < max_len) {
      if (n != 0 && cur > (std::uint64_t{1} << 62) / n) return {};
      cur *= n;
    }
  }
  return w;
}

class Drawer {
 public:
  Drawer(const GeneratorConfig& config, std::uint64_t index)
      : cfg_(config), rng_(mix_seed(config.seed, index)) {}

  FuzzInput draw() {
    bool shaped = cfg_.structure_bias > 0.0 && rng_.chance(cfg_.structure_bias);
    bool equal_lengths = false;
    bool sorted = false;
    if (shaped) {
      switch (rng_.below(3)) {
        case 0: equal_lengths = true; break;
        case 1: sorted = true; break;
        default:
          equal_lengths = true;
          sorted = true;
      }
    }
    FuzzInput in;
    std::size_t la = length();
    std::size_t lb = equal_lengths ? la : length();
    std::size_t lc = equal_lengths ? la : length();
    fill(in.a, la);
    fill(in.b, lb);
    fill(in.c, lc);
    if (sorted) {
      std::sort(in.a.begin(), in.a.end());
      std::sort(in.b.begin(), in.b.end());
      std::sort(in.c.begin(), in.c.end());
    }
    return in;
  }

 private:
  std::size_t length() {
    switch (cfg_.length_distribution) {
      case LengthDistribution::Uniform: return static_cast<std::size_t>(rng_.below(cfg_.max_len + 1));
      case LengthDistribution::Geometric: {
        double p = 1.0 / (cfg_.mean_length + 1.0);
        std::size_t n = 0;
        while (n < cfg_.max_len && !rng_.chance(p)) ++n;
        return n;
      }
      case LengthDistribution::DomainUniform: {
        auto w = length_weights(cfg_.dictionary.size(), cfg_.max_len);
        std::uint64_t total = 0;
        for (auto x : w) total += x;
        std::uint64_t r = rng_.below(total);
        for (std::size_t len = 0; len < w.size(); ++len) {
          if (r < w[len]) return len;
          r -= w[len];
        }
        return cfg_.max_len;
      }
    }
    return 0;
  }

  std::int32_t from_dictionary() {
    return cfg_.dictionary[static_cast<std::size_t>(rng_.below(cfg_.dictionary.size()))];
  }
  std::int32_t full_range() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(rng_() >> 32)); }
  std::int32_t small_range() {
    return static_cast<std::int32_t>(rng_.below(2 * kSmallRangeBound + 1)) - kSmallRangeBound;
  }

  std::int32_t value() {
    if (!cfg_.dictionary.empty() && cfg_.value_mode != ValueMode::Dictionary &&
        rng_.chance(cfg_.dictionary_bias)) {
      return from_dictionary();
    }
    switch (cfg_.value_mode) {
      case ValueMode::FullRange: return full_range();
      case ValueMode::SmallRange: return small_range();
      case ValueMode::Dictionary: return from_dictionary();
      case ValueMode::Mixed: return rng_.chance(0.625) ? full_range() : small_range();
    }
    return 0;
  }

  void fill(std::vector<std::int32_t>& xs, std::size_t len) {
    xs.resize(len);
    for (auto& x : xs) x = value();
  }

  const GeneratorConfig& cfg_;
  SplitMix64 rng_;
};

}  // namespace

void GeneratorConfig::validate() const {
  if (!probability(dictionary_bias)) throw std::invalid_argument("dictionary_bias must be in [0,1]");
  if (!probability(structure_bias)) throw std::invalid_argument("structure_bias must be in [0,1]");
  if (!(mean_length >= 0.0)) throw std::invalid_argument("mean_length must be non-negative");
  if (value_mode == ValueMode::Dictionary && dictionary.empty()) {
    throw std::invalid_argument("dictionary mode requires a non-empty dictionary");
  }
  if (length_distribution == LengthDistribution::DomainUniform) {
    if (value_mode != ValueMode::Dictionary) {
      throw std::invalid_argument("domain-uniform lengths require dictionary values");
    }
    if (length_weights(dictionary.size(), max_len).empty()) {
      throw std::invalid_argument("domain too large for domain-uniform lengths");
    }
  }
}

GeneratorConfig GeneratorConfig::defaults(std::uint64_t seed) {
  GeneratorConfig c;
  c.seed = seed;
  return c;
}

GeneratorConfig GeneratorConfig::unshaped(std::uint64_t seed) {
  GeneratorConfig c = defaults(seed);
  c.structure_bias = 0.0;
  return c;
}

GeneratorConfig GeneratorConfig::finite_domain(std::uint64_t seed, std::size_t max_len,
                                               std::vector<std::int32_t> values) {
  GeneratorConfig c;
  c.seed = seed;
  c.max_len = max_len;
  c.length_distribution = LengthDistribution::DomainUniform;
  c.value_mode = ValueMode::Dictionary;
  c.dictionary = std::move(values);
  c.dictionary_bias = 0.0;
  c.structure_bias = 0.0;
  return c;
}

GeneratorConfig GeneratorConfig::tiny_domain(std::uint64_t seed) {
  return finite_domain(seed, 2, {-1, 0, 1});
}

FuzzInput generate(const GeneratorConfig& config, std::uint64_t index) {
  return Drawer(config, index).draw();
}

namespace {

template <typename Enum>
Enum enum_from(const std::string& s, std::initializer_list<Enum> all) {
  for (Enum e : all) {
    if (to_string(e) == s) return e;
  }
  throw std::invalid_argument("unknown generator setting '" + s + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const GeneratorConfig& c) {
  j = nlohmann::json{{"max_len", c.max_len},
                     {"length_distribution", to_string(c.length_distribution)},
                     {"mean_length", c.mean_length},
                     {"value_mode", to_string(c.value_mode)},
                     {"dictionary", c.dictionary},
                     {"dictionary_bias", c.dictionary_bias},
                     {"structure_bias", c.structure_bias},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, GeneratorConfig& c) {
  c.max_len = j.at("max_len").get<std::size_t>();
  c.length_distribution = enum_from(j.at("length_distribution").get<std::string>(),
                                    {LengthDistribution::Uniform, LengthDistribution::Geometric,
                                     LengthDistribution::DomainUniform});
  c.mean_length = j.at("mean_length").get<double>();
  c.value_mode = enum_from(j.at("value_mode").get<std::string>(),
                           {ValueMode::FullRange, ValueMode::SmallRange, ValueMode::Dictionary, ValueMode::Mixed});
  c.dictionary = j.at("dictionary").get<std::vector<std::int32_t>>();
  c.dictionary_bias = j.at("dictionary_bias").get<double>();
  c.structure_bias = j.at("structure_bias").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
}

}  // namespace fuzzfeed::fuzz
