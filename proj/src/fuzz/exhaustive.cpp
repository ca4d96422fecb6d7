#include <atomic>
#include <limits>
#include <string>

#include "fuzzfeed/fuzz/fuzz.hpp"

namespace fuzzfeed::fuzz {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t x, std::uint64_t y) {
  if (x != 0 && y > kSaturated / x) return kSaturated;
  return x * y;
}

std::uint64_t sat_add(std::uint64_t x, std::uint64_t y) { return y > kSaturated - x ? kSaturated : x + y; }

// Number of arrays with length <= max_len over n values.
std::uint64_t arrays_count(std::size_t max_len, std::size_t n) {
  std::uint64_t total = 0;
  std::uint64_t pow = 1;
  for (std::size_t len = 0; len <= max_len; ++len) {
    total = sat_add(total, pow);
    pow = sat_mul(pow, n);
  }
  return total;
}

// Shorter arrays first; within a length, lexicographic in `values` order.
std::vector<std::int32_t> decode_array(std::uint64_t k, std::size_t max_len, std::span<const std::int32_t> values) {
  const std::uint64_t n = values.size();
  std::uint64_t pow = 1;
  std::size_t len = 0;
  while (len < max_len && k >= pow) {
    k -= pow;
    pow *= n;
    ++len;
  }
  std::vector<std::int32_t> xs(len);
  for (std::size_t i = len; i-- > 0;) {
    xs[i] = values[static_cast<std::size_t>(k % n)];
    k /= n;
  }
  return xs;
}

}  // namespace

std::uint64_t domain_size(std::size_t max_len, std::size_t value_count) {
  std::uint64_t per = arrays_count(max_len, value_count);
  return sat_mul(sat_mul(per, per), per);
}

FuzzInput domain_point(std::uint64_t index, std::size_t max_len, std::span<const std::int32_t> values) {
  const std::uint64_t per = arrays_count(max_len, values.size());
  FuzzInput in;
  in.c = decode_array(index % per, max_len, values);
  index /= per;
  in.b = decode_array(index % per, max_len, values);
  index /= per;
  in.a = decode_array(index, max_len, values);
  return in;
}

ExhaustiveVerdict exhaustive_check(const Program& program, std::size_t max_len, std::span<const std::int32_t> values,
                                   Phase phase, std::uint64_t step_limit, unsigned threads) {
  if (values.empty()) throw std::invalid_argument("exhaustive domain needs at least one value");
  const std::uint64_t total = domain_size(max_len, values.size());
  if (total > kMaxExhaustiveInputs) {
    throw DomainTooLarge("domain has " + (total == kSaturated ? std::string("too many") : std::to_string(total)) +
                         " inputs; the limit is " + std::to_string(kMaxExhaustiveInputs));
  }
  if (program.precondition() == nullptr) {
    throw minilang::MinilangError(minilang::ErrorKind::MissingPrecondition, {},
                                  "program does not define 'precondition'");
  }

  ExhaustiveVerdict v;
  std::uint64_t hit = total;
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < total; ++i) {
      if (is_counterexample(program, domain_point(i, max_len, values), phase, step_limit)) {
        hit = i;
        break;
      }
    }
  } else {
    std::atomic<std::uint64_t> first{total};
    const auto n = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(dynamic, 64) num_threads(static_cast<int>(threads))
    for (std::int64_t k = 0; k < n; ++k) {
      const auto i = static_cast<std::uint64_t>(k);
      if (i > first.load(std::memory_order_relaxed)) continue;
      if (is_counterexample(program, domain_point(i, max_len, values), phase, step_limit)) {
        std::uint64_t cur = first.load(std::memory_order_relaxed);
        while (i < cur && !first.compare_exchange_weak(cur, i, std::memory_order_relaxed)) {
        }
      }
    }
    hit = first.load();
  }
  if (hit < total) {
    v.counterexample = true;
    v.witness = domain_point(hit, max_len, values);
    v.inputs_checked = hit + 1;
  } else {
    v.inputs_checked = total;
  }
  return v;
}

}  // namespace fuzzfeed::fuzz
