#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace fuzzfeed {

/// One concrete initial state for `foo(int[] a, int[] b, int[] c)`.
struct FuzzInput {
  std::vector<std::int32_t> a;
  std::vector<std::int32_t> b;
  std::vector<std::int32_t> c;

  friend bool operator==(const FuzzInput&, const FuzzInput&) = default;

  std::size_t total_length() const { return a.size() + b.size() + c.size(); }
};

/// Compact form used in repair prompts and trace files: {"a":[...],"b":[...],"c":[...]}
std::string to_json_string(const FuzzInput& input);
FuzzInput fuzz_input_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const FuzzInput& input);
void from_json(const nlohmann::json& j, FuzzInput& input);

}  // namespace fuzzfeed
