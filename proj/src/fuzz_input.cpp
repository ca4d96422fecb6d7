#include "fuzzfeed/fuzz_input.hpp"

#include <stdexcept>

namespace fuzzfeed {

void to_json(nlohmann::json& j, const FuzzInput& input) {
  j = nlohmann::json{{"a", input.a}, {"b", input.b}, {"c", input.c}};
}

void from_json(const nlohmann::json& j, FuzzInput& input) {
  if (!j.is_object()) throw std::invalid_argument("witness must be a JSON object");
  input.a = j.at("a").get<std::vector<std::int32_t>>();
  input.b = j.at("b").get<std::vector<std::int32_t>>();
  input.c = j.at("c").get<std::vector<std::int32_t>>();
}

std::string to_json_string(const FuzzInput& input) { return nlohmann::json(input).dump(); }

FuzzInput fuzz_input_from_json(const nlohmann::json& j) { return j.get<FuzzInput>(); }

}  // namespace fuzzfeed
