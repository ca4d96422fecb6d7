#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fuzzfeed/minilang/minilang.hpp"

namespace fuzzfeed::testing {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(FUZZFEED_SOURCE_DIR) / rel;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The copy-then-sort program used throughout the motivating trajectory.
inline std::string copy_sort_source() { return read_text(source_path("corpus/builtin/sorting_copy.mini")); }

inline std::string copy_sort_truth() { return read_text(source_path("corpus/builtin/sorting_copy.truth.mini")); }

// initial, strong, regressed, final
inline std::string motivating_candidate(const std::string& stage) {
  return read_text(source_path("fixtures/candidates/motivating_" + stage + ".mini"));
}

inline minilang::ProgramPtr with_precondition(const std::string& foo_source, const std::string& precondition) {
  return minilang::load_program(foo_source + "\n" + precondition);
}

inline minilang::ProgramPtr copy_sort_with(const std::string& precondition) {
  return with_precondition(copy_sort_source(), precondition);
}

}  // namespace fuzzfeed::testing

#include "doctest.h"

namespace doctest {
template <>
struct StringMaker<fuzzfeed::FuzzInput> {
  static String convert(const fuzzfeed::FuzzInput& in) { return fuzzfeed::to_json_string(in).c_str(); }
};
}  // namespace doctest
