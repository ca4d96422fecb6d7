#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "fuzzfeed/minilang/minilang.hpp"

namespace fuzzfeed::llm {

struct CandidateWp {
  minilang::ProgramPtr program;  // foo + precondition, typechecked
  std::string source;            // program text after fence stripping
  std::string raw_response;
  std::string comment;           // comment lines right above `precondition`
};

class ExtractionError : public std::runtime_error {
 public:
  enum class Kind { Unparsable, FooMutated, MissingPrecondition, TypeError };

  ExtractionError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(ExtractionError::Kind kind);

/// Contents of the first fenced code block that mentions `precondition`
/// (else the first block); the whole text when there are no fences.
std::string strip_code_fences(std::string_view text);

CandidateWp extract_candidate(std::string_view response, const minilang::Program& original);

}  // namespace fuzzfeed::llm
