#include "fuzzfeed/llm/extract.hpp"

#include <sstream>
#include <vector>

namespace fuzzfeed::llm {

using minilang::ErrorKind;
using minilang::MinilangError;

std::string_view to_string(ExtractionError::Kind kind) {
  switch (kind) {
    case ExtractionError::Kind::Unparsable: return "unparsable";
    case ExtractionError::Kind::FooMutated: return "foo-mutated";
    case ExtractionError::Kind::MissingPrecondition: return "missing-precondition";
    case ExtractionError::Kind::TypeError: return "type-error";
  }
  return "?";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

// Drops chatter before the first line that can begin a program.
std::string skip_preamble(const std::string& text) {
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto t = trim(lines[i]);
    for (std::string_view p : {"//", "/*", "int ", "bool ", "boolean ", "public ", "static ", "private "}) {
      if (starts_with(t, p)) {
        std::string out;
        for (std::size_t k = i; k < lines.size(); ++k) out += lines[k] + "\n";
        return out;
      }
    }
  }
  return text;
}

}  // namespace

std::string strip_code_fences(std::string_view text) {
  std::vector<std::string> blocks;
  bool inside = false;
  std::string current;
  for (const auto& line : split_lines(text)) {
    if (starts_with(trim(line), "```")) {
      if (inside) blocks.push_back(std::move(current));
      current.clear();
      inside = !inside;
      continue;
    }
    if (inside) current += line + "\n";
  }
  if (inside && !current.empty()) blocks.push_back(std::move(current));
  if (blocks.empty()) return std::string(text);
  for (const auto& b : blocks) {
    if (b.find("precondition") != std::string::npos) return b;
  }
  return blocks.front();
}

CandidateWp extract_candidate(std::string_view response, const minilang::Program& original) {
  using Kind = ExtractionError::Kind;
  std::string source = strip_code_fences(response);
  if (trim(source).empty() || source.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ExtractionError(Kind::Unparsable, "response contains no program text");
  }

  minilang::Program program;
  auto try_parse = [&](const std::string& text) {
    program = minilang::parse(text, minilang::ParseOptions{.allow_missing_foo = true});
  };
  try {
    try {
      try_parse(source);
    } catch (const MinilangError& e) {
      if (e.kind() != ErrorKind::SyntaxError) throw;
      std::string trimmed = skip_preamble(source);
      if (trimmed == source) throw;
      try_parse(trimmed);
      source = trimmed;
    }
  } catch (const MinilangError& e) {
    switch (e.kind()) {
      case ErrorKind::BadSignature:
        if (starts_with(e.message(), "'foo'")) throw ExtractionError(Kind::FooMutated, e.what());
        throw ExtractionError(Kind::TypeError, e.what());
      case ErrorKind::MissingPrecondition: throw ExtractionError(Kind::MissingPrecondition, e.what());
      case ErrorKind::TypeError:
      case ErrorKind::MissingReturn: throw ExtractionError(Kind::TypeError, e.what());
      default: throw ExtractionError(Kind::Unparsable, e.what());
    }
  }

  const minilang::FunctionDef* foo = program.find("foo");
  if (foo == nullptr) throw ExtractionError(Kind::FooMutated, "response does not contain 'foo'");
  if (!minilang::same_function(*foo, original.foo())) {
    throw ExtractionError(Kind::FooMutated, "'foo' differs from the original program");
  }
  if (program.precondition() == nullptr) {
    throw ExtractionError(Kind::MissingPrecondition, "response does not define 'precondition'");
  }
  try {
    minilang::typecheck(program);
  } catch (const MinilangError& e) {
    throw ExtractionError(Kind::TypeError, e.what());
  }

  CandidateWp c;
  c.comment = program.precondition()->leading_comment;
  c.source = source;
  c.raw_response = std::string(response);
  c.program = std::make_shared<const minilang::Program>(std::move(program));
  return c;
}

}  // namespace fuzzfeed::llm
