#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "fuzzfeed/minilang/ast.hpp"

namespace fuzzfeed::minilang {

enum class ErrorKind {
  SyntaxError,
  MissingFoo,
  DuplicateFunction,
  BadSignature,
  TypeError,
  MissingReturn,
  MissingPrecondition,
};

std::string_view error_kind_name(ErrorKind kind);

/// Every parse/typecheck failure is reported through this type, with a position.
class MinilangError : public std::runtime_error {
 public:
  MinilangError(ErrorKind kind, SourcePos pos, std::string message);

  ErrorKind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  ErrorKind kind_;
  SourcePos pos_;
  std::string message_;
};

}  // namespace fuzzfeed::minilang
