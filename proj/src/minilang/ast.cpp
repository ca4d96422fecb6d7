#include "fuzzfeed/minilang/ast.hpp"

#include <stdexcept>

#include "fuzzfeed/minilang/diagnostics.hpp"

namespace fuzzfeed::minilang {

std::string_view type_name(Type t) {
  switch (t) {
    case Type::Int: return "int";
    case Type::Bool: return "bool";
    case Type::IntArray: return "int[]";
    case Type::Void: return "void";
  }
  return "?";
}

std::string_view op_spelling(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

std::string_view op_spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
  }
  return "?";
}

const FunctionDef* Program::find(std::string_view name) const {
  for (const auto& fn : functions) {
    if (fn.name == name) return &fn;
  }
  return nullptr;
}

FunctionDef* Program::find(std::string_view name) {
  for (auto& fn : functions) {
    if (fn.name == name) return &fn;
  }
  return nullptr;
}

const FunctionDef& Program::foo() const {
  const FunctionDef* fn = find("foo");
  if (fn == nullptr) {
    throw MinilangError(ErrorKind::MissingFoo, SourcePos{}, "program does not define 'foo'");
  }
  return *fn;
}

std::string_view Program::function_source(const FunctionDef& fn) const {
  return std::string_view(source_text).substr(fn.source_begin, fn.source_end - fn.source_begin);
}

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::MissingFoo: return "MissingFoo";
    case ErrorKind::DuplicateFunction: return "DuplicateFunction";
    case ErrorKind::BadSignature: return "BadSignature";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::MissingReturn: return "MissingReturn";
    case ErrorKind::MissingPrecondition: return "MissingPrecondition";
  }
  return "?";
}

namespace {
std::string format_error(ErrorKind kind, SourcePos pos, const std::string& message) {
  return std::string(error_kind_name(kind)) + " at " + std::to_string(pos.line) + ":" +
         std::to_string(pos.column) + ": " + message;
}
}  // namespace

MinilangError::MinilangError(ErrorKind kind, SourcePos pos, std::string message)
    : std::runtime_error(format_error(kind, pos, message)),
      kind_(kind),
      pos_(pos),
      message_(std::move(message)) {}

}  // namespace fuzzfeed::minilang
