#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace fuzzfeed::minilang {

enum class Type { Int, Bool, IntArray, Void };

std::string_view type_name(Type t);

struct SourcePos {
  int line = 1;
  int column = 1;
};

enum class ExprKind {
  IntLit,
  BoolLit,
  Var,
  Index,         // name[lhs]
  Len,           // len(name)
  Unary,         // op lhs
  Binary,        // lhs op rhs
  Sort,          // sort(name), statement-level only
  Clone,         // clone(name)
  BinarySearch,  // binarySearch(name, lhs)
};

enum class UnaryOp { Neg, Not };

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

std::string_view op_spelling(UnaryOp op);
std::string_view op_spelling(BinaryOp op);

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourcePos pos;
  std::int32_t value = 0;  // IntLit, BoolLit (0/1)
  std::string name;        // variable or array operand
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  std::unique_ptr<Expr> lhs;
  std::unique_ptr<Expr> rhs;

  // Filled in by typecheck.
  Type type = Type::Void;
  int slot = -1;
};

enum class StmtKind {
  Decl,         // type name = value;
  Assign,       // name = value;
  IndexAssign,  // name[index] = value;
  ExprStmt,     // value;   (sort only)
  While,        // while (cond) body
  For,          // for (init; cond; update) body
  If,           // if (cond) body else else_body
  Throw,
  Return,       // return value;
};

struct Stmt {
  StmtKind kind = StmtKind::Throw;
  SourcePos pos;
  Type decl_type = Type::Int;
  std::string name;
  std::unique_ptr<Expr> index;
  std::unique_ptr<Expr> value;
  std::unique_ptr<Expr> cond;
  std::unique_ptr<Stmt> init;
  std::unique_ptr<Stmt> update;
  std::vector<Stmt> body;
  std::vector<Stmt> else_body;
  bool has_else = false;

  int slot = -1;  // Decl/Assign/IndexAssign target, set by typecheck
};

struct Param {
  std::string name;
  Type type = Type::IntArray;
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  Type return_type = Type::Int;
  std::vector<Stmt> body;
  SourcePos pos;

  /// `//` lines directly above the function header, markers stripped.
  std::string leading_comment;
  /// Byte range of the function in Program::source_text, leading comment included.
  std::size_t source_begin = 0;
  std::size_t source_end = 0;

  int slot_count = 0;  // set by typecheck
};

/// A parsed program: `foo` plus an optional `precondition`.
struct Program {
  std::vector<FunctionDef> functions;
  std::string source_text;
  bool typechecked = false;

  const FunctionDef* find(std::string_view name) const;
  FunctionDef* find(std::string_view name);

  const FunctionDef& foo() const;
  const FunctionDef* precondition() const { return find("precondition"); }

  /// Source slice of one function, including its leading comment.
  std::string_view function_source(const FunctionDef& fn) const;
};

using ProgramPtr = std::shared_ptr<const Program>;

}  // namespace fuzzfeed::minilang
