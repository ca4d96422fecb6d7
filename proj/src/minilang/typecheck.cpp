#include <string>
#include <unordered_map>
#include <vector>

#include "fuzzfeed/minilang/minilang.hpp"

namespace fuzzfeed::minilang {

namespace {

struct Binding {
  Type type;
  int slot;
};

class Checker {
 public:
  explicit Checker(FunctionDef& fn) : fn_(fn) {}

  void run() {
    push();
    for (const auto& p : fn_.params) declare(p.name, p.type, fn_.pos);
    check_block(fn_.body);
    pop();
    fn_.slot_count = next_slot_;
    if (can_complete(fn_.body)) {
      throw MinilangError(ErrorKind::MissingReturn, fn_.pos,
                          "'" + fn_.name + "' can reach the end of its body without 'return' or 'throw'");
    }
  }

 private:
  [[noreturn]] static void type_error(SourcePos pos, Type expected, Type found, std::string_view what) {
    throw MinilangError(ErrorKind::TypeError, pos,
                        std::string(what) + ": expected " + std::string(type_name(expected)) +
                            ", found " + std::string(type_name(found)));
  }

  [[noreturn]] static void error(SourcePos pos, const std::string& message) {
    throw MinilangError(ErrorKind::TypeError, pos, message);
  }

  void push() { scopes_.emplace_back(); }
  void pop() { scopes_.pop_back(); }

  int declare(const std::string& name, Type type, SourcePos pos) {
    if (lookup(name) != nullptr) error(pos, "variable '" + name + "' is already declared");
    int slot = next_slot_++;
    scopes_.back().emplace(name, Binding{type, slot});
    return slot;
  }

  const Binding* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }

  const Binding& require(const std::string& name, SourcePos pos) {
    const Binding* b = lookup(name);
    if (b == nullptr) error(pos, "use of undeclared variable '" + name + "'");
    return *b;
  }

  int require_array(const std::string& name, SourcePos pos) {
    const Binding& b = require(name, pos);
    if (b.type != Type::IntArray) type_error(pos, Type::IntArray, b.type, "'" + name + "'");
    return b.slot;
  }

  void expect_type(Expr& e, Type expected, std::string_view what) {
    Type t = check_expr(e);
    if (t != expected) type_error(e.pos, expected, t, what);
  }

  Type check_expr(Expr& e) {
    e.type = infer(e);
    return e.type;
  }

  Type infer(Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Type::Int;
      case ExprKind::BoolLit: return Type::Bool;
      case ExprKind::Var: {
        const Binding& b = require(e.name, e.pos);
        e.slot = b.slot;
        return b.type;
      }
      case ExprKind::Index:
        e.slot = require_array(e.name, e.pos);
        expect_type(*e.lhs, Type::Int, "array index");
        return Type::Int;
      case ExprKind::Len:
        e.slot = require_array(e.name, e.pos);
        return Type::Int;
      case ExprKind::Sort:
        e.slot = require_array(e.name, e.pos);
        return Type::Void;
      case ExprKind::Clone:
        e.slot = require_array(e.name, e.pos);
        return Type::IntArray;
      case ExprKind::BinarySearch:
        e.slot = require_array(e.name, e.pos);
        expect_type(*e.lhs, Type::Int, "binarySearch key");
        return Type::Int;
      case ExprKind::Unary:
        if (e.unary_op == UnaryOp::Neg) {
          expect_type(*e.lhs, Type::Int, "operand of unary '-'");
          return Type::Int;
        }
        expect_type(*e.lhs, Type::Bool, "operand of '!'");
        return Type::Bool;
      case ExprKind::Binary: return infer_binary(e);
    }
    return Type::Void;
  }

  Type infer_binary(Expr& e) {
    std::string what = "operand of '" + std::string(op_spelling(e.binary_op)) + "'";
    switch (e.binary_op) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod:
        expect_type(*e.lhs, Type::Int, what);
        expect_type(*e.rhs, Type::Int, what);
        return Type::Int;
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        expect_type(*e.lhs, Type::Int, what);
        expect_type(*e.rhs, Type::Int, what);
        return Type::Bool;
      case BinaryOp::Eq:
      case BinaryOp::Ne: {
        Type lt = check_expr(*e.lhs);
        if (lt != Type::Int && lt != Type::Bool) type_error(e.lhs->pos, Type::Int, lt, what);
        expect_type(*e.rhs, lt, what);
        return Type::Bool;
      }
      case BinaryOp::And:
      case BinaryOp::Or:
        expect_type(*e.lhs, Type::Bool, what);
        expect_type(*e.rhs, Type::Bool, what);
        return Type::Bool;
    }
    return Type::Void;
  }

  void check_block(std::vector<Stmt>& stmts) {
    push();
    for (auto& s : stmts) check_stmt(s);
    pop();
  }

  void check_stmt(Stmt& s) {
    switch (s.kind) {
      case StmtKind::Decl: {
        if (s.decl_type == Type::Void) error(s.pos, "cannot declare a void variable");
        Type t = check_expr(*s.value);
        if (t != s.decl_type) type_error(s.value->pos, s.decl_type, t, "initializer of '" + s.name + "'");
        s.slot = declare(s.name, s.decl_type, s.pos);
        return;
      }
      case StmtKind::Assign: {
        const Binding& b = require(s.name, s.pos);
        s.slot = b.slot;
        Type target = b.type;
        Type t = check_expr(*s.value);
        if (t != target) type_error(s.value->pos, target, t, "assignment to '" + s.name + "'");
        return;
      }
      case StmtKind::IndexAssign:
        s.slot = require_array(s.name, s.pos);
        expect_type(*s.index, Type::Int, "array index");
        expect_type(*s.value, Type::Int, "array element");
        return;
      case StmtKind::ExprStmt:
        if (s.value->kind != ExprKind::Sort) error(s.pos, "only sort(...) may be used as a statement");
        check_expr(*s.value);
        return;
      case StmtKind::While:
        expect_type(*s.cond, Type::Bool, "loop condition");
        check_block(s.body);
        return;
      case StmtKind::For:
        push();
        if (s.init) check_stmt(*s.init);
        expect_type(*s.cond, Type::Bool, "loop condition");
        if (s.update) check_stmt(*s.update);
        check_block(s.body);
        pop();
        return;
      case StmtKind::If:
        expect_type(*s.cond, Type::Bool, "if condition");
        check_block(s.body);
        if (s.has_else) check_block(s.else_body);
        return;
      case StmtKind::Throw: return;
      case StmtKind::Return:
        expect_type(*s.value, fn_.return_type, "return value of '" + fn_.name + "'");
        return;
    }
  }

  static bool is_literal_true(const Expr& e) { return e.kind == ExprKind::BoolLit && e.value != 0; }

  static bool can_complete(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) {
      if (!can_complete(s)) return false;
    }
    return true;
  }

  static bool can_complete(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Throw:
      case StmtKind::Return: return false;
      case StmtKind::If: return !s.has_else || can_complete(s.body) || can_complete(s.else_body);
      case StmtKind::While:
      case StmtKind::For: return !is_literal_true(*s.cond);
      default: return true;
    }
  }

  FunctionDef& fn_;
  std::vector<std::unordered_map<std::string, Binding>> scopes_;
  int next_slot_ = 0;
};

}  // namespace

void typecheck(Program& program) {
  for (auto& fn : program.functions) Checker(fn).run();
  program.typechecked = true;
}

}  // namespace fuzzfeed::minilang
