#include <string>

#include "fuzzfeed/minilang/minilang.hpp"

namespace fuzzfeed::minilang {

namespace {

int precedence(const Expr& e) {
  if (e.kind == ExprKind::Unary) return 7;
  if (e.kind != ExprKind::Binary) return 8;
  switch (e.binary_op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    default: return 6;
  }
}

void print_expr(const Expr& e, std::string& out);

void print_operand(const Expr& child, int parent_prec, bool right, std::string& out) {
  int p = precedence(child);
  bool parens = p < parent_prec || (right && p == parent_prec);
  if (parens) out += '(';
  print_expr(child, out);
  if (parens) out += ')';
}

void print_expr(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::IntLit:
      // INT_MIN only arises as the wrapped literal 2147483648.
      out += e.value == INT32_MIN ? "2147483648" : std::to_string(e.value);
      return;
    case ExprKind::BoolLit: out += e.value ? "true" : "false"; return;
    case ExprKind::Var: out += e.name; return;
    case ExprKind::Index:
      out += e.name + "[";
      print_expr(*e.lhs, out);
      out += "]";
      return;
    case ExprKind::Len: out += "len(" + e.name + ")"; return;
    case ExprKind::Sort: out += "sort(" + e.name + ")"; return;
    case ExprKind::Clone: out += "clone(" + e.name + ")"; return;
    case ExprKind::BinarySearch:
      out += "binarySearch(" + e.name + ", ";
      print_expr(*e.lhs, out);
      out += ")";
      return;
    case ExprKind::Unary:
      out += op_spelling(e.unary_op);
      // Keep "- -x" from lexing as "--x".
      if (e.lhs->kind == ExprKind::Unary && e.lhs->unary_op == e.unary_op && e.unary_op == UnaryOp::Neg) {
        out += '(';
        print_expr(*e.lhs, out);
        out += ')';
      } else {
        print_operand(*e.lhs, 7, false, out);
      }
      return;
    case ExprKind::Binary: {
      int p = precedence(e);
      print_operand(*e.lhs, p, false, out);
      out += ' ';
      out += op_spelling(e.binary_op);
      out += ' ';
      print_operand(*e.rhs, p, true, out);
      return;
    }
  }
}

std::string expr_string(const Expr& e) {
  std::string s;
  print_expr(e, s);
  return s;
}

void print_block(const std::vector<Stmt>& stmts, int indent, std::string& out);

std::string simple_stmt(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::Decl:
      return std::string(type_name(s.decl_type)) + " " + s.name + " = " + expr_string(*s.value);
    case StmtKind::Assign: return s.name + " = " + expr_string(*s.value);
    case StmtKind::IndexAssign:
      return s.name + "[" + expr_string(*s.index) + "] = " + expr_string(*s.value);
    case StmtKind::ExprStmt: return expr_string(*s.value);
    default: return {};
  }
}

void print_stmt(const Stmt& s, int indent, std::string& out) {
  std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
  switch (s.kind) {
    case StmtKind::Decl:
    case StmtKind::Assign:
    case StmtKind::IndexAssign:
    case StmtKind::ExprStmt: out += pad + simple_stmt(s) + ";\n"; return;
    case StmtKind::Throw: out += pad + "throw;\n"; return;
    case StmtKind::Return: out += pad + "return " + expr_string(*s.value) + ";\n"; return;
    case StmtKind::While:
      out += pad + "while (" + expr_string(*s.cond) + ") {\n";
      print_block(s.body, indent + 1, out);
      out += pad + "}\n";
      return;
    case StmtKind::For:
      out += pad + "for (" + (s.init ? simple_stmt(*s.init) : "") + "; " + expr_string(*s.cond) + "; " +
             (s.update ? simple_stmt(*s.update) : "") + ") {\n";
      print_block(s.body, indent + 1, out);
      out += pad + "}\n";
      return;
    case StmtKind::If:
      out += pad + "if (" + expr_string(*s.cond) + ") {\n";
      print_block(s.body, indent + 1, out);
      if (s.has_else) {
        out += pad + "} else {\n";
        print_block(s.else_body, indent + 1, out);
      }
      out += pad + "}\n";
      return;
  }
}

void print_block(const std::vector<Stmt>& stmts, int indent, std::string& out) {
  for (const auto& s : stmts) print_stmt(s, indent, out);
}

bool same_expr(const Expr* a, const Expr* b) {
  if (a == nullptr || b == nullptr) return a == b;
  if (a->kind != b->kind || a->value != b->value || a->name != b->name) return false;
  if (a->kind == ExprKind::Unary && a->unary_op != b->unary_op) return false;
  if (a->kind == ExprKind::Binary && a->binary_op != b->binary_op) return false;
  return same_expr(a->lhs.get(), b->lhs.get()) && same_expr(a->rhs.get(), b->rhs.get());
}

bool same_stmts(const std::vector<Stmt>& a, const std::vector<Stmt>& b);

bool same_stmt(const Stmt* a, const Stmt* b) {
  if (a == nullptr || b == nullptr) return a == b;
  if (a->kind != b->kind || a->name != b->name || a->has_else != b->has_else) return false;
  if (a->kind == StmtKind::Decl && a->decl_type != b->decl_type) return false;
  return same_expr(a->index.get(), b->index.get()) && same_expr(a->value.get(), b->value.get()) &&
         same_expr(a->cond.get(), b->cond.get()) && same_stmt(a->init.get(), b->init.get()) &&
         same_stmt(a->update.get(), b->update.get()) && same_stmts(a->body, b->body) &&
         same_stmts(a->else_body, b->else_body);
}

bool same_stmts(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_stmt(&a[i], &b[i])) return false;
  }
  return true;
}

}  // namespace

std::string print_function(const FunctionDef& fn) {
  std::string out = std::string(type_name(fn.return_type)) + " " + fn.name + "(";
  for (std::size_t i = 0; i < fn.params.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::string(type_name(fn.params[i].type)) + " " + fn.params[i].name;
  }
  out += ") {\n";
  print_block(fn.body, 1, out);
  out += "}\n";
  return out;
}

std::string print_program(const Program& program) {
  std::string out;
  for (const auto& fn : program.functions) {
    if (!out.empty()) out += "\n";
    if (!fn.leading_comment.empty()) {
      std::size_t start = 0;
      while (start <= fn.leading_comment.size()) {
        std::size_t nl = fn.leading_comment.find('\n', start);
        if (nl == std::string::npos) nl = fn.leading_comment.size();
        out += "// " + fn.leading_comment.substr(start, nl - start) + "\n";
        start = nl + 1;
      }
    }
    out += print_function(fn);
  }
  return out;
}

bool same_function(const FunctionDef& lhs, const FunctionDef& rhs) {
  if (lhs.name != rhs.name || lhs.return_type != rhs.return_type || lhs.params.size() != rhs.params.size()) {
    return false;
  }
  for (std::size_t i = 0; i < lhs.params.size(); ++i) {
    if (lhs.params[i].name != rhs.params[i].name || lhs.params[i].type != rhs.params[i].type) return false;
  }
  return same_stmts(lhs.body, rhs.body);
}

}  // namespace fuzzfeed::minilang
