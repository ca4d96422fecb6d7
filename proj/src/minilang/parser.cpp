#include <set>
#include <string>

#include "fuzzfeed/minilang/minilang.hpp"
#include "lexer.hpp"

namespace fuzzfeed::minilang {

namespace {

using detail::Tok;
using detail::Token;

std::unique_ptr<Expr> make_expr(ExprKind kind, SourcePos pos) {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->pos = pos;
  return e;
}

std::unique_ptr<Expr> make_binary(BinaryOp op, std::unique_ptr<Expr> lhs, std::unique_ptr<Expr> rhs,
                                  SourcePos pos) {
  auto e = make_expr(ExprKind::Binary, pos);
  e->binary_op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

class Parser {
 public:
  Parser(std::string_view source, detail::LexResult lexed)
      : source_(source), toks_(std::move(lexed.tokens)), comments_(std::move(lexed.comments)) {}

  Program parse_program() {
    Program program;
    program.source_text = std::string(source_);
    while (!at(Tok::End)) {
      program.functions.push_back(parse_function());
    }
    return program;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& lookahead(std::size_t n) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  bool at(Tok kind) const { return cur().kind == kind; }
  bool at_ident(std::string_view text) const { return at(Tok::Ident) && cur().text == text; }

  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool accept(Tok kind) {
    if (at(kind)) {
      advance();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw MinilangError(ErrorKind::SyntaxError, cur().pos, message);
  }

  const Token& expect(Tok kind, std::string_view context = {}) {
    if (!at(kind)) {
      std::string msg = "expected " + std::string(detail::token_name(kind));
      if (!context.empty()) msg += " " + std::string(context);
      msg += ", found " + describe_current();
      fail(msg);
    }
    return advance();
  }

  std::string describe_current() const {
    if (at(Tok::Ident) || at(Tok::IntLit)) return "'" + cur().text + "'";
    return std::string(detail::token_name(cur().kind));
  }

  std::string expect_ident(std::string_view context) { return expect(Tok::Ident, context).text; }

  // -------------------------------------------------------------------------
  // Declarations

  Type parse_type() {
    if (accept(Tok::KwBool)) return Type::Bool;
    expect(Tok::KwInt, "(type)");
    if (accept(Tok::LBracket)) {
      expect(Tok::RBracket);
      return Type::IntArray;
    }
    return Type::Int;
  }

  FunctionDef parse_function() {
    FunctionDef fn;
    const Token& first = cur();
    std::size_t begin = first.offset;
    fn.leading_comment = leading_comment(first, begin);

    // Tolerate Java modifiers in LLM output.
    while (at_ident("public") || at_ident("static") || at_ident("private")) advance();

    fn.pos = cur().pos;
    if (at(Tok::KwInt)) {
      advance();
      fn.return_type = Type::Int;
    } else if (at(Tok::KwBool)) {
      advance();
      fn.return_type = Type::Bool;
    } else {
      fail("expected a function definition ('int' or 'bool'), found " + describe_current());
    }
    if (at(Tok::LBracket)) fail("functions cannot return arrays");
    fn.name = expect_ident("(function name)");
    expect(Tok::LParen, "after function name");
    if (!at(Tok::RParen)) {
      do {
        Param p;
        p.type = parse_type();
        p.name = expect_ident("(parameter name)");
        fn.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "after parameters");
    fn.body = parse_block();
    fn.source_begin = begin;
    fn.source_end = toks_[pos_ - 1].end_offset;
    return fn;
  }

  // The contiguous run of comment lines ending on the line above `tok`.
  std::string leading_comment(const Token& tok, std::size_t& begin) {
    std::string text;
    if (tok.comment_begin == tok.comment_end) return text;
    std::size_t first = tok.comment_end;
    int expected_line = tok.pos.line - 1;
    while (first > tok.comment_begin && comments_[first - 1].line == expected_line) {
      --first;
      --expected_line;
    }
    for (std::size_t i = first; i < tok.comment_end; ++i) {
      if (!text.empty()) text += '\n';
      text += comments_[i].text;
    }
    if (first < tok.comment_end) begin = comments_[first].offset;
    return text;
  }

  // -------------------------------------------------------------------------
  // Statements

  std::vector<Stmt> parse_block() {
    expect(Tok::LBrace, "to open a block");
    std::vector<Stmt> stmts;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail("unterminated block, expected '}'");
      stmts.push_back(parse_stmt());
    }
    advance();
    return stmts;
  }

  // A braced block, or a single statement standing in for one.
  std::vector<Stmt> parse_body() {
    if (at(Tok::LBrace)) return parse_block();
    std::vector<Stmt> stmts;
    stmts.push_back(parse_stmt());
    return stmts;
  }

  bool at_declaration() const {
    return at(Tok::KwInt) || at(Tok::KwBool);
  }

  Stmt parse_stmt() {
    SourcePos pos = cur().pos;
    if (at(Tok::KwWhile)) {
      advance();
      Stmt s;
      s.kind = StmtKind::While;
      s.pos = pos;
      expect(Tok::LParen, "after 'while'");
      s.cond = parse_expr();
      expect(Tok::RParen, "after loop condition");
      s.body = parse_body();
      return s;
    }
    if (at(Tok::KwFor)) {
      advance();
      Stmt s;
      s.kind = StmtKind::For;
      s.pos = pos;
      expect(Tok::LParen, "after 'for'");
      if (!at(Tok::Semi)) s.init = std::make_unique<Stmt>(parse_simple());
      expect(Tok::Semi, "after for-loop initializer");
      if (at(Tok::Semi)) fail("for-loop condition is required");
      s.cond = parse_expr();
      expect(Tok::Semi, "after for-loop condition");
      if (!at(Tok::RParen)) s.update = std::make_unique<Stmt>(parse_simple());
      expect(Tok::RParen, "after for-loop update");
      s.body = parse_body();
      return s;
    }
    if (at(Tok::KwIf)) {
      advance();
      Stmt s;
      s.kind = StmtKind::If;
      s.pos = pos;
      expect(Tok::LParen, "after 'if'");
      s.cond = parse_expr();
      expect(Tok::RParen, "after if condition");
      s.body = parse_body();
      if (accept(Tok::KwElse)) {
        s.has_else = true;
        s.else_body = parse_body();
      }
      return s;
    }
    if (at(Tok::KwThrow)) {
      advance();
      Stmt s;
      s.kind = StmtKind::Throw;
      s.pos = pos;
      // `throw new RuntimeException();` is accepted and treated as `throw;`.
      if (at_ident("new")) {
        advance();
        expect_ident("(exception type)");
        expect(Tok::LParen);
        int depth = 1;
        while (depth > 0) {
          if (at(Tok::End)) fail("unterminated throw expression");
          if (at(Tok::LParen)) ++depth;
          if (at(Tok::RParen)) --depth;
          advance();
        }
      }
      expect(Tok::Semi, "after 'throw'");
      return s;
    }
    if (at(Tok::KwReturn)) {
      advance();
      Stmt s;
      s.kind = StmtKind::Return;
      s.pos = pos;
      if (at(Tok::Semi)) fail("'return' requires a value");
      s.value = parse_expr();
      expect(Tok::Semi, "after return value");
      return s;
    }
    if (at(Tok::LBrace)) fail("nested blocks are not supported");
    Stmt s = parse_simple();
    expect(Tok::Semi, "after statement");
    return s;
  }

  // Declarations, assignments and call statements without the trailing ';'.
  Stmt parse_simple() {
    SourcePos pos = cur().pos;
    Stmt s;
    s.pos = pos;
    if (at_declaration()) {
      s.kind = StmtKind::Decl;
      s.decl_type = parse_type();
      s.name = expect_ident("(variable name)");
      if (at(Tok::Semi)) fail("variable '" + s.name + "' must be initialized");
      expect(Tok::Assign, "in declaration");
      s.value = parse_expr();
      return s;
    }
    if (!at(Tok::Ident)) fail("expected a statement, found " + describe_current());

    const Token& next = lookahead(1);
    if (next.kind == Tok::LParen || next.kind == Tok::Dot) {
      s.kind = StmtKind::ExprStmt;
      s.value = parse_expr();
      return s;
    }

    std::string name = advance().text;
    s.name = name;
    if (accept(Tok::LBracket)) {
      s.kind = StmtKind::IndexAssign;
      s.index = parse_expr();
      expect(Tok::RBracket);
      expect(Tok::Assign, "in element assignment");
      s.value = parse_expr();
      return s;
    }

    s.kind = StmtKind::Assign;
    auto var = [&] {
      auto v = make_expr(ExprKind::Var, pos);
      v->name = name;
      return v;
    };
    auto one = [&] {
      auto v = make_expr(ExprKind::IntLit, pos);
      v->value = 1;
      return v;
    };
    if (accept(Tok::Assign)) {
      s.value = parse_expr();
    } else if (accept(Tok::PlusPlus)) {
      s.value = make_binary(BinaryOp::Add, var(), one(), pos);
    } else if (accept(Tok::MinusMinus)) {
      s.value = make_binary(BinaryOp::Sub, var(), one(), pos);
    } else if (accept(Tok::PlusAssign)) {
      s.value = make_binary(BinaryOp::Add, var(), parse_expr(), pos);
    } else if (accept(Tok::MinusAssign)) {
      s.value = make_binary(BinaryOp::Sub, var(), parse_expr(), pos);
    } else {
      fail("expected '=' after '" + name + "', found " + describe_current());
    }
    return s;
  }

  // -------------------------------------------------------------------------
  // Expressions, lowest precedence first.

  std::unique_ptr<Expr> parse_expr() { return parse_or(); }

  std::unique_ptr<Expr> parse_or() {
    auto lhs = parse_and();
    while (at(Tok::OrOr)) {
      SourcePos pos = advance().pos;
      lhs = make_binary(BinaryOp::Or, std::move(lhs), parse_and(), pos);
    }
    return lhs;
  }

  std::unique_ptr<Expr> parse_and() {
    auto lhs = parse_equality();
    while (at(Tok::AndAnd)) {
      SourcePos pos = advance().pos;
      lhs = make_binary(BinaryOp::And, std::move(lhs), parse_equality(), pos);
    }
    return lhs;
  }

  std::unique_ptr<Expr> parse_equality() {
    auto lhs = parse_relational();
    for (;;) {
      BinaryOp op;
      if (at(Tok::EqEq)) op = BinaryOp::Eq;
      else if (at(Tok::Ne)) op = BinaryOp::Ne;
      else return lhs;
      SourcePos pos = advance().pos;
      lhs = make_binary(op, std::move(lhs), parse_relational(), pos);
    }
  }

  std::unique_ptr<Expr> parse_relational() {
    auto lhs = parse_additive();
    for (;;) {
      BinaryOp op;
      if (at(Tok::Lt)) op = BinaryOp::Lt;
      else if (at(Tok::Le)) op = BinaryOp::Le;
      else if (at(Tok::Gt)) op = BinaryOp::Gt;
      else if (at(Tok::Ge)) op = BinaryOp::Ge;
      else return lhs;
      SourcePos pos = advance().pos;
      lhs = make_binary(op, std::move(lhs), parse_additive(), pos);
    }
  }

  std::unique_ptr<Expr> parse_additive() {
    auto lhs = parse_multiplicative();
    for (;;) {
      BinaryOp op;
      if (at(Tok::Plus)) op = BinaryOp::Add;
      else if (at(Tok::Minus)) op = BinaryOp::Sub;
      else return lhs;
      SourcePos pos = advance().pos;
      lhs = make_binary(op, std::move(lhs), parse_multiplicative(), pos);
    }
  }

  std::unique_ptr<Expr> parse_multiplicative() {
    auto lhs = parse_unary();
    for (;;) {
      BinaryOp op;
      if (at(Tok::Star)) op = BinaryOp::Mul;
      else if (at(Tok::Slash)) op = BinaryOp::Div;
      else if (at(Tok::Percent)) op = BinaryOp::Mod;
      else return lhs;
      SourcePos pos = advance().pos;
      lhs = make_binary(op, std::move(lhs), parse_unary(), pos);
    }
  }

  std::unique_ptr<Expr> parse_unary() {
    if (at(Tok::Minus) || at(Tok::Bang)) {
      SourcePos pos = cur().pos;
      UnaryOp op = at(Tok::Minus) ? UnaryOp::Neg : UnaryOp::Not;
      advance();
      auto e = make_expr(ExprKind::Unary, pos);
      e->unary_op = op;
      e->lhs = parse_unary();
      return e;
    }
    return parse_primary();
  }

  std::unique_ptr<Expr> parse_primary() {
    SourcePos pos = cur().pos;
    if (at(Tok::IntLit)) {
      auto e = make_expr(ExprKind::IntLit, pos);
      // 2147483648 is only meaningful under unary minus; it wraps to INT_MIN.
      e->value = static_cast<std::int32_t>(static_cast<std::uint32_t>(cur().int_value));
      advance();
      return e;
    }
    if (at(Tok::KwTrue) || at(Tok::KwFalse)) {
      auto e = make_expr(ExprKind::BoolLit, pos);
      e->value = at(Tok::KwTrue) ? 1 : 0;
      advance();
      return e;
    }
    if (accept(Tok::LParen)) {
      auto e = parse_expr();
      expect(Tok::RParen, "to close parenthesized expression");
      return e;
    }
    if (!at(Tok::Ident)) fail("expected an expression, found " + describe_current());

    std::string name = advance().text;
    if (accept(Tok::LParen)) return parse_builtin(name, pos);
    if (accept(Tok::LBracket)) {
      auto e = make_expr(ExprKind::Index, pos);
      e->name = name;
      e->lhs = parse_expr();
      expect(Tok::RBracket, "to close index");
      return e;
    }
    if (accept(Tok::Dot)) {
      // Java spellings: x.length and x.clone()
      std::string member = expect_ident("after '.'");
      if (member == "length") {
        auto e = make_expr(ExprKind::Len, pos);
        e->name = name;
        return e;
      }
      if (member == "clone") {
        expect(Tok::LParen);
        expect(Tok::RParen);
        auto e = make_expr(ExprKind::Clone, pos);
        e->name = name;
        return e;
      }
      fail("unknown member '" + member + "'");
    }
    auto e = make_expr(ExprKind::Var, pos);
    e->name = name;
    return e;
  }

  std::unique_ptr<Expr> parse_builtin(const std::string& callee, SourcePos pos) {
    ExprKind kind;
    if (callee == "len") kind = ExprKind::Len;
    else if (callee == "sort") kind = ExprKind::Sort;
    else if (callee == "clone") kind = ExprKind::Clone;
    else if (callee == "binarySearch") kind = ExprKind::BinarySearch;
    else throw MinilangError(ErrorKind::SyntaxError, pos, "unknown function '" + callee + "'");

    auto e = make_expr(kind, pos);
    e->name = expect_ident("(array argument)");
    if (kind == ExprKind::BinarySearch) {
      expect(Tok::Comma, "in binarySearch call");
      e->lhs = parse_expr();
    }
    expect(Tok::RParen, "to close call");
    return e;
  }

  std::string_view source_;
  std::vector<Token> toks_;
  std::vector<detail::Comment> comments_;
  std::size_t pos_ = 0;
};

void check_signature(const FunctionDef& fn, Type expected_return) {
  auto bad = [&](const std::string& why) {
    throw MinilangError(ErrorKind::BadSignature, fn.pos, "'" + fn.name + "': " + why);
  };
  if (fn.return_type != expected_return) {
    bad("must return " + std::string(type_name(expected_return)));
  }
  if (fn.params.size() != 3) bad("must take exactly three parameters (int[] a, int[] b, int[] c)");
  for (const auto& p : fn.params) {
    if (p.type != Type::IntArray) bad("parameter '" + p.name + "' must have type int[]");
  }
  if (fn.params[0].name == fn.params[1].name || fn.params[0].name == fn.params[2].name ||
      fn.params[1].name == fn.params[2].name) {
    bad("parameter names must be distinct");
  }
}

}  // namespace

Program parse(std::string_view source, ParseOptions options) {
  Parser parser(source, detail::lex(source));
  Program program = parser.parse_program();

  std::set<std::string> seen;
  for (const auto& fn : program.functions) {
    if (!seen.insert(fn.name).second) {
      throw MinilangError(ErrorKind::DuplicateFunction, fn.pos,
                          "function '" + fn.name + "' is defined more than once");
    }
    if (fn.name == "foo") {
      check_signature(fn, Type::Int);
    } else if (fn.name == "precondition") {
      check_signature(fn, Type::Bool);
    } else {
      throw MinilangError(ErrorKind::BadSignature, fn.pos,
                          "unexpected function '" + fn.name +
                              "': only 'foo' and 'precondition' may be defined");
    }
  }
  if (!options.allow_missing_foo && program.find("foo") == nullptr) {
    throw MinilangError(ErrorKind::MissingFoo, SourcePos{1, 1}, "program does not define 'foo'");
  }
  if (program.functions.empty()) {
    throw MinilangError(ErrorKind::MissingFoo, SourcePos{1, 1}, "program defines no functions");
  }
  return program;
}

ProgramPtr load_program(std::string_view source, ParseOptions options) {
  Program program = parse(source, options);
  typecheck(program);
  return std::make_shared<const Program>(std::move(program));
}

std::string attach_precondition(const Program& program, std::string_view precondition_source) {
  std::string out(program.function_source(program.foo()));
  out += "\n\n";
  out += precondition_source;
  if (!out.empty() && out.back() != '\n') out += '\n';
  return out;
}

}  // namespace fuzzfeed::minilang
