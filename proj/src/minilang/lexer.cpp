#include "lexer.hpp"

#include <cctype>
#include <unordered_map>

#include "fuzzfeed/minilang/diagnostics.hpp"

namespace fuzzfeed::minilang::detail {

namespace {

const std::unordered_map<std::string_view, Tok>& keywords() {
  static const std::unordered_map<std::string_view, Tok> table = {
      {"int", Tok::KwInt},       {"bool", Tok::KwBool},     {"boolean", Tok::KwBool},
      {"while", Tok::KwWhile},   {"for", Tok::KwFor},       {"if", Tok::KwIf},
      {"else", Tok::KwElse},     {"throw", Tok::KwThrow},   {"return", Tok::KwReturn},
      {"true", Tok::KwTrue},     {"false", Tok::KwFalse},
  };
  return table;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  LexResult run() {
    LexResult out;
    for (;;) {
      skip_space_and_comments(out.comments);
      Token tok;
      tok.comment_begin = pending_comments_;
      tok.comment_end = out.comments.size();
      pending_comments_ = out.comments.size();
      tok.pos = {line_, column()};
      tok.offset = pos_;
      if (pos_ >= src_.size()) {
        tok.kind = Tok::End;
        tok.end_offset = pos_;
        out.tokens.push_back(std::move(tok));
        return out;
      }
      lex_one(tok);
      tok.end_offset = pos_;
      out.tokens.push_back(std::move(tok));
    }
  }

 private:
  int column() const { return static_cast<int>(pos_ - line_start_) + 1; }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip_space_and_comments(std::vector<Comment>& comments) {
    while (pos_ < src_.size()) {
      char ch = peek();
      if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else if (ch == '/' && peek(1) == '/') {
        Comment c{line_, pos_, {}};
        std::size_t start = pos_ + 2;
        while (pos_ < src_.size() && peek() != '\n') advance();
        c.text = trim(src_.substr(start, pos_ - start));
        comments.push_back(std::move(c));
      } else if (ch == '/' && peek(1) == '*') {
        Comment c{line_, pos_, {}};
        SourcePos open{line_, column()};
        advance();
        advance();
        std::size_t start = pos_;
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) {
          throw MinilangError(ErrorKind::SyntaxError, open, "unterminated block comment");
        }
        c.text = trim(src_.substr(start, pos_ - start));
        advance();
        advance();
        comments.push_back(std::move(c));
      } else {
        return;
      }
    }
  }

  void lex_one(Token& tok) {
    char ch = peek();
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t start = pos_;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      tok.text = std::string(src_.substr(start, pos_ - start));
      auto it = keywords().find(tok.text);
      tok.kind = it == keywords().end() ? Tok::Ident : it->second;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t start = pos_;
      std::int64_t value = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        value = value * 10 + (peek() - '0');
        if (value > 2147483648LL) {
          throw MinilangError(ErrorKind::SyntaxError, tok.pos, "integer literal out of 32-bit range");
        }
        advance();
      }
      if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') {
        throw MinilangError(ErrorKind::SyntaxError, tok.pos, "malformed integer literal");
      }
      tok.kind = Tok::IntLit;
      tok.int_value = value;
      tok.text = std::string(src_.substr(start, pos_ - start));
      return;
    }

    auto two = [&](char second, Tok both, Tok single) {
      advance();
      if (peek() == second) {
        advance();
        tok.kind = both;
      } else {
        tok.kind = single;
      }
    };

    switch (ch) {
      case '(': advance(); tok.kind = Tok::LParen; break;
      case ')': advance(); tok.kind = Tok::RParen; break;
      case '{': advance(); tok.kind = Tok::LBrace; break;
      case '}': advance(); tok.kind = Tok::RBrace; break;
      case '[': advance(); tok.kind = Tok::LBracket; break;
      case ']': advance(); tok.kind = Tok::RBracket; break;
      case ';': advance(); tok.kind = Tok::Semi; break;
      case ',': advance(); tok.kind = Tok::Comma; break;
      case '.': advance(); tok.kind = Tok::Dot; break;
      case '*': advance(); tok.kind = Tok::Star; break;
      case '/': advance(); tok.kind = Tok::Slash; break;
      case '%': advance(); tok.kind = Tok::Percent; break;
      case '<': two('=', Tok::Le, Tok::Lt); break;
      case '>': two('=', Tok::Ge, Tok::Gt); break;
      case '!': two('=', Tok::Ne, Tok::Bang); break;
      case '=': two('=', Tok::EqEq, Tok::Assign); break;
      case '+':
        advance();
        if (peek() == '+') {
          advance();
          tok.kind = Tok::PlusPlus;
        } else if (peek() == '=') {
          advance();
          tok.kind = Tok::PlusAssign;
        } else {
          tok.kind = Tok::Plus;
        }
        break;
      case '-':
        advance();
        if (peek() == '-') {
          advance();
          tok.kind = Tok::MinusMinus;
        } else if (peek() == '=') {
          advance();
          tok.kind = Tok::MinusAssign;
        } else {
          tok.kind = Tok::Minus;
        }
        break;
      case '&':
        if (peek(1) != '&') {
          throw MinilangError(ErrorKind::SyntaxError, tok.pos, "expected '&&'");
        }
        advance();
        advance();
        tok.kind = Tok::AndAnd;
        break;
      case '|':
        if (peek(1) != '|') {
          throw MinilangError(ErrorKind::SyntaxError, tok.pos, "expected '||'");
        }
        advance();
        advance();
        tok.kind = Tok::OrOr;
        break;
      default:
        throw MinilangError(ErrorKind::SyntaxError, tok.pos,
                            std::string("unexpected character '") + ch + "'");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
  std::size_t pending_comments_ = 0;
};

}  // namespace

LexResult lex(std::string_view source) { return Lexer(source).run(); }

std::string_view token_name(Tok kind) {
  switch (kind) {
    case Tok::Ident: return "identifier";
    case Tok::IntLit: return "integer literal";
    case Tok::KwInt: return "'int'";
    case Tok::KwBool: return "'bool'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwFor: return "'for'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwThrow: return "'throw'";
    case Tok::KwReturn: return "'return'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Assign: return "'='";
    case Tok::PlusAssign: return "'+='";
    case Tok::MinusAssign: return "'-='";
    case Tok::PlusPlus: return "'++'";
    case Tok::MinusMinus: return "'--'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
    case Tok::End: return "end of input";
  }
  return "?";
}

}  // namespace fuzzfeed::minilang::detail
