#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzfeed/minilang/ast.hpp"

namespace fuzzfeed::minilang::detail {

enum class Tok {
  Ident,
  IntLit,
  // keywords
  KwInt,
  KwBool,
  KwWhile,
  KwFor,
  KwIf,
  KwElse,
  KwThrow,
  KwReturn,
  KwTrue,
  KwFalse,
  // punctuation
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Semi,
  Comma,
  Dot,
  Assign,
  PlusAssign,
  MinusAssign,
  PlusPlus,
  MinusMinus,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Ne,
  AndAnd,
  OrOr,
  Bang,
  End,
};

struct Comment {
  int line = 0;
  std::size_t offset = 0;
  std::string text;  // without the comment markers, trimmed
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t int_value = 0;
  SourcePos pos;
  std::size_t offset = 0;
  std::size_t end_offset = 0;
  // Comments between the previous token and this one: [comment_begin, comment_end).
  std::size_t comment_begin = 0;
  std::size_t comment_end = 0;
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<Comment> comments;
};

/// Throws MinilangError(SyntaxError) on stray characters.
LexResult lex(std::string_view source);

std::string_view token_name(Tok kind);

}  // namespace fuzzfeed::minilang::detail
