#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flucid/ast.hpp"

namespace flucid {

enum class TokKind {
  ident,
  keyword,
  integer,
  real,
  string,
  character,
  punct,
  ctx_op,    // \union, \in, ...; text without the backslash
  zero_obs,  // \0 or \O
  inf_pos,
  inf_neg,
  end,
};

struct Token {
  TokKind kind = TokKind::end;
  std::string text;
  Span span;
  bool space_before = false;  // whitespace or comment precedes the token
  Value value;                // literal payload
};

bool is_keyword(std::string_view word);
bool is_context_operator(std::string_view word);

// Throws SyntaxError on the first lexical error.
std::vector<Token> tokenize(std::string_view source);

std::string describe(const Token& t);

}  // namespace flucid
