#pragma once

#include <string>
#include <string_view>

#include "flucid/ast.hpp"
#include "flucid/lexer.hpp"

namespace flucid {

// Both throw SyntaxError carrying one spanned diagnostic.
NodePtr parse_program(std::string_view source);
NodePtr parse_expression(std::string_view source);

// Canonical concrete syntax; parse_program(pretty_print(t)) is structurally equal to t.
std::string pretty_print(const Node& tree);

}  // namespace flucid
