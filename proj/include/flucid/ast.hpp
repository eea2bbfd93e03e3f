#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "flucid/value.hpp"

namespace flucid {

struct Span {
  int line = 0;
  int column = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct Diagnostic {
  enum class Severity { error, warning } severity = Severity::error;
  std::string code;
  std::string message;
  Span span;
};

// `severity<TAB>code<TAB>line:column+length@offset<TAB>message`
std::string format_diagnostic(const Diagnostic& d);

struct SyntaxError : std::runtime_error {
  Diagnostic diagnostic;
  explicit SyntaxError(Diagnostic d) : std::runtime_error(d.message), diagnostic(std::move(d)) {}
};

enum class NodeKind {
  // expressions
  literal,      // literal: int, real, bool, string, char, sentinel
  no_obs,       // $
  zero_obs,     // \0 or \0(E); text holds the spelling
  ident,
  hash,         // # ; kids[0] optional target; flag dotted for #.E
  unary,        // text = operator, dim = suffix; one kid (bel/pl may have two)
  binary,       // text = operator, dim = suffix
  call,         // kids[0] callee, rest arguments
  subscript,    // kids[0] base, rest indices
  dot,          // kids[0], text = member ("" trailing, "#", "##", name)
  if_expr,      // cond, then[, else]
  where,        // kids[0] expression, decls
  bracket,      // items; names[i] dimension or ""; seps[i] ':' or '>'
  brace,        // items
  tuple,        // observation tuple, arity 2..5
  angle,        // E<E,...>; kids[0] base
  annot,        // E => E
  select,
  embed,
  box,          // kids: dimension exprs..., condition last
  // declarations
  dim_decl,     // names, mods; flag range: kids from,to[,step]; flag equals: kids[0]; else tag list
  id_decl,      // text, kids[0]
  func_decl,    // text, dparams, params; kids[0] body (optional in where form), decls
  obs_decl,     // text, mods; kids[0] optional; flags: obs kind
  program,      // kids[0] optional expression, decls
};

enum NodeFlag : unsigned {
  flag_dotted = 1u << 0,      // #.E
  flag_range = 1u << 1,       // {a to b}
  flag_equals = 1u << 2,      // dimension d : ... = E
  flag_has_spec = 1u << 3,    // dimension d : ...
  flag_where_form = 1u << 4,  // f(x) where ... end;
  flag_has_dparams = 1u << 5, // f[..]
  flag_has_params = 1u << 6,  // f(..)
  flag_sequence = 1u << 7,    // observation sequence
  flag_statement = 1u << 8,   // evidential statement
  flag_step = 1u << 9,        // {a to b step c}
};

struct Node;
using NodePtr = std::shared_ptr<Node>;

struct Node {
  NodeKind kind = NodeKind::literal;
  Span span;
  std::string text;
  std::string dim;  // operator dimension suffix
  Value literal;
  unsigned flags = 0;
  std::vector<NodePtr> kids;
  std::vector<NodePtr> decls;
  std::vector<std::string> names;   // bracket item dims, dimension decl names
  std::vector<char> seps;           // bracket item separators
  std::vector<std::string> mods;    // ordered/finite/... keywords as written
  std::vector<std::string> dparams;
  std::vector<std::string> params;

  bool has(NodeFlag f) const { return (flags & f) != 0; }
};

NodePtr make_node(NodeKind k, Span s, std::string text = {});

// Structural equality ignoring spans.
bool same_tree(const Node& a, const Node& b);
NodePtr clone_tree(const Node& n);

std::string node_kind_name(NodeKind k);

}  // namespace flucid
