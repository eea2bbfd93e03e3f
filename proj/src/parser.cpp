#include "flucid/parser.hpp"

#include <algorithm>
#include <set>

namespace flucid {

std::string format_diagnostic(const Diagnostic& d) {
  std::string sev = d.severity == Diagnostic::Severity::error ? "error" : "warning";
  return sev + "\t" + d.code + "\t" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + "+" +
         std::to_string(d.span.length) + "@" + std::to_string(d.span.offset) + "\t" + d.message;
}

NodePtr make_node(NodeKind k, Span s, std::string text) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->span = s;
  n->text = std::move(text);
  return n;
}

namespace {
bool same_list(const std::vector<NodePtr>& a, const std::vector<NodePtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i] || !b[i]) {
      if (a[i] != b[i]) return false;
      continue;
    }
    if (!same_tree(*a[i], *b[i])) return false;
  }
  return true;
}
}  // namespace

bool same_tree(const Node& a, const Node& b) {
  return a.kind == b.kind && a.text == b.text && a.dim == b.dim && a.literal == b.literal &&
         a.flags == b.flags && a.names == b.names && a.seps == b.seps && a.mods == b.mods &&
         a.dparams == b.dparams && a.params == b.params && same_list(a.kids, b.kids) &&
         same_list(a.decls, b.decls);
}

NodePtr clone_tree(const Node& n) {
  auto c = std::make_shared<Node>(n);
  for (auto& k : c->kids)
    if (k) k = clone_tree(*k);
  for (auto& d : c->decls)
    if (d) d = clone_tree(*d);
  return c;
}

std::string node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::literal: return "literal";
    case NodeKind::no_obs: return "no-observation";
    case NodeKind::zero_obs: return "zero-observation";
    case NodeKind::ident: return "identifier";
    case NodeKind::hash: return "#";
    case NodeKind::unary: return "unary";
    case NodeKind::binary: return "binary";
    case NodeKind::call: return "call";
    case NodeKind::subscript: return "subscript";
    case NodeKind::dot: return "dot";
    case NodeKind::if_expr: return "if";
    case NodeKind::where: return "where";
    case NodeKind::bracket: return "context";
    case NodeKind::brace: return "set";
    case NodeKind::tuple: return "tuple";
    case NodeKind::angle: return "angle tuple";
    case NodeKind::annot: return "annotation";
    case NodeKind::select: return "select";
    case NodeKind::embed: return "embed";
    case NodeKind::box: return "Box";
    case NodeKind::dim_decl: return "dimension declaration";
    case NodeKind::id_decl: return "identifier declaration";
    case NodeKind::func_decl: return "function declaration";
    case NodeKind::obs_decl: return "forensic declaration";
    case NodeKind::program: return "program";
  }
  return "?";
}

namespace {

const std::set<std::string> unary_words = {"first", "next",  "prev",  "last", "second", "prelast", "nnext",
                                           "nprev", "iseod", "isbod", "neg",  "not",    "bel",     "pl"};
const std::set<std::string> fby_words = {"fby", "pby"};
const std::set<std::string> wvr_words = {"wvr",  "rwvr", "nwvr",  "nrwvr", "asa",   "nasa",
                                         "ala",  "nala", "upon",  "rupon", "nupon", "nrupon"};
const std::set<std::string> or_words = {"||", "or", "nor", "xor", "nxor", "bor", "bxor"};
const std::set<std::string> and_words = {"&&", "and", "nand", "band"};
const std::set<std::string> rel_ops = {"==", "!=", "<", "<=", ">", ">="};
const std::set<std::string> tagset_mods = {"ordered",  "unordered", "finite",
                                           "infinite", "periodic",  "nonperiodic"};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), toks_(tokenize(src)) {}

  NodePtr program() {
    auto prog = make_node(NodeKind::program, peek().span);
    while (peek().kind != TokKind::end) {
      if (auto d = try_decl()) {
        prog->decls.push_back(d);
        continue;
      }
      const Token& start = peek();
      auto e = expr();
      if (!prog->kids.empty()) fail(start, "P002", "a program has at most one result expression");
      prog->kids.push_back(e);
      accept_punct(";");
    }
    if (prog->kids.empty() && prog->decls.empty()) fail(peek(), "P001", "empty program");
    prog->span = whole_span();
    return prog;
  }

  NodePtr expression_only() {
    auto e = expr();
    if (peek().kind != TokKind::end) fail(peek(), "P001", "expected end of input, found " + describe(peek()));
    return e;
  }

 private:
  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t i_ = 0;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  bool is_punct(std::string_view s, std::size_t k = 0) const {
    const auto& t = peek(k);
    return t.kind == TokKind::punct && t.text == s;
  }
  bool is_kw(std::string_view s, std::size_t k = 0) const {
    const auto& t = peek(k);
    return t.kind == TokKind::keyword && t.text == s;
  }
  bool is_word(std::string_view s, std::size_t k = 0) const {
    const auto& t = peek(k);
    return t.kind == TokKind::ident && t.text == s;
  }
  const Token& take() {
    const Token& t = toks_[i_];
    if (t.kind != TokKind::end) ++i_;
    return t;
  }
  bool accept_punct(std::string_view s) {
    if (!is_punct(s)) return false;
    take();
    return true;
  }
  bool accept_kw(std::string_view s) {
    if (!is_kw(s)) return false;
    take();
    return true;
  }
  const Token& expect_punct(std::string_view s) {
    if (!is_punct(s)) fail(peek(), "P001", "expected '" + std::string(s) + "', found " + describe(peek()));
    return take();
  }
  const Token& expect_kw(std::string_view s) {
    if (!is_kw(s)) fail(peek(), "P001", "expected '" + std::string(s) + "', found " + describe(peek()));
    return take();
  }
  std::string expect_ident(const std::string& what) {
    if (peek().kind != TokKind::ident) fail(peek(), "P001", "expected " + what + ", found " + describe(peek()));
    return take().text;
  }

  [[noreturn]] void fail(const Token& at, const std::string& code, const std::string& msg) const {
    Diagnostic d;
    d.code = code;
    d.message = msg;
    d.span = at.span;
    if (!src_.empty() && d.span.offset >= src_.size()) {
      // end of input: point at the last byte
      d.span.offset = src_.size() - 1;
      d.span.length = 1;
      int line = 1;
      std::size_t ls = 0;
      for (std::size_t k = 0; k < d.span.offset; ++k)
        if (src_[k] == '\n') {
          ++line;
          ls = k + 1;
        }
      d.span.line = line;
      d.span.column = static_cast<int>(d.span.offset - ls) + 1;
    }
    throw SyntaxError(d);
  }

  // span from `start` to the end of the last consumed token
  Span from(const Span& start) const {
    Span s = start;
    if (i_ == 0) return s;
    const Span& last = toks_[i_ - 1].span;
    std::size_t end = last.offset + last.length;
    s.length = end > start.offset ? end - start.offset : std::max<std::size_t>(start.length, 1);
    return s;
  }
  Span whole_span() const {
    Span s{1, 1, 0, std::max<std::size_t>(1, src_.size())};
    return s;
  }

  std::string dim_suffix() {
    if (is_punct(".") && !peek().space_before && peek(1).kind == TokKind::ident && !peek(1).space_before) {
      take();
      return take().text;
    }
    return {};
  }

  // ---- declarations ----

  NodePtr try_decl() {
    if (is_kw("dimension")) return dim_decl();
    if (is_kw("observation") || is_kw("evidential")) return obs_decl();
    if (peek().kind == TokKind::ident) {
      if (is_punct("=", 1)) {
        Span s = peek().span;
        auto n = make_node(NodeKind::id_decl, s, take().text);
        take();
        n->kids.push_back(expr());
        expect_punct(";");
        n->span = from(s);
        return n;
      }
      return try_func_decl();
    }
    return nullptr;
  }

  std::vector<std::string> ident_list(std::string_view close, bool& ok) {
    std::vector<std::string> out;
    take();  // opening bracket
    if (is_punct(close)) {
      take();
      return out;
    }
    while (true) {
      if (peek().kind != TokKind::ident) {
        ok = false;
        return out;
      }
      out.push_back(take().text);
      if (is_punct(close)) {
        take();
        return out;
      }
      if (!accept_punct(",")) {
        ok = false;
        return out;
      }
    }
  }

  NodePtr try_func_decl() {
    std::size_t save = i_;
    Span s = peek().span;
    auto n = make_node(NodeKind::func_decl, s, take().text);
    bool ok = true;
    if (is_punct("[")) {
      n->dparams = ident_list("]", ok);
      n->flags |= flag_has_dparams;
    }
    if (ok && is_punct("(")) {
      n->params = ident_list(")", ok);
      n->flags |= flag_has_params;
    }
    if (!ok || !(n->flags & (flag_has_dparams | flag_has_params)) || !(is_punct("=") || is_kw("where"))) {
      i_ = save;
      return nullptr;
    }
    if (accept_punct("=")) {
      n->kids.push_back(expr());
      expect_punct(";");
    } else {
      const Token& w = take();
      n->flags |= flag_where_form;
      NodePtr result;
      body(*n, true, &result, w);
      if (result) n->kids.push_back(result);
      expect_punct(";");
    }
    n->span = from(s);
    return n;
  }

  // declarations (and, for function bodies, one result expression) up to `end`
  void body(Node& owner, bool allow_result, NodePtr* result, const Token& where_tok) {
    while (!is_kw("end")) {
      if (peek().kind == TokKind::end) fail(peek(), "P001", "expected 'end' to close the where clause");
      if (auto d = try_decl()) {
        owner.decls.push_back(d);
        continue;
      }
      if (!allow_result) fail(peek(), "P001", "expected a declaration, found " + describe(peek()));
      const Token& start = peek();
      auto e = expr();
      if (*result) fail(start, "P002", "a function body has at most one result expression");
      *result = e;
      if (!is_kw("end")) expect_punct(";");
    }
    if (owner.decls.empty() && !(result && *result))
      fail(peek(), "P003", "where clause needs at least one declaration");
    (void)where_tok;
    take();  // end
  }

  NodePtr dim_decl() {
    Span s = take().span;
    auto n = make_node(NodeKind::dim_decl, s);
    n->names.push_back(expect_ident("a dimension name"));
    while (accept_punct(",")) n->names.push_back(expect_ident("a dimension name"));
    if (accept_punct(":")) {
      n->flags |= flag_has_spec;
      while (peek().kind == TokKind::keyword && tagset_mods.count(peek().text)) n->mods.push_back(take().text);
      if (accept_punct("{")) {
        if (!accept_punct("}")) {
          auto first = expr();
          if (is_word("to")) {
            take();
            n->flags |= flag_range;
            n->kids.push_back(first);
            n->kids.push_back(expr());
            if (is_word("step")) {
              take();
              n->flags |= flag_step;
              n->kids.push_back(expr());
            }
          } else {
            n->kids.push_back(first);
            while (accept_punct(",")) n->kids.push_back(expr());
          }
          expect_punct("}");
        }
      } else if (accept_punct("=")) {
        n->flags |= flag_equals;
        n->kids.push_back(expr());
      }
    }
    expect_punct(";");
    n->span = from(s);
    return n;
  }

  NodePtr obs_decl() {
    const Token& head = take();
    Span s = head.span;
    auto n = make_node(NodeKind::obs_decl, s);
    auto is_mod = [&](std::size_t k) {
      return peek(k).kind == TokKind::keyword && tagset_mods.count(peek(k).text) > 0;
    };
    if (head.text == "observation") {
      if (is_word("sequence") && (peek(1).kind == TokKind::ident || is_mod(1))) {
        take();
        n->flags |= flag_sequence;
      }
    } else {
      if (!is_word("statement")) fail(peek(), "P001", "expected 'statement' after 'evidential'");
      take();
      n->flags |= flag_statement;
    }
    while (is_mod(0)) n->mods.push_back(take().text);
    n->text = expect_ident("a declared name");
    if (accept_punct("=")) n->kids.push_back(expr());
    expect_punct(";");
    n->span = from(s);
    return n;
  }

  // ---- expressions ----

  NodePtr expr() {
    Span s = peek().span;
    auto e = context_level();
    if (is_kw("where")) {
      const Token& w = take();
      auto n = make_node(NodeKind::where, s);
      n->kids.push_back(e);
      body(*n, false, nullptr, w);
      n->span = from(s);
      return n;
    }
    return e;
  }

  NodePtr binary(const std::string& op, std::string dim, NodePtr a, NodePtr b, Span s) {
    auto n = make_node(NodeKind::binary, s, op);
    n->dim = std::move(dim);
    n->kids = {std::move(a), std::move(b)};
    n->span = from(s);
    return n;
  }

  NodePtr context_level() {
    Span s = peek().span;
    auto left = fby_level();
    while (true) {
      std::string op;
      if (peek().kind == TokKind::ctx_op)
        op = "\\" + take().text;
      else if (is_kw("combine") || is_kw("product"))
        op = take().text;
      else
        break;
      left = binary(op, {}, left, fby_level(), s);
    }
    return left;
  }

  NodePtr fby_level() {
    Span s = peek().span;
    auto left = wvr_level();
    if (peek().kind == TokKind::keyword && fby_words.count(peek().text)) {
      std::string op = take().text;
      std::string d = dim_suffix();
      return binary(op, d, left, fby_level(), s);
    }
    return left;
  }

  NodePtr wvr_level() {
    Span s = peek().span;
    auto left = at_level();
    while (peek().kind == TokKind::keyword && wvr_words.count(peek().text)) {
      std::string op = take().text;
      std::string d = dim_suffix();
      left = binary(op, d, left, at_level(), s);
    }
    return left;
  }

  NodePtr at_level() {
    Span s = peek().span;
    auto left = or_level();
    while (is_punct("@")) {
      take();
      std::string d = dim_suffix();
      left = binary("@", d, left, or_level(), s);
    }
    return left;
  }

  bool at_op(const std::set<std::string>& ops) const {
    const auto& t = peek();
    return (t.kind == TokKind::punct || t.kind == TokKind::keyword) && ops.count(t.text);
  }

  NodePtr or_level() {
    Span s = peek().span;
    auto left = and_level();
    while (at_op(or_words)) {
      std::string op = take().text;
      left = binary(op, {}, left, and_level(), s);
    }
    return left;
  }

  NodePtr and_level() {
    Span s = peek().span;
    auto left = rel_level();
    while (at_op(and_words)) {
      std::string op = take().text;
      left = binary(op, {}, left, rel_level(), s);
    }
    return left;
  }

  NodePtr rel_level() {
    Span s = peek().span;
    auto left = add_level();
    while (peek().kind == TokKind::punct && rel_ops.count(peek().text)) {
      std::string op = take().text;
      left = binary(op, {}, left, add_level(), s);
    }
    return left;
  }

  NodePtr add_level() {
    Span s = peek().span;
    auto left = mul_level();
    while (is_punct("+") || is_punct("-") || is_punct("^")) {
      std::string op = take().text;
      left = binary(op, {}, left, mul_level(), s);
    }
    return left;
  }

  NodePtr mul_level() {
    Span s = peek().span;
    auto left = unary_level();
    while (is_punct("*") || is_punct("/") || is_punct("%")) {
      std::string op = take().text;
      left = binary(op, {}, left, unary_level(), s);
    }
    return left;
  }

  std::vector<NodePtr> arg_list() {
    std::vector<NodePtr> args;
    expect_punct("(");
    if (accept_punct(")")) return args;
    args.push_back(element());
    while (accept_punct(",")) args.push_back(element());
    expect_punct(")");
    return args;
  }

  NodePtr unary_level() {
    Span s = peek().span;
    if (is_punct("-") || is_punct("!")) {
      std::string op = take().text;
      auto n = make_node(NodeKind::unary, s, op);
      n->kids.push_back(unary_level());
      n->span = from(s);
      return n;
    }
    if (peek().kind == TokKind::keyword && unary_words.count(peek().text)) {
      std::string op = take().text;
      auto n = make_node(NodeKind::unary, s, op);
      n->dim = dim_suffix();
      if ((op == "bel" || op == "pl") && is_punct("(")) {
        n->kids = arg_list();
        if (n->kids.empty() || n->kids.size() > 2)
          fail(toks_[i_ - 1], "P004", op + " takes one or two arguments");
        n->span = from(s);
        return postfix(n, s);
      }
      n->kids.push_back(unary_level());
      n->span = from(s);
      return n;
    }
    if ((is_kw("combine") || is_kw("product")) && is_punct("(", 1)) {
      std::string op = take().text;
      auto args = arg_list();
      if (args.size() != 2) fail(toks_[i_ - 1], "P004", op + " takes two arguments");
      return postfix(binary(op, {}, args[0], args[1], s), s);
    }
    return postfix(primary(), s);
  }

  static bool callable_base(const Node& n) {
    switch (n.kind) {
      case NodeKind::ident:
      case NodeKind::subscript:
      case NodeKind::bracket:
      case NodeKind::call:
      case NodeKind::dot: return true;
      default: return false;
    }
  }

  NodePtr postfix(NodePtr base, Span s) {
    while (true) {
      if (is_punct("(") && callable_base(*base)) {
        auto n = make_node(NodeKind::call, s);
        n->kids.push_back(base);
        auto args = arg_list();
        n->kids.insert(n->kids.end(), args.begin(), args.end());
        n->span = from(s);
        base = n;
      } else if (is_punct("[") && !peek().space_before && base->kind == NodeKind::ident) {
        take();
        auto n = make_node(NodeKind::subscript, s);
        n->kids.push_back(base);
        if (!is_punct("]")) {
          n->kids.push_back(expr());
          while (accept_punct(",")) n->kids.push_back(expr());
        }
        expect_punct("]");
        n->span = from(s);
        base = n;
      } else if (is_punct(".") && !peek().space_before) {
        take();
        auto n = make_node(NodeKind::dot, s);
        n->kids.push_back(base);
        const Token& m = peek();
        if (!m.space_before && m.kind == TokKind::ident) {
          n->text = take().text;
        } else if (!m.space_before && m.kind == TokKind::punct && (m.text == "#" || m.text == "##")) {
          n->text = take().text;
        }
        n->span = from(s);
        base = n;
      } else if (is_punct("<") && !peek().space_before && base->kind == NodeKind::ident) {
        if (auto a = try_angle(base, s)) {
          base = a;
        } else {
          break;
        }
      } else {
        break;
      }
    }
    return base;
  }

  NodePtr try_angle(const NodePtr& base, Span s) {
    std::size_t save = i_;
    try {
      take();
      auto n = make_node(NodeKind::angle, s);
      n->kids.push_back(base);
      n->kids.push_back(add_level());
      while (accept_punct(",")) n->kids.push_back(add_level());
      if (!accept_punct(">")) {
        i_ = save;
        return nullptr;
      }
      n->span = from(s);
      return n;
    } catch (const SyntaxError&) {
      i_ = save;
      return nullptr;
    }
  }

  NodePtr element() {
    Span s = peek().span;
    auto e = expr();
    if (accept_punct("=>")) {
      auto n = make_node(NodeKind::annot, s);
      n->kids = {e, expr()};
      n->span = from(s);
      return n;
    }
    return e;
  }

  NodePtr literal(const Token& t) {
    auto n = make_node(NodeKind::literal, t.span, t.text);
    n->literal = t.value;
    n->text.clear();
    return n;
  }

  NodePtr primary() {
    const Token& t = peek();
    Span s = t.span;
    switch (t.kind) {
      case TokKind::integer:
      case TokKind::real:
      case TokKind::string:
      case TokKind::character:
      case TokKind::inf_pos:
      case TokKind::inf_neg: return literal(take());
      case TokKind::ident: return make_node(NodeKind::ident, take().span, t.text);
      case TokKind::zero_obs: {
        auto n = make_node(NodeKind::zero_obs, s, take().text);
        if (is_punct("(") && !peek().space_before) {
          take();
          n->kids.push_back(expr());
          expect_punct(")");
        }
        n->span = from(s);
        return n;
      }
      case TokKind::keyword: {
        if (t.text == "true" || t.text == "false") {
          auto n = make_node(NodeKind::literal, take().span);
          n->literal = Value(t.text == "true");
          return n;
        }
        if (t.text == "eod" || t.text == "bod") {
          auto n = make_node(NodeKind::literal, take().span);
          n->literal = t.text == "eod" ? Value::eod() : Value::bod();
          return n;
        }
        if (t.text == "if") return if_expr();
        if (t.text == "select") {
          take();
          auto n = make_node(NodeKind::select, s);
          n->kids = arg_list();
          if (n->kids.size() != 2) fail(toks_[i_ - 1], "P004", "select takes two arguments");
          n->span = from(s);
          return n;
        }
        if (t.text == "embed") {
          take();
          auto n = make_node(NodeKind::embed, s);
          n->kids = arg_list();
          if (n->kids.empty()) fail(toks_[i_ - 1], "P004", "embed needs at least one argument");
          n->span = from(s);
          return n;
        }
        if (t.text == "Box") {
          take();
          auto n = make_node(NodeKind::box, s);
          expect_punct("[");
          n->kids.push_back(expr());
          while (accept_punct(",")) n->kids.push_back(expr());
          expect_punct("|");
          n->kids.push_back(expr());
          expect_punct("]");
          n->span = from(s);
          return n;
        }
        fail(t, "P001", "expected an expression, found " + describe(t));
      }
      case TokKind::punct: {
        if (t.text == "$") return make_node(NodeKind::no_obs, take().span);
        if (t.text == "#") return hash();
        if (t.text == "(") return paren();
        if (t.text == "[") return bracket();
        if (t.text == "{") return brace();
        fail(t, "P001", "expected an expression, found " + describe(t));
      }
      default: fail(t, "P001", "expected an expression, found " + describe(t));
    }
  }

  NodePtr hash() {
    Span s = take().span;
    auto n = make_node(NodeKind::hash, s);
    if (is_punct(".") && !peek().space_before && !peek(1).space_before &&
        (peek(1).kind == TokKind::ident || is_punct("(", 1))) {
      take();
      n->flags |= flag_dotted;
      n->kids.push_back(primary());
    } else if (peek().kind == TokKind::ident && !peek().space_before) {
      n->kids.push_back(make_node(NodeKind::ident, peek().span, take().text));
    }
    n->span = from(s);
    return n;
  }

  NodePtr paren() {
    Span s = take().span;
    std::vector<NodePtr> items;
    items.push_back(element());
    while (accept_punct(",")) items.push_back(element());
    expect_punct(")");
    if (items.size() == 1) return items[0];
    if (items.size() > 5) fail(toks_[i_ - 1], "P005", "observation tuples take at most five components");
    auto n = make_node(NodeKind::tuple, s);
    n->kids = std::move(items);
    n->span = from(s);
    return n;
  }

  // `name:` or `name =>` where name may contain '-' joins without spaces
  bool bracket_dim(std::string& name, char& sep) {
    if (peek().kind != TokKind::ident) return false;
    std::string nm = peek().text;
    std::size_t k = 1;
    while (is_punct("-", k) && !peek(k).space_before && !peek(k + 1).space_before &&
           (peek(k + 1).kind == TokKind::ident || peek(k + 1).kind == TokKind::keyword ||
            peek(k + 1).kind == TokKind::integer)) {
      nm += "-" + peek(k + 1).text;
      k += 2;
    }
    if (!is_punct(":", k) && !is_punct("=>", k)) return false;
    sep = is_punct(":", k) ? ':' : '>';
    for (std::size_t j = 0; j <= k; ++j) take();
    name = nm;
    return true;
  }

  NodePtr bracket() {
    Span s = take().span;
    auto n = make_node(NodeKind::bracket, s);
    if (!accept_punct("]")) {
      while (true) {
        std::string name;
        char sep = 0;
        if (bracket_dim(name, sep)) {
          n->names.push_back(name);
          n->seps.push_back(sep);
          n->kids.push_back(expr());
        } else {
          n->names.emplace_back();
          n->seps.push_back(0);
          n->kids.push_back(element());
        }
        if (accept_punct("]")) break;
        if (!accept_punct(",")) fail(peek(), "P001", "expected ',' or ']', found " + describe(peek()));
      }
    }
    n->span = from(s);
    return n;
  }

  NodePtr brace() {
    Span s = take().span;
    auto n = make_node(NodeKind::brace, s);
    if (!accept_punct("}")) {
      n->kids.push_back(element());
      while (accept_punct(",")) n->kids.push_back(element());
      expect_punct("}");
    }
    n->span = from(s);
    return n;
  }

  NodePtr if_expr() {
    Span s = take().span;
    auto n = make_node(NodeKind::if_expr, s);
    n->kids.push_back(expr());
    accept_kw("then");
    n->kids.push_back(expr());
    if (is_punct(";") && is_kw("else", 1)) take();
    if (accept_kw("else")) n->kids.push_back(expr());
    if (is_punct(";") && is_kw("fi", 1)) take();
    accept_kw("fi");
    n->span = from(s);
    return n;
  }
};

}  // namespace

NodePtr parse_program(std::string_view source) { return Parser(source).program(); }
NodePtr parse_expression(std::string_view source) { return Parser(source).expression_only(); }

}  // namespace flucid
