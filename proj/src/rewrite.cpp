#include <atomic>

#include "flucid/semantics.hpp"

namespace flucid {

namespace {

std::atomic<unsigned> fresh_counter{0};

class Builder {
 public:
  Builder(Span s, std::string dim) : s_(s), dim_(std::move(dim)) {}

  NodePtr num(std::int64_t v) const {
    auto n = make_node(NodeKind::literal, s_);
    n->literal = Value(v);
    return n;
  }
  NodePtr sentinel(Value v) const {
    auto n = make_node(NodeKind::literal, s_);
    n->literal = std::move(v);
    return n;
  }
  NodePtr id(const std::string& name) const { return make_node(NodeKind::ident, s_, name); }
  NodePtr hash() const {
    auto n = make_node(NodeKind::hash, s_);
    if (!dim_.empty()) n->kids.push_back(id(dim_));
    return n;
  }
  NodePtr bin(const std::string& op, NodePtr a, NodePtr b) const {
    auto n = make_node(NodeKind::binary, s_, op);
    n->kids = {std::move(a), std::move(b)};
    return n;
  }
  NodePtr at(NodePtr x, NodePtr i) const {
    auto n = bin("@", std::move(x), std::move(i));
    n->dim = dim_;
    return n;
  }
  NodePtr un(const std::string& op, NodePtr a) const {
    auto n = make_node(NodeKind::unary, s_, op);
    n->kids = {std::move(a)};
    return n;
  }
  NodePtr iff(NodePtr c, NodePtr t, NodePtr e) const {
    auto n = make_node(NodeKind::if_expr, s_);
    n->kids = {std::move(c), std::move(t), std::move(e)};
    return n;
  }
  NodePtr def(const std::string& name, NodePtr e) const {
    auto n = make_node(NodeKind::id_decl, s_, name);
    n->kids = {std::move(e)};
    return n;
  }
  NodePtr where(NodePtr e, std::vector<NodePtr> decls) const {
    auto n = make_node(NodeKind::where, s_);
    n->kids = {std::move(e)};
    n->decls = std::move(decls);
    return n;
  }
  // # + k
  NodePtr shift(std::int64_t k) const {
    if (k >= 0) return bin("+", hash(), num(k));
    return bin("-", hash(), num(-k));
  }
  std::string fresh(const std::string& base) const { return "rw" + std::to_string(++fresh_counter) + "_" + base; }

  // count(Z) = C @ 0 where C = if iseod Z then # else C @ (# + 1)
  NodePtr count(NodePtr z) const {
    std::string c = fresh("C");
    auto body = iff(un("iseod", std::move(z)), hash(), at(id(c), shift(1)));
    return where(at(id(c), num(0)), {def(c, body)});
  }

  // boundary outside the defined part of a derived stream
  NodePtr guard_negative(NodePtr e) const {
    return iff(bin("<", hash(), num(0)), sentinel(Value::bod()), std::move(e));
  }

 private:
  Span s_;
  std::string dim_;
};

NodePtr rewrite(const Node& n);

NodePtr whenever(const Builder& b, NodePtr x, NodePtr y, bool negate, bool reverse) {
  NodePtr cond = negate ? b.un("!", std::move(y)) : std::move(y);
  std::string u = b.fresh("U"), t = b.fresh("T");
  std::vector<NodePtr> decls;
  if (!reverse) {
    // U: first position at or after # where the condition holds
    decls.push_back(b.def(u, b.iff(cond, b.hash(), b.at(b.id(u), b.shift(1)))));
    auto step = b.iff(b.bin("==", b.hash(), b.num(0)), b.at(b.id(u), b.num(0)),
                      b.at(b.id(u), b.bin("+", b.at(b.id(t), b.shift(-1)), b.num(1))));
    decls.push_back(b.def(t, b.guard_negative(step)));
  } else {
    // U: last position at or before # where the condition holds
    std::string n = b.fresh("N");
    NodePtr ycount = b.count(cond->kind == NodeKind::unary && negate ? clone_tree(*cond->kids[0]) : clone_tree(*cond));
    decls.push_back(b.def(n, ycount));
    decls.push_back(b.def(u, b.iff(cond, b.hash(), b.at(b.id(u), b.shift(-1)))));
    auto step = b.iff(b.bin("==", b.hash(), b.num(0)), b.at(b.id(u), b.bin("-", b.id(n), b.num(1))),
                      b.at(b.id(u), b.bin("-", b.at(b.id(t), b.shift(-1)), b.num(1))));
    decls.push_back(b.def(t, b.guard_negative(step)));
  }
  return b.where(b.at(std::move(x), b.id(t)), std::move(decls));
}

NodePtr upon(const Builder& b, NodePtr x, NodePtr y, bool negate, bool reverse) {
  std::vector<NodePtr> decls;
  NodePtr xs = std::move(x), ys = std::move(y);
  if (reverse) {
    std::string xr = b.fresh("Xr"), yr = b.fresh("Yr");
    decls.push_back(b.def(xr, b.at(xs, b.bin("-", b.bin("-", b.count(clone_tree(*xs)), b.num(1)), b.hash()))));
    decls.push_back(b.def(yr, b.at(ys, b.bin("-", b.bin("-", b.count(clone_tree(*ys)), b.num(1)), b.hash()))));
    xs = b.id(xr);
    ys = b.id(yr);
  }
  auto advance = [&](NodePtr v) { return negate ? b.un("!", std::move(v)) : std::move(v); };
  std::string w = b.fresh("W");
  // W: how many times the left operand has advanced
  auto inc = b.iff(advance(b.at(clone_tree(*ys), b.shift(-1))), b.num(1), b.num(0));
  decls.push_back(b.def(w, b.iff(b.bin("==", b.hash(), b.num(0)), b.num(0),
                                 b.bin("+", b.at(b.id(w), b.shift(-1)), inc))));
  Value terminal = reverse ? Value::bod() : Value::eod();
  // an advance triggered by the final sample leaves the stream
  auto exhausted = b.bin("&&", b.bin("||", b.un("iseod", clone_tree(*ys)), b.un("isbod", clone_tree(*ys))),
                         advance(b.at(clone_tree(*ys), b.shift(-1))));
  auto body = b.iff(b.bin("==", b.hash(), b.num(0)), b.at(clone_tree(*xs), b.num(0)),
                    b.iff(exhausted, b.sentinel(terminal), b.at(xs, b.id(w))));
  return b.where(b.guard_negative(body), std::move(decls));
}

NodePtr rewrite_unary(const Node& n, NodePtr x) {
  Builder b(n.span, n.dim);
  const std::string& op = n.text;
  if (op == "first") return b.at(x, b.num(0));
  if (op == "second") return b.at(x, b.num(1));
  if (op == "next") return b.at(x, b.shift(1));
  if (op == "prev") return b.at(x, b.shift(-1));
  if (op == "nnext") return b.at(x, b.shift(2));
  if (op == "nprev") return b.at(x, b.shift(-2));
  if (op == "last") return b.at(x, b.bin("-", b.count(clone_tree(*x)), b.num(1)));
  if (op == "prelast") return b.at(x, b.bin("-", b.count(clone_tree(*x)), b.num(2)));
  if (op == "neg") return b.un("-", x);
  if (op == "not") return b.un("!", x);
  auto out = make_node(NodeKind::unary, n.span, n.text);
  out->dim = n.dim;
  out->kids = {x};
  return out;
}

NodePtr rewrite_binary(const Node& n, NodePtr x, NodePtr y) {
  Builder b(n.span, n.dim);
  const std::string& op = n.text;
  if (op == "fby") return b.iff(b.bin("==", b.hash(), b.num(0)), x, b.at(y, b.shift(-1)));
  if (op == "pby") {
    std::string cnt = b.fresh("N");
    auto body = b.iff(b.bin("<", b.hash(), b.id(cnt)), y,
                      b.iff(b.bin("==", b.hash(), b.id(cnt)), b.at(x, b.num(0)), b.sentinel(Value::eod())));
    return b.where(body, {b.def(cnt, b.count(clone_tree(*y)))});
  }
  if (op == "wvr") return whenever(b, x, y, false, false);
  if (op == "nwvr") return whenever(b, x, y, true, false);
  if (op == "rwvr") return whenever(b, x, y, false, true);
  if (op == "nrwvr") return whenever(b, x, y, true, true);
  if (op == "upon") return upon(b, x, y, false, false);
  if (op == "nupon") return upon(b, x, y, true, false);
  if (op == "rupon") return upon(b, x, y, false, true);
  if (op == "nrupon") return upon(b, x, y, true, true);
  if (op == "asa" || op == "nasa" || op == "ala" || op == "nala") {
    auto inner = make_node(NodeKind::binary, n.span, op[0] == 'n' ? "nwvr" : "wvr");
    inner->dim = n.dim;
    inner->kids = {x, y};
    auto outer = make_node(NodeKind::unary, n.span, (op == "asa" || op == "nasa") ? "first" : "last");
    outer->dim = n.dim;
    outer->kids = {inner};
    return rewrite(*outer);
  }
  if (op == "and") return b.bin("&&", x, y);
  if (op == "or") return b.bin("||", x, y);
  if (op == "xor") return b.bin("&&", b.bin("||", x, y), b.un("!", b.bin("&&", clone_tree(*x), clone_tree(*y))));
  auto out = make_node(NodeKind::binary, n.span, n.text);
  out->dim = n.dim;
  out->kids = {x, y};
  return out;
}

NodePtr rewrite(const Node& n) {
  auto copy = std::make_shared<Node>(n);
  for (auto& k : copy->kids)
    if (k) k = rewrite(*k);
  for (auto& d : copy->decls)
    if (d) d = rewrite(*d);
  if (n.kind == NodeKind::unary && n.kids.size() == 1) return rewrite_unary(n, copy->kids[0]);
  if (n.kind == NodeKind::binary) return rewrite_binary(n, copy->kids[0], copy->kids[1]);
  return copy;
}

}  // namespace

const std::set<std::string>& core_rewritable_operators() {
  static const std::set<std::string> ops = {
      "first", "second", "next",  "prev",   "nnext", "nprev", "last", "prelast", "neg",  "not",
      "fby",   "pby",    "wvr",   "nwvr",   "rwvr",  "nrwvr", "asa",  "nasa",    "ala",  "nala",
      "upon",  "nupon",  "rupon", "nrupon", "and",   "or",    "xor"};
  return ops;
}

NodePtr rewrite_to_core(const Node& tree) { return rewrite(tree); }

}  // namespace flucid
