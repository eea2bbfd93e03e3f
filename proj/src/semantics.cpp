#include "flucid/semantics.hpp"

#include <algorithm>
#include <functional>

namespace flucid {

std::string entry_kind_name(EntryKind k) {
  switch (k) {
    case EntryKind::dim: return "dim";
    case EntryKind::cnst: return "const";
    case EntryKind::op: return "op";
    case EntryKind::var: return "var";
    case EntryKind::func: return "func";
    case EntryKind::cop: return "cop";
    case EntryKind::sop: return "sop";
    case EntryKind::odim: return "odim";
    case EntryKind::osdim: return "osdim";
    case EntryKind::esdim: return "esdim";
    case EntryKind::fop: return "fop";
  }
  return "?";
}

bool Analysis::ok() const { return error_count() == 0; }

std::size_t Analysis::error_count() const {
  return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) {
    return d.severity == Diagnostic::Severity::error;
  }));
}

const Entry* Analysis::entry_for(const Node* ident) const {
  auto it = resolution.find(ident);
  return it == resolution.end() ? nullptr : &entries[static_cast<std::size_t>(it->second)];
}

const Entry* Analysis::global(const std::string& name) const {
  if (scopes.empty()) return nullptr;
  auto it = scopes[0].names.find(name);
  return it == scopes[0].names.end() ? nullptr : &entries[static_cast<std::size_t>(it->second)];
}

namespace {

NodePtr lit(Value v, Span s) {
  auto n = make_node(NodeKind::literal, s);
  n->literal = std::move(v);
  return n;
}

// literal value of a node, folding a unary minus over a number
std::optional<Value> literal_of(const Node& n) {
  if (n.kind == NodeKind::literal) return n.literal;
  if (n.kind == NodeKind::unary && n.text == "-" && n.kids.size() == 1 && n.kids[0]->kind == NodeKind::literal) {
    const Value& v = n.kids[0]->literal;
    if (v.is_int()) return Value(-v.as_int());
    if (v.is_real()) return Value(-v.as_real());
  }
  return std::nullopt;
}

bool is_brace_of_brackets(const Node& n) {
  if (n.kind != NodeKind::brace || n.kids.empty()) return false;
  return std::all_of(n.kids.begin(), n.kids.end(), [](const NodePtr& k) { return k->kind == NodeKind::bracket; });
}

class Analyzer {
 public:
  explicit Analyzer(AnalyzeOptions o) : opt_(o) {}

  Analysis run(const Node& program) {
    collect_implicit(program);
    a_.implicit_dimensions = implicit_;
    int root = new_scope(-1, &program);
    declare_decls(root, program.decls);
    check_decls(root, program.decls);
    for (const auto& k : program.kids) check_expr(*k, root);
    return std::move(a_);
  }

 private:
  void diag(Diagnostic::Severity sev, const std::string& code, const std::string& msg, Span s) {
    a_.diagnostics.push_back(Diagnostic{sev, code, msg, s});
  }
  void error(const std::string& code, const std::string& msg, Span s) {
    diag(Diagnostic::Severity::error, code, msg, s);
  }

  int new_scope(int parent, const Node* owner) {
    a_.scopes.push_back(Scope{parent, owner, {}});
    return static_cast<int>(a_.scopes.size()) - 1;
  }

  int declare(int scope, const std::string& name, EntryKind kind, const Node* decl, Span s) {
    auto& names = a_.scopes[static_cast<std::size_t>(scope)].names;
    if (names.count(name)) {
      error("S002", "duplicate definition of '" + name + "'", s);
      return names[name];
    }
    Entry e;
    e.kind = kind;
    e.name = name;
    e.decl = decl;
    e.scope = scope;
    a_.entries.push_back(std::move(e));
    int id = static_cast<int>(a_.entries.size()) - 1;
    names[name] = id;
    return id;
  }

  std::optional<int> lookup(int scope, const std::string& name) {
    for (int s = scope; s >= 0; s = a_.scopes[static_cast<std::size_t>(s)].parent) {
      auto& names = a_.scopes[static_cast<std::size_t>(s)].names;
      auto it = names.find(name);
      if (it != names.end()) return it->second;
    }
    if (implicit_.count(name)) {
      int id = declare(0, name, EntryKind::dim, nullptr, {});
      a_.entries[static_cast<std::size_t>(id)].implicit = true;
      return id;
    }
    return std::nullopt;
  }

  void collect_implicit(const Node& n) {
    if (n.kind == NodeKind::bracket)
      for (const auto& name : n.names)
        if (!name.empty()) implicit_.insert(name);
    if (!n.dim.empty()) implicit_.insert(n.dim);
    for (const auto& k : n.kids)
      if (k) collect_implicit(*k);
    for (const auto& d : n.decls)
      if (d) collect_implicit(*d);
  }

  std::shared_ptr<const TagSet> static_tags(const Node& d) {
    if (!d.has(flag_has_spec)) return std::make_shared<const TagSet>(TagSet::naturals());
    if (d.has(flag_equals)) return nullptr;
    bool ordered = std::find(d.mods.begin(), d.mods.end(), "ordered") != d.mods.end();
    if (d.has(flag_range)) {
      std::vector<std::int64_t> xs;
      for (const auto& k : d.kids) {
        auto v = literal_of(*k);
        if (!v || !v->is_int()) return nullptr;
        xs.push_back(v->as_int());
      }
      try {
        return std::make_shared<const TagSet>(TagSet::range(xs[0], xs[1], xs.size() > 2 ? xs[2] : 1));
      } catch (const ValueError& e) {
        error("S008", e.what(), d.span);
        return nullptr;
      }
    }
    std::vector<Value> tags;
    for (const auto& k : d.kids) {
      auto v = literal_of(*k);
      if (!v) return nullptr;
      if (std::find(tags.begin(), tags.end(), *v) != tags.end()) {
        error("S008", "duplicate tag " + to_source(*v) + " in dimension " + d.names.front(), k->span);
        continue;
      }
      tags.push_back(*v);
    }
    return std::make_shared<const TagSet>(TagSet::of(std::move(tags), ordered));
  }

  ForensicTuple tuple_of(const Node& decl) {
    Span s = decl.span;
    ForensicTuple t{nullptr, lit(Value(1), s), lit(Value(0), s), lit(Value(1.0), s), lit(Value::eod(), s)};
    if (decl.kids.empty()) {
      t.property = make_node(NodeKind::no_obs, s);
      t.min = lit(Value(0), s);
      t.max = lit(Value::inf_pos(), s);
      return t;
    }
    const Node& e = *decl.kids[0];
    if (e.kind == NodeKind::tuple) {
      NodePtr* slots[] = {&t.property, &t.min, &t.max, &t.w, &t.t};
      for (std::size_t i = 0; i < e.kids.size() && i < 5; ++i) *slots[i] = e.kids[i];
    } else if (e.kind == NodeKind::no_obs) {
      t.property = decl.kids[0];
      t.min = lit(Value(0), s);
      t.max = lit(Value::inf_pos(), s);
    } else if (e.kind == NodeKind::zero_obs) {
      t.property = e.kids.empty() ? decl.kids[0] : e.kids[0];
      t.min = lit(Value(0), s);
    } else {
      t.property = decl.kids[0];
    }
    return t;
  }

  EntryKind kind_of_id(const Node& e) {
    if (e.kind == NodeKind::literal) return EntryKind::cnst;
    if (e.kind == NodeKind::bracket) return EntryKind::cop;
    if (is_brace_of_brackets(e)) return EntryKind::sop;
    if (e.kind == NodeKind::binary && (e.text == "combine" || e.text == "product")) return EntryKind::fop;
    if (e.kind == NodeKind::unary && (e.text == "bel" || e.text == "pl")) return EntryKind::fop;
    return EntryKind::var;
  }

  void declare_decls(int scope, const std::vector<NodePtr>& decls) {
    for (const auto& dp : decls) {
      const Node& d = *dp;
      switch (d.kind) {
        case NodeKind::dim_decl: {
          auto tags = static_tags(d);
          for (const auto& name : d.names) {
            int id = declare(scope, name, EntryKind::dim, &d, d.span);
            a_.entries[static_cast<std::size_t>(id)].tags = tags;
          }
          break;
        }
        case NodeKind::id_decl: declare(scope, d.text, kind_of_id(*d.kids[0]), &d, d.span); break;
        case NodeKind::func_decl: declare(scope, d.text, EntryKind::func, &d, d.span); break;
        case NodeKind::obs_decl: {
          EntryKind k = d.has(flag_statement) ? EntryKind::esdim
                        : d.has(flag_sequence) ? EntryKind::osdim
                                               : EntryKind::odim;
          int id = declare(scope, d.text, k, &d, d.span);
          if (k == EntryKind::odim) a_.entries[static_cast<std::size_t>(id)].tuple = tuple_of(d);
          break;
        }
        default: break;
      }
    }
  }

  void check_decls(int scope, const std::vector<NodePtr>& decls) {
    for (const auto& dp : decls) {
      const Node& d = *dp;
      switch (d.kind) {
        case NodeKind::dim_decl:
          for (const auto& k : d.kids) check_expr(*k, scope);
          break;
        case NodeKind::id_decl:
        case NodeKind::obs_decl:
          for (const auto& k : d.kids) check_expr(*k, scope);
          break;
        case NodeKind::func_decl: {
          int inner = new_scope(scope, &d);
          for (const auto& p : d.dparams) declare(inner, p, EntryKind::dim, nullptr, d.span);
          for (const auto& p : d.params) declare(inner, p, EntryKind::var, nullptr, d.span);
          declare_decls(inner, d.decls);
          check_decls(inner, d.decls);
          for (const auto& k : d.kids) check_expr(*k, inner);
          if (d.has(flag_where_form) && d.kids.empty() && !a_.scopes[static_cast<std::size_t>(inner)].names.count("backtraces"))
            error("S007", "function '" + d.text + "' has no result expression", d.span);
          break;
        }
        default: check_expr(d, scope); break;
      }
    }
  }

  void resolve(const Node& id, int scope) {
    if (auto e = lookup(scope, id.text)) {
      a_.resolution[&id] = *e;
      return;
    }
    diag(opt_.fragment ? Diagnostic::Severity::warning : Diagnostic::Severity::error, "S001",
         "undefined identifier '" + id.text + "'", id.span);
  }

  void check_tuple(const Node& t) {
    if (t.kids.size() > 1)
      if (auto v = literal_of(*t.kids[1]); v && v->is_int() && v->as_int() < 0)
        error("S004", "min must be non-negative", t.kids[1]->span);
    if (t.kids.size() > 2)
      if (auto v = literal_of(*t.kids[2]); v && v->is_int() && v->as_int() < 0)
        error("S004", "max must be non-negative", t.kids[2]->span);
    if (t.kids.size() > 3)
      if (auto v = literal_of(*t.kids[3]); v && v->is_number() && !(v->to_real() >= 0.0 && v->to_real() <= 1.0))
        error("S003", "w must be within [0,1], got " + to_source(*v), t.kids[3]->span);
  }

  void check_bracket(const Node& b, int scope) {
    for (std::size_t i = 0; i < b.kids.size(); ++i) {
      check_expr(*b.kids[i], scope);
      if (b.names[i].empty()) continue;
      auto id = lookup(scope, b.names[i]);
      if (!id) continue;
      const Entry& e = a_.entries[static_cast<std::size_t>(*id)];
      if (e.kind != EntryKind::dim || !e.tags || !e.tags->finite) continue;
      auto v = literal_of(*b.kids[i]);
      if (v && !v->is_sentinel() && !e.tags->contains(*v))
        error("S005", "tag " + to_source(*v) + " is not in the tag set of dimension " + b.names[i], b.kids[i]->span);
    }
  }

  void check_expr(const Node& n, int scope) {
    switch (n.kind) {
      case NodeKind::ident: resolve(n, scope); return;
      case NodeKind::hash:
        if (!n.kids.empty()) check_expr(*n.kids[0], scope);
        return;
      case NodeKind::where: {
        int inner = new_scope(scope, &n);
        declare_decls(inner, n.decls);
        check_decls(inner, n.decls);
        check_expr(*n.kids[0], inner);
        return;
      }
      case NodeKind::bracket: check_bracket(n, scope); return;
      case NodeKind::tuple: check_tuple(n); break;
      case NodeKind::binary:
        if (n.text == "@" && n.kids[1]->kind == NodeKind::ident)
          if (auto id = lookup(scope, n.kids[1]->text); id && a_.entries[static_cast<std::size_t>(*id)].kind == EntryKind::cnst)
            error("S006", "'@' needs a context, '" + n.kids[1]->text + "' is a constant", n.kids[1]->span);
        break;
      case NodeKind::dot:
        check_expr(*n.kids[0], scope);
        return;
      default: break;
    }
    for (const auto& k : n.kids)
      if (k) check_expr(*k, scope);
    for (const auto& d : n.decls)
      if (d) check_expr(*d, scope);
  }

  AnalyzeOptions opt_;
  Analysis a_;
  std::set<std::string> implicit_;
};

}  // namespace

Analysis analyze(const Node& program, const AnalyzeOptions& options) {
  Analyzer an(options);
  if (program.kind != NodeKind::program) {
    auto wrapper = make_node(NodeKind::program, program.span);
    wrapper->kids.push_back(clone_tree(program));
    return an.run(*wrapper);
  }
  return an.run(program);
}

std::size_t PromotedStatement::variant_count() const {
  std::size_t n = families.empty() ? 0 : 1;
  for (const auto& f : families) n *= f.size();
  return n;
}

std::vector<ObservationSequence> promote_sequence(const ObservationSequence& os, std::int64_t horizon,
                                                  bool* deferred) {
  constexpr std::size_t cap = 1u << 20;
  std::vector<ObservationSequence> out{ObservationSequence{os.name, {}}};
  for (const auto& o : os.observations) {
    std::vector<std::int64_t> lens;
    if (o.max_inf) {
      if (horizon <= 0) {
        if (deferred) *deferred = true;
        for (auto& v : out) v.observations.push_back(o);
        continue;
      }
      for (std::int64_t l = o.min; l <= std::max(o.min, horizon); ++l) lens.push_back(l);
    } else {
      for (std::int64_t l = o.min; l <= o.min + o.max; ++l) lens.push_back(l);
    }
    if (out.size() * lens.size() > cap) throw ValueError("generic sequence " + os.name + " has too many variants");
    std::vector<ObservationSequence> next;
    next.reserve(out.size() * lens.size());
    for (const auto& v : out)
      for (auto l : lens) {
        auto w = v;
        Observation fixed = o;
        fixed.min = l;
        fixed.max = 0;
        fixed.max_inf = false;
        w.observations.push_back(fixed);
        next.push_back(std::move(w));
      }
    out = std::move(next);
  }
  return out;
}

PromotedStatement promote_generic(const EvidentialStatement& es, std::int64_t horizon) {
  PromotedStatement p;
  p.name = es.name;
  for (const auto& os : es.sequences) p.families.push_back(promote_sequence(os, horizon, &p.deferred));
  return p;
}

}  // namespace flucid
