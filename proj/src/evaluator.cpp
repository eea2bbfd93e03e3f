#include "flucid/evaluator.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <shared_mutex>
#include <sstream>

#include "flucid/claims.hpp"
#include "flucid/context_calculus.hpp"
#include "flucid/dstme.hpp"
#include "flucid/encoders.hpp"
#include "flucid/era.hpp"
#include "flucid/parser.hpp"

namespace flucid {

namespace {

struct Ctx {
  SimpleContext simple;
  std::optional<Value> forensic;
};

int ctx_cmp(const Ctx& a, const Ctx& b) {
  if (int c = compare(Value(a.simple), Value(b.simple))) return c;
  if (a.forensic.has_value() != b.forensic.has_value()) return a.forensic.has_value() ? 1 : -1;
  return a.forensic ? compare(*a.forensic, *b.forensic) : 0;
}

struct CtxLess {
  bool operator()(const Ctx& a, const Ctx& b) const { return ctx_cmp(a, b) < 0; }
};

struct Env;

struct Binding {
  enum class Kind { expr, decl, dim, value, thunk, func, stream } kind = Kind::expr;
  std::string name;
  const Node* node = nullptr;
  Env* env = nullptr;  // defining scope, or the caller's scope for a thunk
  Value value;
  std::vector<Value> stream;
  std::string dim;
  std::shared_mutex mu;
  std::map<Ctx, Value, CtxLess> memo;
};

struct Env {
  Env* parent = nullptr;
  std::map<std::string, Binding*> names;
};

struct FuncValue : Callable {
  Binding* binding;
  explicit FuncValue(Binding* b) : binding(b) {}
  std::string name() const override { return binding->name; }
};

struct DemandKey {
  const void* who;
  Ctx ctx;
};
struct DemandLess {
  bool operator()(const DemandKey& a, const DemandKey& b) const {
    if (a.who != b.who) return std::less<const void*>()(a.who, b.who);
    return ctx_cmp(a.ctx, b.ctx) < 0;
  }
};

struct DemandState {
  std::set<DemandKey, DemandLess> in_flight;
  int depth = 0;
};

thread_local DemandState* tls_state = nullptr;

struct StateScope {
  DemandState local;
  DemandState* prev;
  explicit StateScope(DemandState init = {}) : local(std::move(init)), prev(tls_state) { tls_state = &local; }
  ~StateScope() { tls_state = prev; }
};

bool is_scalar(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::integer:
    case Value::Kind::real:
    case Value::Kind::boolean:
    case Value::Kind::text:
    case Value::Kind::character: return true;
    default: return false;
  }
}

bool is_inf(const Value& v) {
  return v.is_sentinel() && (v.sentinel() == Sentinel::inf_pos || v.sentinel() == Sentinel::inf_neg);
}

double numeric(const Value& v) {
  if (is_inf(v)) return v.sentinel() == Sentinel::inf_pos ? HUGE_VAL : -HUGE_VAL;
  return v.to_real();
}

bool numeric_like(const Value& v) { return v.is_number() || is_inf(v); }

std::string text_of(const Value& v) { return v.is_text() ? v.as_text() : to_source(v); }

using Thunk = std::function<Value()>;

}  // namespace

struct Evaluator::Impl {
  NodePtr program;
  EvalOptions opt;

  std::mutex arena_mu;
  std::vector<std::unique_ptr<Env>> envs;
  std::vector<std::unique_ptr<Binding>> bindings;
  Env* root = nullptr;
  Env* top = nullptr;

  std::mutex cache_mu;
  std::map<std::pair<const Node*, Env*>, Env*> where_envs;
  std::map<std::tuple<const Node*, Env*, Value>, Env*> call_envs;
  std::map<std::tuple<const Node*, Env*, std::string>, std::map<Ctx, std::int64_t, CtxLess>> counts;
  std::map<std::pair<const Node*, Value>, std::shared_ptr<const era::StateMachine>> machines;
  std::map<std::pair<const void*, Value>, Value> claim_results;
  std::vector<ClaimReport> reports;
  std::map<std::string, Value> embedded;
  std::vector<NodePtr> kept;

  std::shared_mutex tag_mu;
  std::map<std::string, std::shared_ptr<const TagSet>> tagsets;

  std::atomic<std::size_t> warehouse{0};
  std::atomic<int> active{0};
  std::mutex trace_mu;

  Impl(NodePtr p, EvalOptions o) : program(std::move(p)), opt(std::move(o)) {
    if (!program) throw EvalError("no program", {});
    if (program->kind != NodeKind::program) {
      auto wrap = make_node(NodeKind::program, program->span);
      wrap->kids.push_back(program);
      program = wrap;
    }
    root = new_env(nullptr);
    declare(root, program->decls);
    top = root;
    if (!program->kids.empty() && program->kids[0]->kind == NodeKind::where)
      top = where_env(*program->kids[0], root);
  }

  // ---- arena ----

  Env* new_env(Env* parent) {
    std::lock_guard<std::mutex> lk(arena_mu);
    envs.push_back(std::make_unique<Env>());
    envs.back()->parent = parent;
    return envs.back().get();
  }

  Binding* new_binding(Env* env, const std::string& name, Binding::Kind kind) {
    std::lock_guard<std::mutex> lk(arena_mu);
    bindings.push_back(std::make_unique<Binding>());
    Binding* b = bindings.back().get();
    b->kind = kind;
    b->name = name;
    env->names[name] = b;
    return b;
  }

  static Binding* lookup(Env* env, const std::string& name) {
    for (Env* e = env; e; e = e->parent) {
      auto it = e->names.find(name);
      if (it != e->names.end()) return it->second;
    }
    return nullptr;
  }

  void declare(Env* env, const std::vector<NodePtr>& decls) {
    for (const auto& dp : decls) {
      const Node& d = *dp;
      switch (d.kind) {
        case NodeKind::dim_decl:
          for (const auto& name : d.names) {
            Binding* b = new_binding(env, name, Binding::Kind::dim);
            b->node = &d;
            b->env = env;
          }
          break;
        case NodeKind::id_decl: {
          Binding* b = new_binding(env, d.text, Binding::Kind::expr);
          b->node = d.kids[0].get();
          b->env = env;
          break;
        }
        case NodeKind::func_decl: {
          Binding* b = new_binding(env, d.text, Binding::Kind::func);
          b->node = &d;
          b->env = env;
          break;
        }
        case NodeKind::obs_decl: {
          Binding* b = new_binding(env, d.text, Binding::Kind::decl);
          b->node = &d;
          b->env = env;
          break;
        }
        default: break;
      }
    }
  }

  Env* where_env(const Node& w, Env* parent) {
    {
      std::lock_guard<std::mutex> lk(cache_mu);
      auto it = where_envs.find({&w, parent});
      if (it != where_envs.end()) return it->second;
    }
    Env* e = new_env(parent);
    declare(e, w.decls);
    std::lock_guard<std::mutex> lk(cache_mu);
    auto [it, fresh] = where_envs.emplace(std::make_pair(&w, parent), e);
    return it->second;
  }

  // ---- dimensions ----

  struct Dim {
    std::string name;
    std::shared_ptr<const TagSet> tags;
  };

  std::shared_ptr<const TagSet> registered(const std::string& name) {
    std::shared_lock<std::shared_mutex> lk(tag_mu);
    auto it = tagsets.find(name);
    if (it != tagsets.end()) return it->second;
    static const auto naturals = std::make_shared<const TagSet>(TagSet::naturals());
    return naturals;
  }

  void register_tags(const std::string& name, std::shared_ptr<const TagSet> t) {
    std::unique_lock<std::shared_mutex> lk(tag_mu);
    tagsets.emplace(name, std::move(t));
  }

  Dim resolve_dim(const std::string& name, Env* env) {
    if (name.empty()) return resolve_dim("_", env);
    if (Binding* b = lookup(env, name)) {
      if (b->kind == Binding::Kind::dim) {
        Value v = dimension_value(b);
        return {v.as_dimension().name, v.as_dimension().tags};
      }
      if (b->kind == Binding::Kind::value && b->value.kind() == Value::Kind::dimension) {
        const auto& d = b->value.as_dimension();
        return {d.name, d.tags ? d.tags : registered(d.name)};
      }
    }
    return {name, registered(name)};
  }

  Value dimension_value(Binding* b) {
    {
      std::shared_lock<std::shared_mutex> lk(b->mu);
      auto it = b->memo.find(Ctx{});
      if (it != b->memo.end()) return it->second;
    }
    const Node& d = *b->node;
    std::shared_ptr<const TagSet> tags;
    Ctx c0;
    if (!d.has(flag_has_spec)) {
      tags = std::make_shared<const TagSet>(TagSet::naturals());
    } else if (d.has(flag_equals)) {
      Value v = eval(*d.kids[0], b->env, c0);
      if (v.kind() == Value::Kind::tag_set) tags = std::make_shared<const TagSet>(v.as_tag_set());
      else if (v.kind() == Value::Kind::dimension) tags = v.as_dimension().tags;
      else if (v.kind() == Value::Kind::array) tags = std::make_shared<const TagSet>(TagSet::of(v.as_array()));
      else throw EvalError("dimension " + b->name + " needs a tag set, got " + to_source(v), d.span);
    } else if (d.has(flag_range)) {
      std::vector<std::int64_t> xs;
      for (const auto& k : d.kids) {
        Value v = eval(*k, b->env, c0);
        if (!v.is_int()) throw EvalError("range bounds must be integers", k->span);
        xs.push_back(v.as_int());
      }
      tags = std::make_shared<const TagSet>(TagSet::range(xs[0], xs[1], xs.size() > 2 ? xs[2] : 1));
    } else {
      std::vector<Value> vs;
      for (const auto& k : d.kids) vs.push_back(eval(*k, b->env, c0));
      bool ordered = std::find(d.mods.begin(), d.mods.end(), "ordered") != d.mods.end();
      tags = std::make_shared<const TagSet>(TagSet::of(std::move(vs), ordered));
    }
    register_tags(b->name, tags);
    Value v(Dimension{b->name, tags});
    std::unique_lock<std::shared_mutex> lk(b->mu);
    return b->memo.emplace(Ctx{}, v).first->second;
  }

  std::int64_t current_index(const Ctx& ctx, const Dim& d, Span s) {
    const Value* tag = ctx.simple.get(d.name);
    if (!tag) return 0;
    auto i = d.tags->index_of(*tag);
    if (!i) throw EvalError("tag " + to_source(*tag) + " is not in the tag set of dimension " + d.name, s);
    return *i;
  }

  Value current_tag(const Ctx& ctx, const Dim& d) {
    if (const Value* tag = ctx.simple.get(d.name)) return *tag;
    auto t = d.tags->at(0);
    return t ? *t : Value::eod();
  }

  // context moved to index k along d, or the boundary beyond the tag set
  std::optional<Ctx> at_index(const Ctx& ctx, const Dim& d, std::int64_t k, Value& boundary) {
    if (k < 0) {
      boundary = Value::bod();
      return std::nullopt;
    }
    auto tag = d.tags->at(k);
    if (!tag) {
      boundary = Value::eod();
      return std::nullopt;
    }
    Ctx c = ctx;
    c.simple = c.simple.with(d.name, *tag);
    return c;
  }

  // ---- demands ----

  Value demand(Binding* b, const Ctx& ctx, Span s) {
    switch (b->kind) {
      case Binding::Kind::value: return b->value;
      case Binding::Kind::func: return Value(std::shared_ptr<const Callable>(std::make_shared<FuncValue>(b)));
      case Binding::Kind::dim: return dimension_value(b);
      case Binding::Kind::stream: {
        Dim d = resolve_dim(b->dim, root);
        auto i = current_index(ctx, d, s);
        if (i < 0) return Value::bod();
        if (i >= static_cast<std::int64_t>(b->stream.size())) return Value::eod();
        return b->stream[static_cast<std::size_t>(i)];
      }
      default: break;
    }
    if (opt.memoize) {
      std::shared_lock<std::shared_mutex> lk(b->mu);
      auto it = b->memo.find(ctx);
      if (it != b->memo.end()) return it->second;
    }
    DemandKey key{b, ctx};
    if (tls_state->in_flight.count(key))
      throw EvalError("demand cycle: " + b->name + " @ " + to_source(Value(ctx.simple)) + " depends on itself", s);
    tls_state->in_flight.insert(key);
    Value v;
    try {
      if (b->kind == Binding::Kind::decl) v = eval_decl(*b->node, b->env, ctx);
      else v = eval(*b->node, b->env, ctx);
    } catch (...) {
      tls_state->in_flight.erase(key);
      throw;
    }
    tls_state->in_flight.erase(key);
    if (!opt.memoize) {
      trace(b, ctx, v);
      return v;
    }
    std::unique_lock<std::shared_mutex> lk(b->mu);
    auto [it, fresh] = b->memo.emplace(ctx, v);
    if (fresh) {
      ++warehouse;
      lk.unlock();
      trace(b, ctx, it->second);
    }
    return it->second;
  }

  void trace(const Binding* b, const Ctx& ctx, const Value& v) {
    if (!opt.trace) return;
    std::string c = to_source(Value(ctx.simple));
    if (ctx.forensic) c += " & " + to_source(*ctx.forensic);
    std::lock_guard<std::mutex> lk(trace_mu);
    *opt.trace << "DEMAND " << b->name << " @ " << c << " -> " << to_source(v) << "\n";
  }

  // ---- parallel evaluation of independent items ----

  std::vector<Value> eval_all(const std::vector<Thunk>& fs) {
    std::vector<Value> out(fs.size());
    if (opt.jobs <= 1 || fs.size() < 2) {
      for (std::size_t i = 0; i < fs.size(); ++i) out[i] = fs[i]();
      return out;
    }
    std::vector<std::future<Value>> futs(fs.size());
    std::vector<char> spawned(fs.size(), 0);
    DemandState snapshot = *tls_state;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (active.load() >= opt.jobs - 1) continue;
      ++active;
      spawned[i] = 1;
      futs[i] = std::async(std::launch::async, [this, &f = fs[i], snapshot]() {
        StateScope scope(snapshot);
        struct Release {
          std::atomic<int>& a;
          ~Release() { --a; }
        } release{active};
        return f();
      });
    }
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (!spawned[i]) out[i] = fs[i]();
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (spawned[i]) out[i] = futs[i].get();
    return out;
  }

  // ---- truth ----

  bool cond_true(const Value& v, Span s) {
    if (v.kind() == Value::Kind::observation) {
      const auto& o = v.as_observation();
      if (o.w < opt.threshold) return false;
      const Value& p = o.property;
      if (p.is_bool() || p.is_number()) return truthy(p);
      return !o.any_property;
    }
    if (!(v.is_bool() || v.is_number()))
      throw EvalError("condition must be boolean or numeric, got " + to_source(v), s);
    return truthy(v);
  }

  Value logical_not(const Value& v, Span s) {
    if (v.is_boundary()) return v;
    bool t = cond_true(v, s);
    if (v.is_bool()) return Value(!t);
    return Value(std::int64_t{t ? 0 : 1});
  }

  // ---- expressions ----

  Value eval(const Node& n, Env* env, const Ctx& ctx) {
    if (++tls_state->depth > opt.max_depth) {
      --tls_state->depth;
      throw EvalError("evaluation too deep (more than " + std::to_string(opt.max_depth) + " nested demands)", n.span);
    }
    struct Depth {
      ~Depth() { --tls_state->depth; }
    } guard;
    try {
      return eval_node(n, env, ctx);
    } catch (const EvalError&) {
      throw;
    } catch (const std::exception& e) {
      throw EvalError(e.what(), n.span);
    }
  }

  Value eval_node(const Node& n, Env* env, const Ctx& ctx) {
    switch (n.kind) {
      case NodeKind::literal: return n.literal;
      case NodeKind::no_obs: return Value(no_observation());
      case NodeKind::zero_obs: {
        Value p = n.kids.empty() ? Value(SimpleContext{}) : eval(*n.kids[0], env, ctx);
        return Value(zero_observation(p));
      }
      case NodeKind::ident: return eval_ident(n, env, ctx);
      case NodeKind::hash: return eval_hash(n, env, ctx);
      case NodeKind::unary: return eval_unary(n, env, ctx);
      case NodeKind::binary: return eval_binary(n, env, ctx);
      case NodeKind::call: return eval_call(n, env, ctx);
      case NodeKind::subscript: return eval_subscript(n, env, ctx);
      case NodeKind::dot: return eval_dot(n, env, ctx);
      case NodeKind::if_expr: {
        Value c = eval(*n.kids[0], env, ctx);
        if (c.is_boundary()) return c;
        if (cond_true(c, n.kids[0]->span)) return eval(*n.kids[1], env, ctx);
        if (n.kids.size() > 2) return eval(*n.kids[2], env, ctx);
        return Value::eod();
      }
      case NodeKind::where: return eval(*n.kids[0], where_env(n, env), ctx);
      case NodeKind::bracket: return eval_bracket(n, env, ctx);
      case NodeKind::brace: return eval_brace(n, env, ctx);
      case NodeKind::tuple: return Value(eval_tuple(n, env, ctx));
      case NodeKind::angle: {
        Dim d = resolve_dim(n.kids[0]->text, env);
        auto i = current_index(ctx, d, n.span);
        if (i < 0) return Value::bod();
        if (i + 1 >= static_cast<std::int64_t>(n.kids.size())) return Value::eod();
        return eval(*n.kids[static_cast<std::size_t>(i + 1)], env, ctx);
      }
      case NodeKind::annot: {
        Value v = eval(*n.kids[0], env, ctx);
        if (v.kind() == Value::Kind::observation) {
          Observation o = v.as_observation();
          o.description = text_of(eval(*n.kids[1], env, ctx));
          return Value(o);
        }
        return v;
      }
      case NodeKind::select: return eval_at(*n.kids[1], eval(*n.kids[0], env, ctx), "", env, ctx, n.span);
      case NodeKind::embed: return eval_embed(n, env, ctx);
      case NodeKind::box: throw EvalError("Box constraints are not evaluable", n.span);
      default: throw EvalError("cannot evaluate a " + node_kind_name(n.kind), n.span);
    }
  }

  Value eval_ident(const Node& n, Env* env, const Ctx& ctx) {
    if (Binding* b = lookup(env, n.text)) return demand(b, ctx, n.span);
    throw EvalError("undefined identifier '" + n.text + "'", n.span);
  }

  Value current_of(const Value& v, const Ctx& ctx, Span s) {
    switch (v.kind()) {
      case Value::Kind::statement: {
        const auto& es = v.as_statement();
        if (ctx.forensic && ctx.forensic->kind() == Value::Kind::sequence)
          for (const auto& os : es.sequences)
            if (os == ctx.forensic->as_sequence()) return Value(os);
        if (es.sequences.empty()) return Value::eod();
        return Value(es.sequences.front());
      }
      case Value::Kind::sequence: {
        const auto& os = v.as_sequence();
        if (ctx.forensic && ctx.forensic->kind() == Value::Kind::observation)
          for (const auto& o : os.observations)
            if (o == ctx.forensic->as_observation()) return Value(o);
        if (os.observations.empty()) return Value::eod();
        return Value(os.observations.front());
      }
      case Value::Kind::observation:
      case Value::Kind::context: return v;
      case Value::Kind::dimension: {
        const auto& d = v.as_dimension();
        return current_tag(ctx, Dim{d.name, d.tags ? d.tags : registered(d.name)});
      }
      default: throw EvalError("# needs a dimension, context or forensic value, got " + to_source(v), s);
    }
  }

  Value eval_hash(const Node& n, Env* env, const Ctx& ctx) {
    if (n.kids.empty()) return current_tag(ctx, resolve_dim("_", env));
    const Node& k = *n.kids[0];
    if (!n.has(flag_dotted) && k.kind == NodeKind::ident && !lookup(env, k.text))
      return current_tag(ctx, resolve_dim(k.text, env));
    return current_of(eval(k, env, ctx), ctx, n.span);
  }

  // ---- operators ----

  Value eval_unary(const Node& n, Env* env, const Ctx& ctx) {
    const std::string& op = n.text;
    if (op == "bel" || op == "pl") {
      auto m = op == "bel" ? dstme::Measure::bel : dstme::Measure::pl;
      Value a = eval(*n.kids[0], env, ctx);
      if (n.kids.size() == 1) return Value(dstme::credibility(m, a));
      return Value(dstme::credibility(m, a, eval(*n.kids[1], env, ctx)));
    }
    const Node& x = *n.kids[0];
    if (op == "-" || op == "neg") {
      Value v = eval(x, env, ctx);
      if (v.is_boundary()) return v;
      if (v.is_int()) return Value(-v.as_int());
      if (v.is_real()) return Value(-v.as_real());
      if (is_inf(v)) return v.sentinel() == Sentinel::inf_pos ? Value::inf_neg() : Value::inf_pos();
      throw EvalError("cannot negate " + to_source(v), n.span);
    }
    if (op == "!" || op == "not") return logical_not(eval(x, env, ctx), n.span);
    if (op == "iseod") return Value(eval(x, env, ctx).is_eod());
    if (op == "isbod") return Value(eval(x, env, ctx).is_bod());
    Dim d = resolve_dim(n.dim, env);
    auto i = current_index(ctx, d, n.span);
    if (op == "first") return at(x, env, ctx, d, 0);
    if (op == "second") return at(x, env, ctx, d, 1);
    if (op == "next") return at(x, env, ctx, d, i + 1);
    if (op == "prev") return at(x, env, ctx, d, i - 1);
    if (op == "nnext") return at(x, env, ctx, d, i + 2);
    if (op == "nprev") return at(x, env, ctx, d, i - 2);
    if (op == "last") return at(x, env, ctx, d, count(x, env, ctx, d) - 1);
    if (op == "prelast") return at(x, env, ctx, d, count(x, env, ctx, d) - 2);
    throw EvalError("unknown operator " + op, n.span);
  }

  // value of e at index k along d; weak observations read as absent
  Value at(const Node& e, Env* env, const Ctx& ctx, const Dim& d, std::int64_t k) {
    Value boundary;
    auto c = at_index(ctx, d, k, boundary);
    if (!c) return boundary;
    Value v = eval(e, env, *c);
    if (v.kind() == Value::Kind::observation && v.as_observation().w < opt.threshold) return Value::eod();
    return v;
  }

  // index of the first eod of e along d
  std::int64_t count(const Node& e, Env* env, const Ctx& ctx, const Dim& d) {
    Ctx base = ctx;
    base.simple = base.simple.without(d.name);
    auto key = std::make_tuple(&e, env, d.name);
    {
      std::lock_guard<std::mutex> lk(cache_mu);
      auto it = counts.find(key);
      if (it != counts.end()) {
        auto jt = it->second.find(base);
        if (jt != it->second.end()) return jt->second;
      }
    }
    std::int64_t n = -1;
    for (std::int64_t i = 0; i <= opt.scan_limit; ++i)
      if (at(e, env, base, d, i).is_eod()) {
        n = i;
        break;
      }
    if (n < 0)
      throw EvalError("stream is not bounded along " + d.name + " within " + std::to_string(opt.scan_limit) +
                          " elements",
                      e.span);
    std::lock_guard<std::mutex> lk(cache_mu);
    counts[key].emplace(base, n);
    return n;
  }

  // i-th selected position of X wvr Y (or its variants)
  Value whenever(const Node& x, const Node& y, Env* env, const Ctx& ctx, const Dim& d, std::int64_t i, bool negate,
                 bool reverse, Span s) {
    if (i < 0) return Value::bod();
    auto cond = [&](std::int64_t j) -> Value {
      Value v = at(y, env, ctx, d, j);
      if (negate) v = logical_not(v, s);
      if (v.is_boundary()) return v;
      return Value(cond_true(v, s));
    };
    std::int64_t pos = reverse ? count(y, env, ctx, d) : -1;
    for (std::int64_t k = 0; k <= i; ++k) {
      std::int64_t j = reverse ? pos - 1 : pos + 1;
      for (std::int64_t steps = 0;; ++steps) {
        if (steps > opt.scan_limit) throw EvalError("no end found while scanning " + n_text(s), s);
        Value c = cond(j);
        if (c.is_boundary()) return c;
        if (c.as_bool()) break;
        j += reverse ? -1 : 1;
      }
      pos = j;
    }
    return at(x, env, ctx, d, pos);
  }

  static std::string n_text(Span s) { return "at line " + std::to_string(s.line); }

  Value upon(const Node& x, const Node& y, Env* env, const Ctx& ctx, const Dim& d, std::int64_t i, bool negate,
             bool reverse, Span s) {
    if (i < 0) return Value::bod();
    std::optional<std::int64_t> nx, ny;
    auto xp = [&](std::int64_t k) {
      if (!reverse) return at(x, env, ctx, d, k);
      if (!nx) nx = count(x, env, ctx, d);
      return at(x, env, ctx, d, *nx - 1 - k);
    };
    auto yp = [&](std::int64_t k) {
      if (!reverse) return at(y, env, ctx, d, k);
      if (!ny) ny = count(y, env, ctx, d);
      return at(y, env, ctx, d, *ny - 1 - k);
    };
    auto adv = [&](std::int64_t k) {
      Value v = yp(k);
      return negate ? logical_not(v, s) : v;
    };
    if (i == 0) return xp(0);
    Value cur = yp(i);
    Value prev = adv(i - 1);
    if (prev.is_boundary()) return prev;
    if (cur.is_boundary() && cond_true(prev, s)) return reverse ? Value::bod() : Value::eod();
    std::int64_t w = 0;
    for (std::int64_t k = 1; k <= i; ++k) {
      Value v = adv(k - 1);
      if (v.is_boundary()) return v;
      if (cond_true(v, s)) ++w;
    }
    return xp(w);
  }

  Value eval_stream_binary(const Node& n, Env* env, const Ctx& ctx) {
    const std::string& op = n.text;
    const Node& x = *n.kids[0];
    const Node& y = *n.kids[1];
    Dim d = resolve_dim(n.dim, env);
    auto i = current_index(ctx, d, n.span);
    if (op == "fby") return i == 0 ? eval(x, env, ctx) : at(y, env, ctx, d, i - 1);
    if (op == "pby") {
      auto cy = count(y, env, ctx, d);
      if (i < cy) return eval(y, env, ctx);
      if (i == cy) return at(x, env, ctx, d, 0);
      return Value::eod();
    }
    bool neg = op[0] == 'n';
    std::string base = neg ? op.substr(1) : op;
    if (base == "wvr") return whenever(x, y, env, ctx, d, i, neg, false, n.span);
    if (base == "rwvr") return whenever(x, y, env, ctx, d, i, neg, true, n.span);
    if (base == "asa") return whenever(x, y, env, ctx, d, 0, neg, false, n.span);
    if (base == "ala") {
      std::int64_t m = 0;
      for (;; ++m) {
        if (m > opt.scan_limit) throw EvalError("stream is not bounded along " + d.name, n.span);
        if (whenever(x, y, env, ctx, d, m, neg, false, n.span).is_eod()) break;
      }
      return whenever(x, y, env, ctx, d, m - 1, neg, false, n.span);
    }
    if (base == "upon") return upon(x, y, env, ctx, d, i, neg, false, n.span);
    if (base == "rupon") return upon(x, y, env, ctx, d, i, neg, true, n.span);
    throw EvalError("unknown operator " + op, n.span);
  }

  static bool is_stream_op(const std::string& op) {
    static const std::set<std::string> ops = {"fby",  "pby",  "wvr",   "rwvr",  "nwvr",  "nrwvr",
                                              "asa",  "nasa", "ala",   "nala",  "upon",  "rupon",
                                              "nupon", "nrupon"};
    return ops.count(op) > 0;
  }

  Value logical(const std::string& op, const Value& a, const Value& b, Span s) {
    if (a.is_boundary()) return a;
    if (b.is_boundary()) return b;
    if (op == "band" || op == "bor" || op == "bxor") {
      if (!a.is_int() || !b.is_int()) throw EvalError(op + " needs integers", s);
      std::int64_t x = a.as_int(), y = b.as_int();
      return Value(op == "band" ? (x & y) : op == "bor" ? (x | y) : (x ^ y));
    }
    bool x = cond_true(a, s), y = cond_true(b, s);
    bool r;
    if (op == "&&" || op == "and") r = x && y;
    else if (op == "||" || op == "or") r = x || y;
    else if (op == "xor") r = x != y;
    else if (op == "nand") r = !(x && y);
    else if (op == "nor") r = !(x || y);
    else r = x == y;  // nxor
    if (a.is_bool() && b.is_bool()) return Value(r);
    return Value(std::int64_t{r ? 1 : 0});
  }

  Value relational(const std::string& op, const Value& a, const Value& b, Span s) {
    if (a.is_boundary()) return a;
    if (b.is_boundary()) return b;
    int c;
    if (numeric_like(a) && numeric_like(b)) {
      if (a.is_int() && b.is_int()) c = a.as_int() < b.as_int() ? -1 : a.as_int() > b.as_int();
      else {
        double x = numeric(a), y = numeric(b);
        c = x < y ? -1 : (x > y ? 1 : 0);
      }
    } else if (op == "==" || op == "!=") {
      c = compare(a, b) == 0 ? 0 : 1;
    } else if ((a.is_text() && b.is_text()) || (a.kind() == Value::Kind::character && b.kind() == a.kind())) {
      c = compare(a, b);
    } else {
      throw EvalError("cannot order " + to_source(a) + " and " + to_source(b), s);
    }
    if (op == "==") return Value(c == 0);
    if (op == "!=") return Value(c != 0);
    if (op == "<") return Value(c < 0);
    if (op == "<=") return Value(c <= 0);
    if (op == ">") return Value(c > 0);
    return Value(c >= 0);
  }

  Value arithmetic(const std::string& op, const Value& a, const Value& b, Span s) {
    if (a.is_boundary()) return a;
    if (b.is_boundary()) return b;
    if (op == "^" && (a.is_text() || b.is_text())) return Value(text_of(a) + text_of(b));
    if (is_inf(a) || is_inf(b)) {
      if (op == "+" && is_inf(a) && is_inf(b) && a != b) throw EvalError("INF+ plus INF- is undefined", s);
      if (op == "/" && is_inf(b)) return Value(std::int64_t{0});
      return is_inf(a) ? a : (op == "-" ? (b.sentinel() == Sentinel::inf_pos ? Value::inf_neg() : Value::inf_pos())
                                        : b);
    }
    if (!a.is_number() || !b.is_number())
      throw EvalError("operator " + op + " needs numbers, got " + to_source(a) + " and " + to_source(b), s);
    if (a.is_int() && b.is_int()) {
      std::int64_t x = a.as_int(), y = b.as_int();
      if (op == "+") return Value(x + y);
      if (op == "-") return Value(x - y);
      if (op == "*") return Value(x * y);
      if (op == "/" || op == "%") {
        if (y == 0) throw EvalError("division by zero", s);
        return Value(op == "/" ? x / y : x % y);
      }
      if (op == "^") {
        if (y < 0) return Value(std::pow(static_cast<double>(x), static_cast<double>(y)));
        std::int64_t r = 1;
        for (std::int64_t k = 0; k < y; ++k) r *= x;
        return Value(r);
      }
    }
    double x = a.to_real(), y = b.to_real();
    if (op == "+") return Value(x + y);
    if (op == "-") return Value(x - y);
    if (op == "*") return Value(x * y);
    if (op == "/") {
      if (y == 0.0) throw EvalError("division by zero", s);
      return Value(x / y);
    }
    if (op == "%") {
      if (y == 0.0) throw EvalError("division by zero", s);
      return Value(std::fmod(x, y));
    }
    if (op == "^") return Value(std::pow(x, y));
    throw EvalError("unknown operator " + op, s);
  }

  Value eval_binary(const Node& n, Env* env, const Ctx& ctx) {
    const std::string& op = n.text;
    if (op == "@") return eval_at(*n.kids[0], eval(*n.kids[1], env, ctx), n.dim, env, ctx, n.span);
    if (is_stream_op(op)) return eval_stream_binary(n, env, ctx);
    Value a = eval(*n.kids[0], env, ctx);
    Value b = eval(*n.kids[1], env, ctx);
    if (!op.empty() && op[0] == '\\') {
      std::string name = op.substr(1);
      if (name == "in" || name == "isSubContext") return Value(calculus::membership(name, a, b));
      if (name == "union" || name == "intersection" || name == "difference") return calculus::set_like(name, a, b);
      if (name == "override") return calculus::override_values(a, b);
      if (name == "projection" || name == "hiding") return calculus::filter(name, a, b);
      throw EvalError("unknown context operator " + op, n.span);
    }
    if (op == "combine") return calculus::combine(a, b);
    if (op == "product") return calculus::product(a, b);
    static const std::set<std::string> logic = {"&&", "||",   "and", "or",  "xor", "nand",
                                                "nor", "nxor", "band", "bor", "bxor"};
    if (logic.count(op)) return logical(op, a, b, n.span);
    static const std::set<std::string> rel = {"==", "!=", "<", "<=", ">", ">="};
    if (rel.count(op)) return relational(op, a, b, n.span);
    return arithmetic(op, a, b, n.span);
  }

  Ctx with_observation(const Ctx& ctx, const Observation& o) {
    Ctx c = ctx;
    c.forensic = Value(o);
    if (!o.any_property && o.property.kind() == Value::Kind::context)
      c.simple = calculus::override_with(c.simple, o.property.as_context());
    return c;
  }

  Value eval_at(const Node& e, const Value& r, const std::string& dim, Env* env, const Ctx& ctx, Span s) {
    switch (r.kind()) {
      case Value::Kind::sentinel:
        if (r.is_boundary()) return r;
        throw EvalError("cannot evaluate at " + to_source(r), s);
      case Value::Kind::context: {
        Ctx c = ctx;
        c.simple = calculus::override_with(c.simple, r.as_context());
        return eval(e, env, c);
      }
      case Value::Kind::context_set: {
        std::vector<Thunk> fs;
        for (const auto& m : r.as_context_set().members)
          fs.push_back([&, m] {
            Ctx c = ctx;
            c.simple = calculus::override_with(c.simple, m);
            return eval(e, env, c);
          });
        return Value(eval_all(fs));
      }
      case Value::Kind::observation: {
        const auto& o = r.as_observation();
        if (o.w < opt.threshold) return Value::eod();
        return eval(e, env, with_observation(ctx, o));
      }
      case Value::Kind::sequence: {
        if (dstme::credibility(dstme::Measure::bel, r) < opt.threshold) return Value::eod();
        std::vector<Thunk> fs;
        for (const auto& o : r.as_sequence().observations)
          fs.push_back([&, o] {
            if (o.w < opt.threshold) return Value::eod();
            return eval(e, env, with_observation(ctx, o));
          });
        return Value(eval_all(fs));
      }
      case Value::Kind::statement: {
        if (dstme::credibility(dstme::Measure::bel, r) < opt.threshold) return Value::eod();
        std::vector<Thunk> fs;
        for (const auto& os : r.as_statement().sequences)
          fs.push_back([&, os] {
            Value v(os);
            if (dstme::credibility(dstme::Measure::bel, v) < opt.threshold) return Value::eod();
            Ctx c = ctx;
            c.forensic = v;
            return eval(e, env, c);
          });
        return Value(eval_all(fs));
      }
      default: break;
    }
    if (!is_scalar(r)) throw EvalError("'@' needs a context, got " + to_source(r), s);
    Dim d = resolve_dim(dim, env);
    Ctx c = ctx;
    if (d.tags->contains(r)) {
      c.simple = c.simple.with(d.name, r);
    } else if (r.is_int()) {
      Value boundary;
      auto moved = at_index(ctx, d, r.as_int(), boundary);
      if (!moved) return boundary;
      c = *moved;
    } else {
      throw EvalError("tag " + to_source(r) + " is not in the tag set of dimension " + d.name, s);
    }
    return eval(e, env, c);
  }

  // ---- members ----

  Value eval_dot(const Node& n, Env* env, const Ctx& ctx) {
    Value v = eval(*n.kids[0], env, ctx);
    const std::string& m = n.text;
    if (m.empty()) return v;
    if (m == "#") return current_of(v, ctx, n.span);
    if (m == "##") return current_of(current_of(v, ctx, n.span), ctx, n.span);
    if (v.is_boundary()) return v;
    if (v.kind() == Value::Kind::observation) {
      const auto& o = v.as_observation();
      if (m == "P") return o.any_property ? Value(no_observation()) : o.property;
      if (m == "min") return Value(o.min);
      if (m == "max") return o.max_inf ? Value::inf_pos() : Value(o.max);
      if (m == "w") return Value(o.w);
      if (m == "t") return o.t ? Value(*o.t) : Value::eod();
    }
    if (v.kind() == Value::Kind::context) {
      const Value* t = v.as_context().get(resolve_dim(m, env).name);
      return t ? *t : Value::eod();
    }
    throw EvalError("no member '" + m + "' on " + to_source(v), n.span);
  }

  // ---- aggregates ----

  Value eval_bracket(const Node& n, Env* env, const Ctx& ctx) {
    if (n.kids.empty()) return Value(SimpleContext{});
    std::vector<Thunk> fs;
    for (const auto& k : n.kids) fs.push_back([&, k] { return eval(*k, env, ctx); });
    auto vals = eval_all(fs);
    bool all_named = true, any_named = false;
    for (const auto& name : n.names) {
      all_named = all_named && !name.empty();
      any_named = any_named || !name.empty();
    }
    if (all_named) {
      std::vector<std::pair<std::string, Value>> pairs;
      for (std::size_t i = 0; i < vals.size(); ++i) pairs.emplace_back(resolve_dim(n.names[i], env).name, vals[i]);
      return Value(SimpleContext(std::move(pairs)));
    }
    if (!any_named) return Value(Array(vals));
    bool bare_contexts = true;
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (n.names[i].empty() && vals[i].kind() != Value::Kind::context) bare_contexts = false;
    if (bare_contexts) {
      SimpleContext c;
      for (std::size_t i = 0; i < vals.size(); ++i)
        c = n.names[i].empty() ? calculus::override_with(c, vals[i].as_context())
                               : c.with(resolve_dim(n.names[i], env).name, vals[i]);
      return Value(c);
    }
    Array out;
    for (std::size_t i = 0; i < vals.size(); ++i)
      out.push_back(n.names[i].empty()
                        ? vals[i]
                        : Value(SimpleContext({{resolve_dim(n.names[i], env).name, vals[i]}})));
    return Value(out);
  }

  Value eval_brace(const Node& n, Env* env, const Ctx& ctx) {
    std::vector<Thunk> fs;
    for (const auto& k : n.kids) fs.push_back([&, k] { return eval(*k, env, ctx); });
    auto vals = eval_all(fs);
    if (vals.empty()) return Value(Array{});
    auto all = [&](auto pred) { return std::all_of(vals.begin(), vals.end(), pred); };
    if (all([](const Value& v) { return v.kind() == Value::Kind::context; })) {
      std::vector<SimpleContext> ms;
      for (const auto& v : vals) ms.push_back(v.as_context());
      return Value(ContextSet(std::move(ms)));
    }
    if (all([](const Value& v) { return v.kind() == Value::Kind::sequence || v.kind() == Value::Kind::statement; })) {
      EvidentialStatement es;
      for (const auto& v : vals) {
        if (v.kind() == Value::Kind::sequence) es.sequences.push_back(v.as_sequence());
        else
          for (const auto& os : v.as_statement().sequences) es.sequences.push_back(os);
      }
      return Value(es);
    }
    if (std::any_of(vals.begin(), vals.end(), [](const Value& v) { return v.kind() == Value::Kind::observation; })) {
      ObservationSequence os;
      for (const auto& v : vals) os.observations.push_back(lift_observation(v));
      return Value(os);
    }
    if (all(is_scalar)) {
      std::set<Value> seen(vals.begin(), vals.end());
      if (seen.size() == vals.size()) return Value(TagSet::of(vals));
    }
    return Value(Array(vals));
  }

  Observation eval_tuple(const Node& n, Env* env, const Ctx& ctx) {
    std::string description;
    Value p;
    const Node& pn = *n.kids[0];
    if (pn.kind == NodeKind::annot) {
      p = eval(*pn.kids[0], env, ctx);
      description = text_of(eval(*pn.kids[1], env, ctx));
    } else {
      p = eval(pn, env, ctx);
    }
    std::optional<std::int64_t> min;
    std::optional<Value> max;
    std::optional<double> w;
    std::optional<std::int64_t> t;
    if (n.kids.size() > 1) {
      Value v = eval(*n.kids[1], env, ctx);
      if (!v.is_int()) throw EvalError("observation min must be an integer, got " + to_source(v), n.kids[1]->span);
      min = v.as_int();
    }
    if (n.kids.size() > 2) max = eval(*n.kids[2], env, ctx);
    if (n.kids.size() > 3) {
      Value v = eval(*n.kids[3], env, ctx);
      if (!v.is_number()) throw EvalError("observation w must be a number, got " + to_source(v), n.kids[3]->span);
      w = v.to_real();
    }
    if (n.kids.size() > 4) {
      Value v = eval(*n.kids[4], env, ctx);
      if (v.is_int()) t = v.as_int();
      else if (v.is_text()) t = encoders::normalize_timestamp(v.as_text()).epoch;
      else if (!v.is_eod()) throw EvalError("observation t must be a timestamp, got " + to_source(v), n.kids[4]->span);
    }
    Observation o = p.kind() == Value::Kind::observation && n.kids.size() == 1 ? p.as_observation()
                                                                               : make_observation(p, min, max, w, t);
    if (!description.empty()) o.description = description;
    return o;
  }

  // ---- declarations ----

  Observation decl_observation(const Node& d, Env* env, const Ctx& ctx) {
    if (d.kids.empty()) return no_observation();
    Value v = eval(*d.kids[0], env, ctx);
    if (v.kind() == Value::Kind::observation) return v.as_observation();
    return make_observation(v);
  }

  ObservationSequence decl_sequence(const Node& e, Env* env, const Ctx& ctx) {
    if (e.kind == NodeKind::binary && e.text == "fby") {
      auto a = decl_sequence(*e.kids[0], env, ctx);
      auto b = decl_sequence(*e.kids[1], env, ctx);
      a.observations.insert(a.observations.end(), b.observations.begin(), b.observations.end());
      return a;
    }
    Value v = eval(e, env, ctx);
    switch (v.kind()) {
      case Value::Kind::sequence: return v.as_sequence();
      case Value::Kind::observation: return ObservationSequence{"", {v.as_observation()}};
      case Value::Kind::array: {
        ObservationSequence os;
        for (const auto& x : v.as_array()) os.observations.push_back(lift_observation(x));
        return os;
      }
      default: return lift_sequence(v);
    }
  }

  Value eval_decl(const Node& d, Env* env, const Ctx& ctx) {
    if (d.has(flag_statement)) {
      if (d.kids.empty()) return Value(EvidentialStatement{d.text, {}});
      Value v = eval(*d.kids[0], env, ctx);
      EvidentialStatement es;
      if (v.kind() == Value::Kind::statement) es = v.as_statement();
      else if (v.kind() == Value::Kind::sequence) es.sequences.push_back(v.as_sequence());
      else es = lift_statement(v);
      es.name = d.text;
      return Value(es);
    }
    if (d.has(flag_sequence)) {
      ObservationSequence os = d.kids.empty() ? ObservationSequence{"", {no_observation()}}
                                              : decl_sequence(*d.kids[0], env, ctx);
      os.name = d.text;
      return Value(os);
    }
    return Value(decl_observation(d, env, ctx));
  }

  // ---- functions ----

  struct Callee {
    Binding* fn = nullptr;
    std::string name;
    std::vector<const Node*> dargs;
  };

  Callee resolve_callee(const Node& c, Env* env, const Ctx& ctx) {
    Callee out;
    const Node* base = &c;
    if (c.kind == NodeKind::subscript) {
      base = c.kids[0].get();
      for (std::size_t i = 1; i < c.kids.size(); ++i) out.dargs.push_back(c.kids[i].get());
    }
    if (base->kind == NodeKind::ident) {
      out.name = base->text;
      Binding* b = lookup(env, base->text);
      if (b && b->kind == Binding::Kind::func) {
        out.fn = b;
        return out;
      }
    }
    Value v = eval(*base, env, ctx);
    if (v.kind() != Value::Kind::function) throw EvalError(to_source(v) + " is not a function", c.span);
    out.fn = static_cast<const FuncValue&>(*v.as_function()).binding;
    out.name = out.fn->name;
    return out;
  }

  Value apply(const Node& call, const Callee& f, const std::vector<const Node*>& args, Env* env, const Ctx& ctx) {
    const Node& decl = *f.fn->node;
    if (f.dargs.size() != decl.dparams.size() || args.size() != decl.params.size())
      throw EvalError("function " + f.name + " takes " + std::to_string(decl.dparams.size()) + " dimension and " +
                          std::to_string(decl.params.size()) + " value arguments",
                      call.span);
    Array dvals;
    for (const Node* a : f.dargs) dvals.push_back(eval(*a, env, ctx));
    auto key = std::make_tuple(&call, env, Value(dvals));
    Env* fenv = nullptr;
    {
      std::lock_guard<std::mutex> lk(cache_mu);
      auto it = call_envs.find(key);
      if (it != call_envs.end()) fenv = it->second;
    }
    if (!fenv) {
      fenv = new_env(f.fn->env);
      for (std::size_t i = 0; i < decl.dparams.size(); ++i) {
        Binding* b = new_binding(fenv, decl.dparams[i], Binding::Kind::value);
        b->value = dvals[i];
      }
      for (std::size_t i = 0; i < decl.params.size(); ++i) {
        Binding* b = new_binding(fenv, decl.params[i], Binding::Kind::thunk);
        b->node = args[i];
        b->env = env;
      }
      declare(fenv, decl.decls);
      std::lock_guard<std::mutex> lk(cache_mu);
      fenv = call_envs.emplace(key, fenv).first->second;
    }
    return function_result(decl, fenv, ctx);
  }

  Value function_result(const Node& decl, Env* fenv, const Ctx& ctx) {
    if (!decl.kids.empty()) return eval(*decl.kids[0], fenv, ctx);
    auto it = fenv->names.find("backtraces");
    if (it == fenv->names.end()) throw EvalError("function " + decl.text + " has no result", decl.span);
    return demand(it->second, ctx, decl.span);
  }

  Value eval_call(const Node& n, Env* env, const Ctx& ctx) {
    Callee f = resolve_callee(*n.kids[0], env, ctx);
    std::vector<const Node*> args;
    for (std::size_t i = 1; i < n.kids.size(); ++i) args.push_back(n.kids[i].get());
    if (f.name.rfind("inv", 0) == 0 && args.size() == 1) {
      Value arg = eval(*args[0], env, ctx);
      if (arg.kind() == Value::Kind::statement) {
        if (Binding* psi = find_psi(f, env)) return claim(f, psi, arg, env, ctx, n.span);
      }
    }
    if (!f.fn) throw EvalError("undefined function '" + f.name + "'", n.span);
    return apply(n, f, args, env, ctx);
  }

  Value eval_subscript(const Node& n, Env* env, const Ctx& ctx) {
    const Node& base = *n.kids[0];
    if (base.kind == NodeKind::ident)
      if (Binding* b = lookup(env, base.text); b && b->kind == Binding::Kind::func)
        return apply(n, resolve_callee(n, env, ctx), {}, env, ctx);
    Value v = eval(base, env, ctx);
    if (n.kids.size() != 2) throw EvalError("subscript takes one index", n.span);
    Value i = eval(*n.kids[1], env, ctx);
    if (i.is_boundary()) return i;
    if (!i.is_int()) throw EvalError("subscript index must be an integer", n.kids[1]->span);
    auto k = i.as_int();
    if (k < 0) return Value::bod();
    if (v.kind() == Value::Kind::array) {
      const auto& a = v.as_array();
      return k < static_cast<std::int64_t>(a.size()) ? a[static_cast<std::size_t>(k)] : Value::eod();
    }
    if (v.kind() == Value::Kind::dimension || v.kind() == Value::Kind::tag_set) {
      const TagSet& t = v.kind() == Value::Kind::tag_set ? v.as_tag_set()
                                                         : *resolve_dim(v.as_dimension().name, env).tags;
      auto tag = t.at(k);
      return tag ? *tag : Value::eod();
    }
    throw EvalError("cannot subscript " + to_source(v), n.span);
  }

  // ---- claims ----

  Binding* find_psi(const Callee& inv, Env* env) {
    std::string direct = inv.name.substr(3);
    if (Binding* b = lookup(env, direct); b && b->kind == Binding::Kind::func) return b;
    std::vector<Binding*> found;
    std::set<std::string> seen;
    for (Env* e = env; e; e = e->parent)
      for (const auto& [name, b] : e->names) {
        if (seen.count(name)) continue;
        seen.insert(name);
        if (b->kind == Binding::Kind::func && b != inv.fn && b->node->params.size() == 2) found.push_back(b);
      }
    return found.size() == 1 ? found[0] : nullptr;
  }

  std::shared_ptr<const era::StateMachine> machine_for(Binding* psi, const Array& dvals, Span s) {
    auto key = std::make_pair(psi->node, Value(dvals));
    {
      std::lock_guard<std::mutex> lk(cache_mu);
      auto it = machines.find(key);
      if (it != machines.end()) return it->second;
    }
    const Node& decl = *psi->node;
    const std::string& cparam = decl.params[0];
    const std::string& sparam = decl.params[1];
    auto events = claims::event_literals(decl, cparam);
    int comps = claims::component_count(decl, sparam);
    std::vector<std::string> domain;
    for (const auto& lit : claims::string_literals(decl))
      if (std::find(events.begin(), events.end(), lit) == events.end()) domain.push_back(lit);
    for (const auto& dv : dvals) {
      if (dv.kind() != Value::Kind::dimension || !dv.as_dimension().tags || !dv.as_dimension().tags->finite) continue;
      for (const auto& t : dv.as_dimension().tags->listing()) {
        std::string tag = text_of(t);
        if (std::find(domain.begin(), domain.end(), tag) == domain.end()) domain.push_back(tag);
      }
    }
    auto step = [&](const std::string& event, const std::vector<std::string>& state) {
      Env* fenv = new_env(psi->env);
      for (std::size_t i = 0; i < decl.dparams.size() && i < dvals.size(); ++i)
        new_binding(fenv, decl.dparams[i], Binding::Kind::value)->value = dvals[i];
      new_binding(fenv, cparam, Binding::Kind::value)->value = Value(event);
      Binding* sb = new_binding(fenv, sparam, Binding::Kind::stream);
      sb->dim = "_";
      for (const auto& x : state) sb->stream.push_back(Value(x));
      declare(fenv, decl.decls);
      std::vector<std::string> out;
      for (std::size_t k = 0; k < state.size(); ++k) {
        Ctx c;
        c.simple = c.simple.with("_", Value(static_cast<std::int64_t>(k)));
        Value v = function_result(decl, fenv, c);
        out.push_back(v.is_text() ? v.as_text() : to_source(v));
      }
      return out;
    };
    try {
      auto fsm = std::make_shared<const era::StateMachine>(claims::derive_machine(events, domain, comps, step));
      std::lock_guard<std::mutex> lk(cache_mu);
      return machines.emplace(key, fsm).first->second;
    } catch (const claims::ClaimError& e) {
      throw EvalError(std::string("cannot derive a state machine from ") + decl.text + ": " + e.what(), s);
    }
  }

  Value claim(const Callee& inv, Binding* psi, const Value& es, Env* env, const Ctx& ctx, Span s) {
    Array dvals;
    for (const Node* a : inv.dargs) dvals.push_back(eval(*a, env, ctx));
    auto fsm = machine_for(psi, dvals, s);
    auto key = std::make_pair(static_cast<const void*>(fsm.get()), es);
    {
      std::lock_guard<std::mutex> lk(cache_mu);
      auto it = claim_results.find(key);
      if (it != claim_results.end()) return it->second;
    }
    auto specs = claims::specs_of(*fsm, es.as_statement(), opt.threshold);
    era::ClaimOptions co;
    co.horizon = opt.horizon;
    co.jobs = std::max(1, opt.jobs);
    auto result = era::check_claim(*fsm, specs, co);
    ClaimReport report;
    report.function = inv.name;
    report.consistent = result.consistent;
    report.horizon = result.horizon;
    report.truncated = result.horizon_truncated;
    report.total = result.backtrace_total;
    Array out;
    for (const auto& c : result.backtraces) {
      report.backtraces.push_back(era::format_backtrace(*fsm, c));
      out.push_back(Value(report.backtraces.back()));
    }
    std::lock_guard<std::mutex> lk(cache_mu);
    auto [it, fresh] = claim_results.emplace(key, Value(out));
    if (fresh) reports.push_back(std::move(report));
    return it->second;
  }

  // ---- embed ----

  Value eval_embed(const Node& n, Env* env, const Ctx& ctx) {
    Value uri = eval(*n.kids[0], env, ctx);
    if (!uri.is_text()) throw EvalError("embed needs a file name", n.span);
    std::string path = uri.as_text();
    if (path.rfind("file://", 0) == 0) path = path.substr(7);
    if (!path.empty() && path[0] != '/' && !opt.base_dir.empty()) path = opt.base_dir + "/" + path;
    {
      std::lock_guard<std::mutex> lk(cache_mu);
      auto it = embedded.find(path);
      if (it != embedded.end()) return it->second;
    }
    std::ifstream in(path);
    if (!in) throw EvalError("cannot open embedded file " + path, n.span);
    std::stringstream ss;
    ss << in.rdbuf();
    NodePtr prog;
    try {
      prog = parse_program(ss.str());
    } catch (const SyntaxError& e) {
      throw EvalError("in embedded file " + path + ": " + e.what(), n.span);
    }
    EvalOptions sub = opt;
    sub.trace = nullptr;
    auto slash = path.rfind('/');
    sub.base_dir = slash == std::string::npos ? "" : path.substr(0, slash);
    Evaluator ev(prog, sub);
    Value v = ev.run();
    std::lock_guard<std::mutex> lk(cache_mu);
    return embedded.emplace(path, v).first->second;
  }

  // ---- entry points ----

  Value run(const SimpleContext& c) {
    StateScope scope;
    Ctx ctx{c, std::nullopt};
    if (!program->kids.empty()) return eval(*program->kids[0], root, ctx);
    // declarations only: the last forensic declaration is the result
    for (auto it = program->decls.rbegin(); it != program->decls.rend(); ++it)
      if ((*it)->kind == NodeKind::obs_decl) return demand(root->names.at((*it)->text), ctx, (*it)->span);
    if (Binding* b = lookup(root, "backtraces")) return demand(b, ctx, program->span);
    throw EvalError("program has no result expression", program->span);
  }

  Value evaluate(const Node& e, const SimpleContext& c) {
    StateScope scope;
    return eval(e, top, Ctx{c, std::nullopt});
  }
};

Evaluator::Evaluator(NodePtr program, EvalOptions options)
    : impl_(std::make_unique<Impl>(std::move(program), std::move(options))) {}

Evaluator::~Evaluator() = default;

Value Evaluator::run(const SimpleContext& context) { return impl_->run(context); }

Value Evaluator::evaluate(const Node& expr, const SimpleContext& context) {
  return impl_->evaluate(expr, context);
}

Value Evaluator::evaluate(std::string_view expr_source, const SimpleContext& context) {
  NodePtr e = parse_expression(expr_source);
  {
    // caches are keyed by node address, so parsed expressions live as long as the evaluator
    std::lock_guard<std::mutex> lk(impl_->arena_mu);
    impl_->kept.push_back(e);
  }
  return impl_->evaluate(*e, context);
}

Value Evaluator::value_of(const std::string& name, const SimpleContext& context) {
  Binding* b = Impl::lookup(impl_->top, name);
  if (!b) throw EvalError("undefined identifier '" + name + "'", {});
  StateScope scope;
  return impl_->demand(b, Ctx{context, std::nullopt}, {});
}

void Evaluator::bind_stream(const std::string& name, std::vector<Value> values, const std::string& dim) {
  Binding* b = impl_->new_binding(impl_->top, name, Binding::Kind::stream);
  b->stream = std::move(values);
  b->dim = dim;
}

std::vector<ClaimReport> Evaluator::claims() const {
  std::lock_guard<std::mutex> lk(impl_->cache_mu);
  return impl_->reports;
}

std::size_t Evaluator::warehouse_size() const { return impl_->warehouse.load(); }

Value evaluate_expression(std::string_view source, const SimpleContext& context, EvalOptions options) {
  Evaluator ev(parse_expression(source), std::move(options));
  return ev.run(context);
}

}  // namespace flucid
