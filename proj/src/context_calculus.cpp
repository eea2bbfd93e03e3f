#include "flucid/context_calculus.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace flucid::calculus {

namespace {

bool has_pair(const SimpleContext& c, const std::string& dim, const Value& tag) {
  const Value* v = c.get(dim);
  return v && *v == tag;
}

[[noreturn]] void mismatch(const std::string& op, const Value& a, const Value& b) {
  throw TypeError("\\" + op + " is not defined for " + kind_name(a.kind()) + " and " +
                  kind_name(b.kind()));
}

bool is_context_kind(const Value& v) {
  return v.kind() == Value::Kind::context || v.kind() == Value::Kind::context_set;
}

ContextSet as_set(const Value& v) {
  if (v.kind() == Value::Kind::context_set) return v.as_context_set();
  return ContextSet({v.as_context()});
}

// Tag listings from tag sets, dimensions and arrays of tags.
bool tag_like(const Value& v) {
  return v.kind() == Value::Kind::tag_set || v.kind() == Value::Kind::dimension;
}

std::vector<Value> tag_listing(const Value& v) {
  if (v.kind() == Value::Kind::tag_set) return v.as_tag_set().listing();
  if (v.kind() == Value::Kind::dimension) {
    const auto& d = v.as_dimension();
    if (!d.tags) throw TypeError("dimension " + d.name + " has no finite tag set");
    return d.tags->listing();
  }
  if (v.kind() == Value::Kind::array) return v.as_array();
  throw TypeError("expected a tag set, got " + kind_name(v.kind()));
}

bool contains(const std::vector<Value>& xs, const Value& v) {
  return std::find(xs.begin(), xs.end(), v) != xs.end();
}

Value tag_set_value(std::vector<Value> tags, bool ordered) {
  return Value(TagSet::of(std::move(tags), ordered));
}

bool ordered_of(const Value& v) {
  if (v.kind() == Value::Kind::tag_set) return v.as_tag_set().ordered;
  if (v.kind() == Value::Kind::dimension && v.as_dimension().tags) return v.as_dimension().tags->ordered;
  return false;
}

// dimension selections: arrays of dimensions or names, a single dimension
bool dimension_set(const Value& v, std::vector<std::string>& out) {
  auto one = [&](const Value& e) {
    if (e.kind() == Value::Kind::dimension) {
      out.push_back(e.as_dimension().name);
      return true;
    }
    if (e.is_text()) {
      out.push_back(e.as_text());
      return true;
    }
    return false;
  };
  if (v.kind() == Value::Kind::array) {
    for (const auto& e : v.as_array())
      if (!one(e)) return false;
    return true;
  }
  if (v.kind() == Value::Kind::dimension) return one(v);
  return false;
}

bool dimension_array(const Value& v) {
  if (v.kind() != Value::Kind::array || v.as_array().empty()) return false;
  for (const auto& e : v.as_array())
    if (e.kind() != Value::Kind::dimension) return false;
  return true;
}

template <class F>
Value map_forensic(const Value& f, F fn) {
  // fn(Observation) -> optional<Observation>
  switch (f.kind()) {
    case Value::Kind::observation: {
      auto r = fn(f.as_observation());
      if (!r) return Value(ObservationSequence{});
      return Value(*r);
    }
    case Value::Kind::sequence: {
      ObservationSequence os;
      os.name = f.as_sequence().name;
      for (const auto& o : f.as_sequence().observations)
        if (auto r = fn(o)) os.observations.push_back(*r);
      return Value(os);
    }
    case Value::Kind::statement: {
      EvidentialStatement es;
      es.name = f.as_statement().name;
      for (const auto& os : f.as_statement().sequences) {
        ObservationSequence out;
        out.name = os.name;
        for (const auto& o : os.observations)
          if (auto r = fn(o)) out.observations.push_back(*r);
        if (!out.observations.empty()) es.sequences.push_back(out);
      }
      return Value(es);
    }
    default: throw TypeError("expected a forensic context");
  }
}

// A single surviving observation collapses to itself.
Value collapse(const Value& v) {
  auto all = flatten(v);
  if (all.size() == 1 && v.kind() != Value::Kind::observation) return Value(all.front());
  return v;
}

bool property_has(const Observation& o, const SimpleContext& c) {
  if (o.any_property) return false;
  if (o.property.kind() != Value::Kind::context) return c.empty();
  return is_sub_context(c, o.property.as_context());
}

ObservationSequence as_sequence(const Value& v) { return lift_sequence(lift(v)); }

bool all_timed_distinct(const std::vector<Observation>& obs) {
  std::set<std::int64_t> seen;
  for (const auto& o : obs) {
    if (!o.t) return false;
    if (!seen.insert(*o.t).second) return false;
  }
  return true;
}

ObservationSequence merge_by_time(const ObservationSequence& a, const ObservationSequence& b) {
  ObservationSequence out;
  out.name = a.name;
  out.observations = a.observations;
  out.observations.insert(out.observations.end(), b.observations.begin(), b.observations.end());
  std::stable_sort(out.observations.begin(), out.observations.end(),
                   [](const Observation& x, const Observation& y) { return *x.t < *y.t; });
  return out;
}

void add_sequence(EvidentialStatement& es, const ObservationSequence& os) {
  for (const auto& s : es.sequences)
    if (s == os) return;
  es.sequences.push_back(os);
}

}  // namespace

bool is_sub_context(const SimpleContext& a, const SimpleContext& b) {
  for (const auto& [d, t] : a.pairs)
    if (!has_pair(b, d, t)) return false;
  return true;
}

SimpleContext difference(const SimpleContext& a, const SimpleContext& b) {
  SimpleContext r;
  for (const auto& [d, t] : a.pairs)
    if (!has_pair(b, d, t)) r.pairs.emplace_back(d, t);
  return r;
}

SimpleContext intersection(const SimpleContext& a, const SimpleContext& b) {
  SimpleContext r;
  for (const auto& [d, t] : a.pairs)
    if (has_pair(b, d, t)) r.pairs.emplace_back(d, t);
  return r;
}

SimpleContext override_with(const SimpleContext& a, const SimpleContext& b) {
  SimpleContext r = b;
  for (const auto& [d, t] : a.pairs)
    if (!b.get(d)) r = r.with(d, t);
  return r;
}

SimpleContext projection(const SimpleContext& c, const std::vector<std::string>& dims) {
  SimpleContext r;
  for (const auto& p : c.pairs)
    if (std::find(dims.begin(), dims.end(), p.first) != dims.end()) r.pairs.push_back(p);
  return r;
}

SimpleContext hiding(const SimpleContext& c, const std::vector<std::string>& dims) {
  SimpleContext r;
  for (const auto& p : c.pairs)
    if (std::find(dims.begin(), dims.end(), p.first) == dims.end()) r.pairs.push_back(p);
  return r;
}

SimpleContext tag_projection(const SimpleContext& c, const std::vector<Value>& tags) {
  SimpleContext r;
  for (const auto& p : c.pairs)
    if (contains(tags, p.second)) r.pairs.push_back(p);
  return r;
}

SimpleContext tag_hiding(const SimpleContext& c, const std::vector<Value>& tags) {
  SimpleContext r;
  for (const auto& p : c.pairs)
    if (!contains(tags, p.second)) r.pairs.push_back(p);
  return r;
}

bool conflicts(const SimpleContext& a, const SimpleContext& b) {
  for (const auto& [d, t] : a.pairs) {
    const Value* v = b.get(d);
    if (v && !(*v == t)) return true;
  }
  return false;
}

Value union_of(const SimpleContext& a, const SimpleContext& b) {
  if (!conflicts(a, b)) return Value(override_with(a, b));
  // per-dimension projections, then every choice of one micro context per dimension
  std::map<std::string, std::vector<Value>> choices;
  for (const auto* c : {&a, &b})
    for (const auto& [d, t] : c->pairs) {
      auto& v = choices[d];
      if (!contains(v, t)) v.push_back(t);
    }
  std::vector<SimpleContext> members{SimpleContext{}};
  for (const auto& [d, tags] : choices) {
    std::vector<SimpleContext> next;
    for (const auto& m : members)
      for (const auto& t : tags) next.push_back(m.with(d, t));
    members = std::move(next);
  }
  return Value(ContextSet(std::move(members)));
}

ContextSet union_of(const ContextSet& a, const ContextSet& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::set<std::string> d1, d2;
  for (const auto& m : a.members)
    for (const auto& p : m.pairs) d1.insert(p.first);
  for (const auto& m : b.members)
    for (const auto& p : m.pairs) d2.insert(p.first);
  std::vector<std::string> d3;
  std::set_intersection(d1.begin(), d1.end(), d2.begin(), d2.end(), std::back_inserter(d3));
  std::vector<SimpleContext> out;
  for (const auto& mi : a.members)
    for (const auto& mj : b.members) {
      out.push_back(override_with(mi, hiding(mj, d3)));
      out.push_back(override_with(mj, hiding(mi, d3)));
    }
  return ContextSet(std::move(out));
}

ContextSet override_with(const ContextSet& a, const ContextSet& b) {
  std::vector<SimpleContext> out;
  for (const auto& x : a.members)
    for (const auto& y : b.members) {
      auto r = override_with(x, y);
      if (!r.empty()) out.push_back(r);
    }
  return ContextSet(std::move(out));
}

std::vector<Observation> flatten(const Value& f) {
  switch (f.kind()) {
    case Value::Kind::observation: return {f.as_observation()};
    case Value::Kind::sequence: return f.as_sequence().observations;
    case Value::Kind::statement: {
      std::vector<Observation> out;
      for (const auto& os : f.as_statement().sequences)
        out.insert(out.end(), os.observations.begin(), os.observations.end());
      return out;
    }
    default: throw TypeError("expected a forensic context, got " + kind_name(f.kind()));
  }
}

Value union_forensic(const Value& a0, const Value& b0) {
  Value a = lift(a0), b = lift(b0);
  using K = Value::Kind;
  if (a.kind() == K::observation && b.kind() == K::observation) {
    const auto &x = a.as_observation(), &y = b.as_observation();
    if (x.t && y.t && *x.t != *y.t) {
      ObservationSequence os;
      os.observations = *x.t < *y.t ? std::vector<Observation>{x, y} : std::vector<Observation>{y, x};
      return Value(os);
    }
    EvidentialStatement es;
    es.sequences.push_back(ObservationSequence{"", {x}});
    es.sequences.push_back(ObservationSequence{"", {y}});
    return Value(es);
  }
  if (a.kind() == K::statement || b.kind() == K::statement) {
    EvidentialStatement es = a.kind() == K::statement ? a.as_statement() : EvidentialStatement{};
    if (a.kind() != K::statement) es.sequences.push_back(as_sequence(a));
    if (b.kind() == K::statement) {
      for (const auto& os : b.as_statement().sequences) add_sequence(es, os);
    } else {
      add_sequence(es, as_sequence(b));
    }
    return Value(es);
  }
  auto x = as_sequence(a), y = as_sequence(b);
  std::vector<Observation> all = x.observations;
  all.insert(all.end(), y.observations.begin(), y.observations.end());
  if (all_timed_distinct(all)) return Value(merge_by_time(x, y));
  EvidentialStatement es;
  es.sequences = {x, y};
  return Value(es);
}

Value combine(const Value& a0, const Value& b0) {
  Value a = lift(a0), b = lift(b0);
  using K = Value::Kind;
  if (a.kind() == K::statement || b.kind() == K::statement) return union_forensic(a, b);
  auto x = as_sequence(a), y = as_sequence(b);
  std::vector<Observation> all = x.observations;
  all.insert(all.end(), y.observations.begin(), y.observations.end());
  if (all_timed_distinct(all)) return Value(merge_by_time(x, y));
  x.observations = std::move(all);
  return Value(x);
}

Value product(const Value& a0, const Value& b0) {
  auto x = as_sequence(a0), y = as_sequence(b0);
  EvidentialStatement es;
  for (const auto& o1 : x.observations)
    for (const auto& o2 : y.observations) es.sequences.push_back(ObservationSequence{"", {o1, o2}});
  return Value(es);
}

bool membership(const std::string& op, const Value& a, const Value& b) {
  using K = Value::Kind;
  if (a.kind() == K::context && b.kind() == K::context) return is_sub_context(a.as_context(), b.as_context());
  if (is_context_kind(a) && is_context_kind(b)) {
    auto x = as_set(a), y = as_set(b);
    for (const auto& m : x.members)
      if (std::find(y.members.begin(), y.members.end(), m) == y.members.end()) return false;
    return true;
  }
  if (a.is_forensic() && b.is_forensic()) {
    auto inner = flatten(b);
    for (const auto& o : flatten(a))
      if (std::find(inner.begin(), inner.end(), o) == inner.end()) return false;
    return true;
  }
  std::vector<std::string> da, db;
  if (dimension_array(a) && dimension_set(b, db) && dimension_set(a, da)) {
    for (const auto& d : da)
      if (std::find(db.begin(), db.end(), d) == db.end()) return false;
    return true;
  }
  if (tag_like(b) || b.kind() == K::array) {
    auto tb = tag_listing(b);
    if (tag_like(a)) {
      for (const auto& t : tag_listing(a))
        if (!contains(tb, t)) return false;
      return true;
    }
    if (op == "in") {
      if (b.kind() == K::tag_set) return b.as_tag_set().contains(a);
      if (b.kind() == K::dimension && b.as_dimension().tags) return b.as_dimension().tags->contains(a);
      return contains(tb, a);
    }
  }
  mismatch(op, a, b);
}

Value set_like(const std::string& op, const Value& a, const Value& b) {
  using K = Value::Kind;
  if (op == "union" && (a.is_forensic() || b.is_forensic())) return union_forensic(a, b);
  if (a.kind() == K::context && b.kind() == K::context) {
    if (op == "union") return union_of(a.as_context(), b.as_context());
    if (op == "intersection") return Value(intersection(a.as_context(), b.as_context()));
    if (op == "difference") return Value(difference(a.as_context(), b.as_context()));
  }
  if (is_context_kind(a) && is_context_kind(b)) {
    auto x = as_set(a), y = as_set(b);
    if (op == "union") return Value(union_of(x, y));
    std::vector<SimpleContext> out;
    for (const auto& m : x.members) {
      bool in_y = std::find(y.members.begin(), y.members.end(), m) != y.members.end();
      if ((op == "intersection") == in_y) out.push_back(m);
    }
    return Value(ContextSet(std::move(out)));
  }
  if (a.is_forensic() || b.is_forensic()) {
    if (a.kind() == K::context || b.kind() == K::context) {
      const auto& c = a.kind() == K::context ? a.as_context() : b.as_context();
      const Value& f = a.kind() == K::context ? b : a;
      bool keep_matching = op == "intersection";
      if (op == "difference" && a.kind() == K::context) mismatch(op, a, b);
      return collapse(map_forensic(f, [&](const Observation& o) -> std::optional<Observation> {
        if (property_has(o, c) == keep_matching) return o;
        return std::nullopt;
      }));
    }
    if (a.is_forensic() && b.is_forensic()) {
      auto other = flatten(b);
      bool keep_present = op == "intersection";
      return map_forensic(a, [&](const Observation& o) -> std::optional<Observation> {
        bool present = std::find(other.begin(), other.end(), o) != other.end();
        if (present == keep_present) return o;
        return std::nullopt;
      });
    }
    mismatch(op, a, b);
  }
  std::vector<std::string> da, db;
  if ((dimension_array(a) || dimension_array(b)) && dimension_set(a, da) && dimension_set(b, db)) {
    Array out;
    std::vector<std::string> names;
    auto push = [&](const Value& e, const std::string& n) {
      if (std::find(names.begin(), names.end(), n) == names.end()) {
        names.push_back(n);
        out.push_back(e);
      }
    };
    auto elems = [](const Value& v) { return v.kind() == K::array ? v.as_array() : Array{v}; };
    for (const auto& e : elems(a)) {
      std::string n = e.kind() == K::dimension ? e.as_dimension().name : e.as_text();
      bool in_b = std::find(db.begin(), db.end(), n) != db.end();
      if (op == "union" || (op == "intersection") == in_b) push(e, n);
    }
    if (op == "union")
      for (const auto& e : elems(b)) push(e, e.kind() == K::dimension ? e.as_dimension().name : e.as_text());
    return Value(out);
  }
  if (tag_like(a) || tag_like(b)) {
    auto ta = tag_listing(a), tb = tag_listing(b);
    std::vector<Value> out;
    for (const auto& t : ta) {
      bool in_b = contains(tb, t);
      if (op == "union" || (op == "intersection") == in_b)
        if (!contains(out, t)) out.push_back(t);
    }
    if (op == "union")
      for (const auto& t : tb)
        if (!contains(out, t)) out.push_back(t);
    return tag_set_value(std::move(out), op != "union" && ordered_of(a));
  }
  mismatch(op, a, b);
}

Value override_values(const Value& a, const Value& b) {
  using K = Value::Kind;
  if (a.kind() == K::context && b.kind() == K::context) return Value(override_with(a.as_context(), b.as_context()));
  if (is_context_kind(a) && is_context_kind(b)) return Value(override_with(as_set(a), as_set(b)));
  if (a.is_forensic() && (b.kind() == K::context || b.kind() == K::observation)) {
    SimpleContext c;
    if (b.kind() == K::context) {
      c = b.as_context();
    } else if (b.as_observation().property.kind() == K::context) {
      c = b.as_observation().property.as_context();
    } else {
      mismatch("override", a, b);
    }
    return map_forensic(a, [&](const Observation& o) -> std::optional<Observation> {
      if (o.any_property || o.property.kind() != K::context) return o;
      Observation r = o;
      r.property = Value(override_with(o.property.as_context(), c));
      return r;
    });
  }
  mismatch("override", a, b);
}

Value filter(const std::string& mode, const Value& c, const Value& sel) {
  using K = Value::Kind;
  bool project = mode == "projection";
  std::vector<std::string> dims;
  bool by_dim = dimension_set(sel, dims);
  std::vector<Value> tags;
  if (!by_dim) tags = tag_listing(sel);
  auto apply = [&](const SimpleContext& s) {
    if (by_dim) return project ? projection(s, dims) : hiding(s, dims);
    return project ? tag_projection(s, tags) : tag_hiding(s, tags);
  };
  switch (c.kind()) {
    case K::context: return Value(apply(c.as_context()));
    case K::context_set: {
      std::vector<SimpleContext> out;
      for (const auto& m : c.as_context_set().members) {
        auto r = apply(m);
        if (!r.empty()) out.push_back(r);
      }
      return Value(ContextSet(std::move(out)));
    }
    case K::observation:
    case K::sequence:
    case K::statement:
      return map_forensic(c, [&](const Observation& o) -> std::optional<Observation> {
        if (o.any_property || o.property.kind() != K::context) return o;
        auto r = apply(o.property.as_context());
        if (r.empty()) return std::nullopt;
        Observation x = o;
        x.property = Value(r);
        return x;
      });
    default: throw TypeError("\\" + mode + " is not defined for " + kind_name(c.kind()));
  }
}

}  // namespace flucid::calculus
