#include "flucid/value.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace flucid {

Value::Value(SimpleContext c) : v_(std::make_shared<const SimpleContext>(std::move(c))) {}
Value::Value(ContextSet c) : v_(std::make_shared<const ContextSet>(std::move(c))) {}
Value::Value(TagSet t) : v_(std::make_shared<const TagSet>(std::move(t))) {}
Value::Value(Dimension d) : v_(std::make_shared<const Dimension>(std::move(d))) {}
Value::Value(Observation o) : v_(std::make_shared<const Observation>(std::move(o))) {}
Value::Value(ObservationSequence s)
    : v_(std::make_shared<const ObservationSequence>(std::move(s))) {}
Value::Value(EvidentialStatement e)
    : v_(std::make_shared<const EvidentialStatement>(std::move(e))) {}

const SimpleContext& Value::as_context() const {
  return *std::get<std::shared_ptr<const SimpleContext>>(v_);
}
const ContextSet& Value::as_context_set() const {
  return *std::get<std::shared_ptr<const ContextSet>>(v_);
}
const TagSet& Value::as_tag_set() const { return *std::get<std::shared_ptr<const TagSet>>(v_); }
const Dimension& Value::as_dimension() const {
  return *std::get<std::shared_ptr<const Dimension>>(v_);
}
const Observation& Value::as_observation() const {
  return *std::get<std::shared_ptr<const Observation>>(v_);
}
const ObservationSequence& Value::as_sequence() const {
  return *std::get<std::shared_ptr<const ObservationSequence>>(v_);
}
const EvidentialStatement& Value::as_statement() const {
  return *std::get<std::shared_ptr<const EvidentialStatement>>(v_);
}

double Value::to_real() const {
  if (is_int()) return static_cast<double>(as_int());
  if (is_real()) return as_real();
  if (is_bool()) return as_bool() ? 1.0 : 0.0;
  throw ValueError("expected a number, got " + kind_name(kind()));
}

std::string kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::integer: return "integer";
    case Value::Kind::real: return "real";
    case Value::Kind::boolean: return "boolean";
    case Value::Kind::text: return "string";
    case Value::Kind::character: return "character";
    case Value::Kind::array: return "array";
    case Value::Kind::context: return "simple context";
    case Value::Kind::context_set: return "context set";
    case Value::Kind::tag_set: return "tag set";
    case Value::Kind::dimension: return "dimension";
    case Value::Kind::observation: return "observation";
    case Value::Kind::sequence: return "observation sequence";
    case Value::Kind::statement: return "evidential statement";
    case Value::Kind::function: return "function";
    case Value::Kind::sentinel: return "sentinel";
  }
  return "?";
}

namespace {

template <class T>
int cmp3(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int compare_contexts(const SimpleContext& a, const SimpleContext& b) {
  std::size_t n = std::min(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = a.pairs[i].first.compare(b.pairs[i].first)) return c < 0 ? -1 : 1;
    if (int c = compare(a.pairs[i].second, b.pairs[i].second)) return c;
  }
  return cmp3(a.pairs.size(), b.pairs.size());
}

template <class T, class F>
int compare_seq(const std::vector<T>& a, const std::vector<T>& b, F f) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = f(a[i], b[i])) return c;
  return cmp3(a.size(), b.size());
}

int compare_observations(const Observation& a, const Observation& b) {
  if (int c = cmp3(a.any_property, b.any_property)) return c;
  if (!a.any_property)
    if (int c = compare(a.property, b.property)) return c;
  if (int c = cmp3(a.min, b.min)) return c;
  if (int c = cmp3(a.max_inf, b.max_inf)) return c;
  if (!a.max_inf)
    if (int c = cmp3(a.max, b.max)) return c;
  if (int c = cmp3(a.w, b.w)) return c;
  return cmp3(a.t, b.t);
}

int compare_sequences(const ObservationSequence& a, const ObservationSequence& b) {
  return compare_seq(a.observations, b.observations, compare_observations);
}

}  // namespace

bool Observation::operator==(const Observation& o) const { return compare_observations(*this, o) == 0; }

bool Dimension::operator==(const Dimension& o) const {
  if (name != o.name) return false;
  if (!tags || !o.tags) return !tags && !o.tags;
  return *tags == *o.tags;
}

int compare(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) {
    // INF- sits below everything so that it also precedes every integer
    auto rank = [](const Value& v) { return v.is_sentinel() && v.sentinel() == Sentinel::inf_neg ? -1 : static_cast<int>(v.kind()); };
    return cmp3(rank(a), rank(b));
  }
  switch (a.kind()) {
    case Value::Kind::integer: return cmp3(a.as_int(), b.as_int());
    case Value::Kind::real: return cmp3(a.as_real(), b.as_real());
    case Value::Kind::boolean: return cmp3(a.as_bool(), b.as_bool());
    case Value::Kind::text: {
      int c = a.as_text().compare(b.as_text());
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Value::Kind::character: return cmp3(a.as_char().code, b.as_char().code);
    case Value::Kind::array: return compare_seq(a.as_array(), b.as_array(), compare);
    case Value::Kind::context: return compare_contexts(a.as_context(), b.as_context());
    case Value::Kind::context_set:
      return compare_seq(a.as_context_set().members, b.as_context_set().members, compare_contexts);
    case Value::Kind::tag_set: {
      const auto &x = a.as_tag_set(), &y = b.as_tag_set();
      if (int c = compare_seq(x.tags, y.tags, compare)) return c;
      if (int c = cmp3(x.from, y.from)) return c;
      if (int c = cmp3(x.to, y.to)) return c;
      if (int c = cmp3(x.step, y.step)) return c;
      if (int c = cmp3(x.ordered, y.ordered)) return c;
      if (int c = cmp3(x.finite, y.finite)) return c;
      return cmp3(x.periodic, y.periodic);
    }
    case Value::Kind::dimension: {
      const auto &x = a.as_dimension(), &y = b.as_dimension();
      if (int c = x.name.compare(y.name)) return c < 0 ? -1 : 1;
      if (!x.tags || !y.tags) return cmp3(x.tags != nullptr, y.tags != nullptr);
      return compare(Value(*x.tags), Value(*y.tags));
    }
    case Value::Kind::observation:
      return compare_observations(a.as_observation(), b.as_observation());
    case Value::Kind::sequence: return compare_sequences(a.as_sequence(), b.as_sequence());
    case Value::Kind::statement:
      return compare_seq(a.as_statement().sequences, b.as_statement().sequences,
                         compare_sequences);
    case Value::Kind::function:
      return cmp3(a.as_function().get(), b.as_function().get());
    case Value::Kind::sentinel: {
      auto rank = [](Sentinel x) { return x == Sentinel::inf_neg ? -1 : static_cast<int>(x); };
      return cmp3(rank(a.sentinel()), rank(b.sentinel()));
    }
  }
  return 0;
}

bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }

SimpleContext::SimpleContext(std::vector<std::pair<std::string, Value>> p) : pairs(std::move(p)) {
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t i = 1; i < pairs.size(); ++i)
    if (pairs[i].first == pairs[i - 1].first)
      throw ValueError("dimension '" + pairs[i].first + "' appears twice in a simple context");
}

const Value* SimpleContext::get(const std::string& dim) const {
  auto it = std::lower_bound(pairs.begin(), pairs.end(), dim,
                             [](const auto& p, const std::string& d) { return p.first < d; });
  if (it != pairs.end() && it->first == dim) return &it->second;
  return nullptr;
}

SimpleContext SimpleContext::with(const std::string& dim, Value tag) const {
  SimpleContext r = *this;
  auto it = std::lower_bound(r.pairs.begin(), r.pairs.end(), dim,
                             [](const auto& p, const std::string& d) { return p.first < d; });
  if (it != r.pairs.end() && it->first == dim)
    it->second = std::move(tag);
  else
    r.pairs.insert(it, {dim, std::move(tag)});
  return r;
}

SimpleContext SimpleContext::without(const std::string& dim) const {
  SimpleContext r = *this;
  std::erase_if(r.pairs, [&](const auto& p) { return p.first == dim; });
  return r;
}

std::vector<std::string> SimpleContext::dimensions() const {
  std::vector<std::string> out;
  for (const auto& p : pairs) out.push_back(p.first);
  return out;
}

ContextSet::ContextSet(std::vector<SimpleContext> m) : members(std::move(m)) {
  std::sort(members.begin(), members.end(),
            [](const auto& x, const auto& y) { return compare_contexts(x, y) < 0; });
  members.erase(std::unique(members.begin(), members.end()), members.end());
}

TagSet TagSet::naturals() {
  TagSet t;
  t.ordered = true;
  t.finite = false;
  t.from = 0;
  return t;
}

TagSet TagSet::of(std::vector<Value> tags, bool ordered) {
  for (std::size_t i = 0; i < tags.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (tags[i] == tags[j]) throw ValueError("duplicate tag " + to_source(tags[i]) + " in tag set");
  TagSet t;
  t.ordered = ordered;
  t.finite = true;
  t.tags = std::move(tags);
  return t;
}

TagSet TagSet::range(std::int64_t from, std::int64_t to, std::int64_t step) {
  if (step <= 0) throw ValueError("tag set step must be positive");
  TagSet t;
  t.ordered = true;
  t.finite = true;
  t.from = from;
  t.to = to;
  t.step = step;
  return t;
}

std::optional<std::int64_t> TagSet::size() const {
  if (!from) return static_cast<std::int64_t>(tags.size());
  if (!to) return std::nullopt;
  if (*to < *from) return 0;
  return (*to - *from) / step + 1;
}

std::optional<std::int64_t> TagSet::index_of(const Value& tag) const {
  if (!from) {
    for (std::size_t i = 0; i < tags.size(); ++i)
      if (tags[i] == tag) return static_cast<std::int64_t>(i);
    return std::nullopt;
  }
  if (!tag.is_int()) return std::nullopt;
  std::int64_t v = tag.as_int();
  if (v < *from || (to && v > *to) || (v - *from) % step != 0) return std::nullopt;
  return (v - *from) / step;
}

std::optional<Value> TagSet::at(std::int64_t index) const {
  if (index < 0) return std::nullopt;
  if (!from) {
    if (index >= static_cast<std::int64_t>(tags.size())) return std::nullopt;
    return tags[static_cast<std::size_t>(index)];
  }
  std::int64_t v = *from + index * step;
  if (to && v > *to) return std::nullopt;
  return Value(v);
}

std::vector<Value> TagSet::listing() const {
  if (!from) return tags;
  if (!to) throw ValueError("cannot list an infinite tag set");
  std::vector<Value> out;
  for (std::int64_t v = *from; v <= *to; v += step) out.emplace_back(v);
  return out;
}

bool TagSet::integer_tags() const { return from.has_value(); }

Observation make_observation(Value property, std::optional<std::int64_t> min,
                             std::optional<Value> max, std::optional<double> w,
                             std::optional<std::int64_t> t) {
  Observation o;
  o.property = std::move(property);
  if (min) {
    if (*min < 0) throw ValueError("min must be non-negative");
    o.min = *min;
  }
  if (max) {
    if (max->is_sentinel() && max->sentinel() == Sentinel::inf_pos) {
      o.max_inf = true;
      o.max = 0;
    } else if (max->is_int()) {
      if (max->as_int() < 0) throw ValueError("max must be non-negative");
      o.max = max->as_int();
    } else {
      throw ValueError("max must be a non-negative integer or INF+");
    }
  }
  if (w) {
    if (!(*w >= 0.0 && *w <= 1.0)) throw ValueError("w must be within [0,1]");
    o.w = *w;
  }
  o.t = t;
  return o;
}

Observation no_observation() {
  Observation o;
  o.any_property = true;
  o.property = Value::eod();
  o.min = 0;
  o.max = 0;
  o.max_inf = true;
  o.w = 1.0;
  return o;
}

Observation zero_observation(Value property) {
  Observation o;
  o.property = std::move(property);
  o.min = 0;
  o.max = 0;
  return o;
}

Observation lift_observation(const Value& v) {
  if (v.kind() == Value::Kind::observation) return v.as_observation();
  if (v.kind() == Value::Kind::sequence || v.kind() == Value::Kind::statement)
    throw ValueError("cannot lift " + kind_name(v.kind()) + " to an observation");
  return make_observation(v);
}

ObservationSequence lift_sequence(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::sequence: return v.as_sequence();
    case Value::Kind::statement: throw ValueError("cannot lift an evidential statement to a sequence");
    case Value::Kind::context_set: {
      ObservationSequence os;
      for (const auto& c : v.as_context_set().members) os.observations.push_back(make_observation(c));
      return os;
    }
    case Value::Kind::array: {
      ObservationSequence os;
      for (const auto& e : v.as_array()) os.observations.push_back(lift_observation(e));
      return os;
    }
    default: {
      ObservationSequence os;
      os.observations.push_back(lift_observation(v));
      return os;
    }
  }
}

EvidentialStatement lift_statement(const Value& v) {
  if (v.kind() == Value::Kind::statement) return v.as_statement();
  EvidentialStatement es;
  if (v.kind() == Value::Kind::array) {
    for (const auto& e : v.as_array()) es.sequences.push_back(lift_sequence(e));
    return es;
  }
  es.sequences.push_back(lift_sequence(v));
  return es;
}

Value lift(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::observation:
    case Value::Kind::sequence:
    case Value::Kind::statement: return v;
    case Value::Kind::context_set: return Value(lift_sequence(v));
    default: return Value(lift_observation(v));
  }
}

bool truthy(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::boolean: return v.as_bool();
    case Value::Kind::integer: return v.as_int() != 0;
    case Value::Kind::real: return v.as_real() != 0.0;
    default: throw ValueError("expected a boolean, got " + kind_name(v.kind()));
  }
}

namespace {

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
}

std::string real_text(double d) {
  if (std::isnan(d)) return "(0.0/0.0)";
  if (std::isinf(d)) return d > 0 ? "(1.0/0.0)" : "(-1.0/0.0)";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  // the lexer wants a digit after the point and before an exponent
  auto e = s.find('e');
  if (e != std::string::npos && s.find('.') == std::string::npos) s.insert(e, ".0");
  return s;
}

std::string observation_text(const Observation& o) {
  if (o.any_property) return "$";
  std::string s = "(" + to_source(o.property);
  if (!o.description.empty()) s += " => " + quote(o.description);
  s += ", " + std::to_string(o.min) + ", " + (o.max_inf ? std::string("INF+") : std::to_string(o.max));
  s += ", " + real_text(o.w);
  if (o.t) s += ", " + std::to_string(*o.t);
  return s + ")";
}

std::string sequence_text(const ObservationSequence& os) {
  std::string s = "{";
  for (std::size_t i = 0; i < os.observations.size(); ++i) {
    if (i) s += ", ";
    s += observation_text(os.observations[i]);
  }
  return s + "}";
}

}  // namespace

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string to_source(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::integer: return std::to_string(v.as_int());
    case Value::Kind::real: return real_text(v.as_real());
    case Value::Kind::boolean: return v.as_bool() ? "true" : "false";
    case Value::Kind::text: return quote(v.as_text());
    case Value::Kind::character: {
      char32_t c = v.as_char().code;
      if (c == '\'') return "'\\''";
      if (c == '\\') return "'\\\\'";
      if (c == '\n') return "'\\n'";
      if (c == '\t') return "'\\t'";
      std::string s = "'";
      append_utf8(s, c);
      return s + "'";
    }
    case Value::Kind::array: {
      std::string s = "[";
      const auto& a = v.as_array();
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += ", ";
        s += to_source(a[i]);
      }
      return s + "]";
    }
    case Value::Kind::context: {
      std::string s = "[";
      const auto& c = v.as_context();
      for (std::size_t i = 0; i < c.pairs.size(); ++i) {
        if (i) s += ", ";
        s += c.pairs[i].first + ":" + to_source(c.pairs[i].second);
      }
      return s + "]";
    }
    case Value::Kind::context_set: {
      std::string s = "{";
      const auto& m = v.as_context_set().members;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += ", ";
        s += to_source(Value(m[i]));
      }
      return s + "}";
    }
    case Value::Kind::tag_set: {
      const auto& t = v.as_tag_set();
      if (t.from) {
        std::string s = "{" + std::to_string(*t.from) + " to " +
                        (t.to ? std::to_string(*t.to) : std::string("INF+"));
        if (t.step != 1) s += " step " + std::to_string(t.step);
        return s + "}";
      }
      std::string s = "{";
      for (std::size_t i = 0; i < t.tags.size(); ++i) {
        if (i) s += ", ";
        s += to_source(t.tags[i]);
      }
      return s + "}";
    }
    case Value::Kind::dimension: return v.as_dimension().name;
    case Value::Kind::observation: return observation_text(v.as_observation());
    case Value::Kind::sequence: return sequence_text(v.as_sequence());
    case Value::Kind::statement: {
      std::string s = "{";
      const auto& es = v.as_statement().sequences;
      for (std::size_t i = 0; i < es.size(); ++i) {
        if (i) s += ", ";
        s += sequence_text(es[i]);
      }
      return s + "}";
    }
    case Value::Kind::function: return v.as_function()->name();
    case Value::Kind::sentinel:
      switch (v.sentinel()) {
        case Sentinel::bod: return "bod";
        case Sentinel::eod: return "eod";
        case Sentinel::inf_pos: return "INF+";
        case Sentinel::inf_neg: return "INF-";
      }
  }
  return "?";
}

}  // namespace flucid
