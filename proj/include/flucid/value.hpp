#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace flucid {

enum class Sentinel : std::uint8_t { bod, eod, inf_pos, inf_neg };

struct Char {
  char32_t code = 0;
  bool operator==(const Char&) const = default;
};

class Value;
struct SimpleContext;
struct ContextSet;
struct TagSet;
struct Dimension;
struct Observation;
struct ObservationSequence;
struct EvidentialStatement;

// Opaque callable owned by the evaluator.
struct Callable {
  virtual ~Callable() = default;
  virtual std::string name() const = 0;
};

using Array = std::vector<Value>;

class Value {
 public:
  enum class Kind {
    integer,
    real,
    boolean,
    text,
    character,
    array,
    context,
    context_set,
    tag_set,
    dimension,
    observation,
    sequence,
    statement,
    function,
    sentinel
  };

  Value() : v_(std::int64_t{0}) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(std::int64_t{i}) {}
  Value(double d) : v_(d) {}
  Value(bool b) : v_(b) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(Char c) : v_(c) {}
  Value(Array a) : v_(std::make_shared<const Array>(std::move(a))) {}
  Value(SimpleContext c);
  Value(ContextSet c);
  Value(TagSet t);
  Value(Dimension d);
  Value(Observation o);
  Value(ObservationSequence s);
  Value(EvidentialStatement e);
  Value(std::shared_ptr<const Callable> f) : v_(std::move(f)) {}
  Value(Sentinel s) : v_(s) {}

  static Value bod() { return Value(Sentinel::bod); }
  static Value eod() { return Value(Sentinel::eod); }
  static Value inf_pos() { return Value(Sentinel::inf_pos); }
  static Value inf_neg() { return Value(Sentinel::inf_neg); }

  Kind kind() const { return static_cast<Kind>(v_.index()); }

  bool is_int() const { return kind() == Kind::integer; }
  bool is_real() const { return kind() == Kind::real; }
  bool is_bool() const { return kind() == Kind::boolean; }
  bool is_text() const { return kind() == Kind::text; }
  bool is_number() const { return is_int() || is_real(); }
  bool is_sentinel() const { return kind() == Kind::sentinel; }
  bool is_eod() const { return is_sentinel() && sentinel() == Sentinel::eod; }
  bool is_bod() const { return is_sentinel() && sentinel() == Sentinel::bod; }
  // eod or bod
  bool is_boundary() const { return is_eod() || is_bod(); }
  bool is_forensic() const {
    auto k = kind();
    return k == Kind::observation || k == Kind::sequence || k == Kind::statement;
  }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  double as_real() const { return std::get<double>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  const std::string& as_text() const { return std::get<std::string>(v_); }
  Char as_char() const { return std::get<Char>(v_); }
  Sentinel sentinel() const { return std::get<Sentinel>(v_); }
  const Array& as_array() const { return *std::get<std::shared_ptr<const Array>>(v_); }
  const SimpleContext& as_context() const;
  const ContextSet& as_context_set() const;
  const TagSet& as_tag_set() const;
  const Dimension& as_dimension() const;
  const Observation& as_observation() const;
  const ObservationSequence& as_sequence() const;
  const EvidentialStatement& as_statement() const;
  const std::shared_ptr<const Callable>& as_function() const {
    return std::get<std::shared_ptr<const Callable>>(v_);
  }

  // numeric view; ints widen to double
  double to_real() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  std::variant<std::int64_t, double, bool, std::string, Char, std::shared_ptr<const Array>,
               std::shared_ptr<const SimpleContext>, std::shared_ptr<const ContextSet>,
               std::shared_ptr<const TagSet>, std::shared_ptr<const Dimension>,
               std::shared_ptr<const Observation>, std::shared_ptr<const ObservationSequence>,
               std::shared_ptr<const EvidentialStatement>, std::shared_ptr<const Callable>,
               Sentinel>
      v_;
};

// Total order used for canonical sets; -1, 0, 1.
int compare(const Value& a, const Value& b);
inline bool operator<(const Value& a, const Value& b) { return compare(a, b) < 0; }

std::string kind_name(Value::Kind k);

struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimpleContext {
  // sorted by dimension name, unique names
  std::vector<std::pair<std::string, Value>> pairs;

  SimpleContext() = default;
  // throws ValueError on duplicate dimension
  explicit SimpleContext(std::vector<std::pair<std::string, Value>> p);

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }
  const Value* get(const std::string& dim) const;
  SimpleContext with(const std::string& dim, Value tag) const;
  SimpleContext without(const std::string& dim) const;
  std::vector<std::string> dimensions() const;

  bool operator==(const SimpleContext&) const = default;
};

struct ContextSet {
  // sorted, unique
  std::vector<SimpleContext> members;

  ContextSet() = default;
  explicit ContextSet(std::vector<SimpleContext> m);
  bool empty() const { return members.empty(); }
  bool operator==(const ContextSet&) const = default;
};

struct TagSet {
  bool ordered = true;
  bool finite = false;
  bool periodic = false;
  // finite case
  std::vector<Value> tags;
  // generator case (infinite or range)
  std::optional<std::int64_t> from, to;
  std::int64_t step = 1;

  static TagSet naturals();
  static TagSet of(std::vector<Value> tags, bool ordered = false);
  static TagSet range(std::int64_t from, std::int64_t to, std::int64_t step = 1);

  // number of tags when finite
  std::optional<std::int64_t> size() const;
  std::optional<std::int64_t> index_of(const Value& tag) const;
  std::optional<Value> at(std::int64_t index) const;
  bool contains(const Value& tag) const { return index_of(tag).has_value(); }
  // explicit listing (only for finite sets)
  std::vector<Value> listing() const;
  // tags come from an integer range generator
  bool integer_tags() const;

  bool operator==(const TagSet&) const = default;
};

struct Dimension {
  std::string name;
  std::shared_ptr<const TagSet> tags;  // null: the natural numbers
  bool operator==(const Dimension& o) const;
};

struct Observation {
  Value property;
  bool any_property = false;  // the $ wildcard
  std::int64_t min = 1;
  std::int64_t max = 0;
  bool max_inf = false;
  double w = 1.0;
  std::optional<std::int64_t> t;
  std::string description;  // `=>` annotation, inert

  bool is_no_observation() const { return any_property; }
  bool is_zero_observation() const { return !any_property && min == 0 && max == 0; }
  bool operator==(const Observation& o) const;
};

struct ObservationSequence {
  std::string name;
  std::vector<Observation> observations;
  bool operator==(const ObservationSequence& o) const { return observations == o.observations; }
};

struct EvidentialStatement {
  std::string name;
  std::vector<ObservationSequence> sequences;
  bool operator==(const EvidentialStatement& o) const { return sequences == o.sequences; }
};

// Constructors with validation.
Observation make_observation(Value property, std::optional<std::int64_t> min = std::nullopt,
                             std::optional<Value> max = std::nullopt,
                             std::optional<double> w = std::nullopt,
                             std::optional<std::int64_t> t = std::nullopt);
Observation no_observation();
Observation zero_observation(Value property);

// Contexts and scalars become observations, context sets become sequences.
Value lift(const Value& v);
Observation lift_observation(const Value& v);
ObservationSequence lift_sequence(const Value& v);
EvidentialStatement lift_statement(const Value& v);

// Concrete Forensic Lucid syntax for a value.
std::string to_source(const Value& v);
std::string quote(const std::string& s);

bool truthy(const Value& v);

}  // namespace flucid
