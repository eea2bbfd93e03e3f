#include "doctest.h"
#include "flucid/value.hpp"

using namespace flucid;

TEST_CASE("observation defaults fill (P,1,0,1.0)") {
  auto o = make_observation(Value("A printed"));
  CHECK(o.property == Value("A printed"));
  CHECK(o.min == 1);
  CHECK(o.max == 0);
  CHECK_FALSE(o.max_inf);
  CHECK(o.w == 1.0);
  CHECK_FALSE(o.t.has_value());

  auto p = make_observation(Value("A printed"), 1, Value(0), 0.85);
  CHECK(p.w == 0.85);
}

TEST_CASE("observation validation names the field") {
  CHECK_THROWS_WITH_AS(make_observation(Value("P"), -1, Value(0)), "min must be non-negative", ValueError);
  CHECK_THROWS_AS(make_observation(Value("P"), 1, Value(0), 1.5), ValueError);
  CHECK_THROWS_AS(make_observation(Value("P"), 1, Value(-2)), ValueError);
  auto inf = make_observation(Value("P"), 0, Value::inf_pos());
  CHECK(inf.max_inf);
}

TEST_CASE("no-observation and zero-observation") {
  auto n = no_observation();
  CHECK(n.is_no_observation());
  CHECK(n.min == 0);
  CHECK(n.max_inf);
  CHECK(n.w == 1.0);
  auto z = zero_observation(Value("P"));
  CHECK(z.is_zero_observation());
  CHECK(z.min == 0);
  CHECK(z.max == 0);
}

TEST_CASE("simple contexts reject duplicate dimensions") {
  CHECK_THROWS_AS(SimpleContext({{"d", Value(1)}, {"d", Value(2)}}), ValueError);
  SimpleContext c({{"e", Value(2)}, {"d", Value(1)}});
  CHECK(c.dimensions() == std::vector<std::string>{"d", "e"});
  CHECK(*c.get("e") == Value(2));
  CHECK(c.get("f") == nullptr);
  CHECK(c.with("d", Value(9)).get("d")->as_int() == 9);
  CHECK(c.without("d").size() == 1);
}

TEST_CASE("tag sets") {
  auto r = TagSet::range(1, 31);
  CHECK(r.size() == 31);
  CHECK(r.index_of(Value(5)) == 4);
  CHECK(r.at(30) == Value(31));
  CHECK_FALSE(r.at(31).has_value());
  CHECK(r.integer_tags());
  CHECK_FALSE(TagSet::of({Value(1), Value(2)}).integer_tags());

  auto n = TagSet::naturals();
  CHECK_FALSE(n.size().has_value());
  CHECK(n.index_of(Value(12)) == 12);
  CHECK_THROWS_AS(n.listing(), ValueError);

  auto t = TagSet::of({Value("b"), Value("a")});
  CHECK(t.index_of(Value("b")) == 0);
  CHECK(t.listing() == std::vector<Value>{Value("b"), Value("a")});
  CHECK_THROWS_AS(TagSet::of({Value(1), Value(1)}), ValueError);
}

TEST_CASE("INF+ and INF- bracket every integer") {
  for (std::int64_t i : {std::int64_t{-1000000}, std::int64_t{0}, std::int64_t{1} << 62}) {
    CHECK(compare(Value::inf_pos(), Value(i)) > 0);
    CHECK(compare(Value::inf_neg(), Value(i)) < 0);
  }
  // still a total order across kinds
  CHECK(compare(Value::inf_neg(), Value("a")) < 0);
  CHECK(compare(Value::inf_neg(), Value::inf_pos()) < 0);
}

TEST_CASE("lifting") {
  SimpleContext c({{"d", Value(1)}});
  auto o = lift_observation(Value(c));
  CHECK(o.property == Value(c));
  CHECK(o.min == 1);
  CHECK(o.w == 1.0);

  ContextSet cs({SimpleContext({{"d", Value(1)}}), SimpleContext({{"d", Value(2)}})});
  CHECK(lift_sequence(Value(cs)).observations.size() == 2);

  Value ov(o);
  CHECK(lift(ov) == ov);
  CHECK(lift(lift(Value(c))) == lift(Value(c)));
}

TEST_CASE("to_source renders concrete syntax") {
  CHECK(to_source(Value(42)) == "42");
  CHECK(to_source(Value("x")) == "\"x\"");
  CHECK(to_source(Value::eod()) == "eod");
  CHECK(to_source(Value(SimpleContext({{"d", Value(1)}}))) == "[d:1]");
}
