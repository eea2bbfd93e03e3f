#include "doctest.h"
#include "flucid/context_calculus.hpp"

using namespace flucid;
using namespace flucid::calculus;

namespace {
SimpleContext ctx(std::vector<std::pair<std::string, Value>> p) { return SimpleContext(std::move(p)); }
}

TEST_CASE("sub-context") {
  CHECK(is_sub_context(SimpleContext{}, ctx({{"d", Value(1)}})));
  CHECK(is_sub_context(ctx({{"d", Value(1)}}), ctx({{"d", Value(1)}, {"e", Value(2)}})));
  CHECK_FALSE(is_sub_context(ctx({{"d", Value(2)}}), ctx({{"d", Value(1)}, {"e", Value(2)}})));
  CHECK(membership("isSubContext", Value(SimpleContext{}), Value(ctx({{"d", Value(1)}}))));
  CHECK(membership("in", Value(TagSet::of({Value(1), Value(2)})), Value(TagSet::of({Value(1), Value(2), Value(3)}))));
}

TEST_CASE("difference and intersection") {
  auto a = ctx({{"d", Value(1)}, {"e", Value(2)}});
  CHECK(intersection(a, ctx({{"d", Value(1)}, {"f", Value(3)}})) == ctx({{"d", Value(1)}}));
  CHECK(difference(a, ctx({{"d", Value(1)}})) == ctx({{"e", Value(2)}}));
  CHECK(difference(a, a).empty());
}

TEST_CASE("override is right-biased") {
  auto a = ctx({{"d", Value(1)}, {"e", Value(2)}});
  CHECK(override_with(a, ctx({{"d", Value(5)}})) == ctx({{"d", Value(5)}, {"e", Value(2)}}));
  CHECK(override_with(SimpleContext{}, ctx({{"d", Value(5)}})) == ctx({{"d", Value(5)}}));
}

TEST_CASE("projection and hiding") {
  auto a = ctx({{"d", Value(1)}, {"e", Value(2)}});
  CHECK(projection(a, {"d"}) == ctx({{"d", Value(1)}}));
  CHECK(hiding(a, {"d"}) == ctx({{"e", Value(2)}}));
  CHECK(tag_projection(a, {Value(2)}) == ctx({{"e", Value(2)}}));
  CHECK(tag_hiding(a, {Value(2)}) == ctx({{"d", Value(1)}}));
}

TEST_CASE("union of simple contexts") {
  auto u = union_of(ctx({{"d", Value(1)}}), ctx({{"e", Value(2)}}));
  REQUIRE(u.kind() == Value::Kind::context);
  CHECK(u.as_context() == ctx({{"d", Value(1)}, {"e", Value(2)}}));
  CHECK(conflicts(ctx({{"d", Value(1)}}), ctx({{"d", Value(2)}})));
  CHECK_FALSE(conflicts(ctx({{"d", Value(1)}}), ctx({{"d", Value(1)}})));
}

TEST_CASE("union of timed observations orders by wall-clock time") {
  auto o1 = make_observation(Value("A"), 1, Value(0), 1.0, 10);
  auto o2 = make_observation(Value("B"), 1, Value(0), 1.0, 20);
  auto u = union_forensic(Value(o2), Value(o1));
  REQUIRE(u.kind() == Value::Kind::sequence);
  const auto& obs = u.as_sequence().observations;
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].property == Value("A"));
  CHECK(obs[1].property == Value("B"));
}

TEST_CASE("context set override is pairwise") {
  ContextSet a({ctx({{"d", Value(1)}}), ctx({{"d", Value(2)}, {"e", Value(1)}})});
  ContextSet b({ctx({{"d", Value(7)}})});
  auto r = override_with(a, b);
  // brute force over member pairs
  std::vector<SimpleContext> expect;
  for (const auto& x : a.members)
    for (const auto& y : b.members) {
      auto o = override_with(x, y);
      if (!o.empty()) expect.push_back(o);
    }
  CHECK(r == ContextSet(expect));
}

TEST_CASE("combine and product of sequences") {
  ObservationSequence a{"a", {make_observation(Value("p")), make_observation(Value("q"))}};
  ObservationSequence b{"b", {make_observation(Value("x")), make_observation(Value("y")), make_observation(Value("z"))}};
  auto p = product(Value(a), Value(b));
  REQUIRE(p.kind() == Value::Kind::statement);
  CHECK(p.as_statement().sequences.size() == 6);
  ObservationSequence empty{"e", {}};
  CHECK(combine(Value(a), Value(empty)) == Value(a));
}
