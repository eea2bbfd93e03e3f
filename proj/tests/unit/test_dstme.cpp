#include "doctest.h"
#include "flucid/dstme.hpp"

using namespace flucid;
using namespace flucid::dstme;

namespace {

// Red, Yellow, Green
MassAssignment colors() {
  return MassAssignment({"Red", "Yellow", "Green"},
                        {{0b001, 0.35}, {0b010, 0.25}, {0b100, 0.15}, {0b011, 0.06},
                         {0b101, 0.05}, {0b110, 0.04}, {0b111, 0.10}});
}

MassAssignment witness(Subset said) { return MassAssignment({"limb", "no limb"}, {{said, 0.9}, {0b11, 0.1}}); }

}  // namespace

TEST_CASE("color table belief and plausibility") {
  auto m = colors();
  CHECK(belief(m, 0b011) == doctest::Approx(0.66).epsilon(1e-12));
  CHECK(plausibility(m, 0b011) == doctest::Approx(0.85).epsilon(1e-12));
  // the full published columns
  const double bel[] = {0, 0.35, 0.25, 0.66, 0.15, 0.55, 0.44, 1.0};
  const double pl[] = {0, 0.56, 0.45, 0.85, 0.34, 0.75, 0.65, 1.0};
  for (Subset a = 0; a < 8; ++a) {
    CHECK(std::abs(belief(m, a) - bel[a]) < 1e-9);
    CHECK(std::abs(plausibility(m, a) - pl[a]) < 1e-9);
  }
}

TEST_CASE("mass from belief recovers the color table") {
  auto m = colors();
  std::map<Subset, double> bel;
  for (Subset a = 0; a < 8; ++a) bel[a] = belief(m, a);
  auto back = mass_from_belief(bel, m.frame());
  for (Subset a = 1; a < 8; ++a) CHECK(std::abs(back.mass(a) - m.mass(a)) < 1e-9);

  std::map<Subset, double> vacuous;
  for (Subset a = 0; a < 8; ++a) vacuous[a] = a == 7 ? 1.0 : 0.0;
  auto v = mass_from_belief(vacuous, m.frame());
  CHECK(v.mass(7) == doctest::Approx(1.0));
  CHECK(v.mass(1) == doctest::Approx(0.0));
}

TEST_CASE("mass validation") {
  CHECK_THROWS_AS(MassAssignment({"a", "b"}, {{0b01, 0.5}}), DomainError);
  CHECK_THROWS_AS(MassAssignment({"a", "b"}, {{0, 0.5}, {0b11, 0.5}}), DomainError);
  CHECK_THROWS_AS(belief(colors(), 0b1000), DomainError);
}

TEST_CASE("two agreeing witnesses") {
  auto m = dempster_combine(witness(0b01), witness(0b01));
  CHECK(std::abs(belief(m, 0b01) - 0.99) < 1e-9);
}

TEST_CASE("two contradicting witnesses") {
  auto m = dempster_combine(witness(0b01), witness(0b10));
  CHECK(std::abs(m.mass(0b01) - 9.0 / 19) < 1e-9);
  CHECK(std::abs(m.mass(0b10) - 9.0 / 19) < 1e-9);
  CHECK(std::abs(m.mass(0b11) - 1.0 / 19) < 1e-9);
}

TEST_CASE("total conflict is undefined") {
  MassAssignment a({"x", "y"}, {{0b01, 1.0}});
  MassAssignment b({"x", "y"}, {{0b10, 1.0}});
  CHECK_THROWS_AS(dempster_combine(a, b), DomainError);
}

TEST_CASE("vacuous mass is neutral") {
  auto m = colors();
  auto c = dempster_combine(m, MassAssignment::vacuous(m.frame()));
  for (Subset a = 1; a < 8; ++a) CHECK(std::abs(c.mass(a) - m.mass(a)) < 1e-9);
}

TEST_CASE("credibility of forensic values") {
  CHECK(credibility(Measure::bel, Value(no_observation())) == 1.0);
  CHECK(credibility(Measure::bel, Value(zero_observation(Value("P")))) == 0.0);
  CHECK(credibility(Measure::pl, Value(no_observation())) == 1.0);
  auto o = make_observation(Value("P"), 1, Value(0), 0.85);
  CHECK(credibility(Measure::bel, Value(o)) == doctest::Approx(0.85));
  CHECK(credibility(Measure::pl, Value(o)) == doctest::Approx(0.85));

  ObservationSequence os{"os", {make_observation(Value("a"), 1, Value(0), 0.8),
                                make_observation(Value("b"), 1, Value(0), 0.6)}};
  CHECK(credibility(Measure::bel, Value(os)) == doctest::Approx(0.7));
  CHECK(credibility(Measure::pl, Value(os)) == doctest::Approx(0.7));

  auto o1 = make_observation(Value("P"), 1, Value(0), 0.9);
  CHECK(std::abs(credibility(Measure::bel, Value(o1), Value(o1)) - 0.99) < 1e-9);
  CHECK(credibility(Measure::bel, Value(SimpleContext{})) == 1.0);
}
