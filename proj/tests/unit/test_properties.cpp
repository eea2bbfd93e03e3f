#include "../common/properties.hpp"
#include "doctest.h"

namespace {
void expect(const props::Outcome& o) {
  INFO(o.name << ": " << o.failures << " of " << o.cases << " failed; first: " << o.first_failure);
  CHECK(o.ok());
}
}  // namespace

// smaller runs than the acceptance suite, different seeds
TEST_CASE("translation equivalence") { expect(props::translation_equivalence(100, 11)); }
TEST_CASE("ERA agrees with brute force") { expect(props::era_oracle(60, 12)); }
TEST_CASE("mass laws") { expect(props::mass_laws(200, 13)); }
TEST_CASE("context laws") { expect(props::context_laws(300, 14)); }
TEST_CASE("encoder round trip") { expect(props::encoder_round_trip(10, 15)); }
