#include <fstream>
#include <sstream>

#include "doctest.h"
#include "flucid/era.hpp"

using namespace flucid::era;

namespace {

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Listing 9.5 printer: two queue slots, S = {empty, A_deleted, B_deleted} are free
StateMachine printer() {
  std::vector<std::string> dom = {"empty", "A", "B", "A_deleted", "B_deleted"};
  auto free = [&](std::size_t x) { return dom[x] != "A" && dom[x] != "B"; };
  std::vector<std::string> states;
  for (const auto& a : dom)
    for (const auto& b : dom) states.push_back("(" + a + "," + b + ")");
  auto fsm = make_machine(states, {"add_A", "add_B", "take"});
  auto idx = [&](std::size_t a, std::size_t b) { return static_cast<int>(a * dom.size() + b); };
  for (std::size_t i = 0; i < dom.size(); ++i)
    for (std::size_t j = 0; j < dom.size(); ++j) {
      int q = idx(i, j);
      auto add = [&](std::size_t x) {
        if (i == x || j == x) return q;
        if (free(i)) return idx(x, j);
        if (free(j)) return idx(i, x);
        return q;
      };
      fsm.set(0, q, add(1));
      fsm.set(1, q, add(2));
      int take = q;
      if (dom[i] == "A") take = idx(3, j);
      else if (dom[i] == "B") take = idx(4, j);
      else if (dom[j] == "A") take = idx(i, 3);
      else if (dom[j] == "B") take = idx(i, 4);
      fsm.set(2, q, take);
    }
  fsm.validate();
  return fsm;
}

Property state_is(const StateMachine& m, const std::string& s) {
  return Property{s, std::set<int>{*m.state_index(s)}, std::nullopt, {}};
}

}  // namespace

TEST_CASE("predecessors") {
  auto m = printer();
  auto pred = invert_transition(m);
  auto has = [&](const std::string& to, const std::string& ev, const std::string& from) {
    for (const auto& s : pred[static_cast<std::size_t>(*m.state_index(to))])
      if (s.event == *m.event_index(ev) && s.state == *m.state_index(from)) return true;
    return false;
  };
  CHECK(has("(A,empty)", "add_A", "(empty,empty)"));
  CHECK(has("(A_deleted,B)", "take", "(A,B)"));
  auto lonely = make_machine({"a", "b"}, {"e"});
  lonely.set(0, 0, 0);
  lonely.set(0, 1, 0);
  CHECK(invert_transition(lonely)[1].empty());
}

TEST_CASE("psi inverse") {
  auto m = printer();
  CHECK(psi_inverse_set(m, {}).empty());
  int bb = *m.state_index("(B_deleted,B_deleted)");
  std::set<Computation> y{{Step{any_event, bb}}};
  auto x = psi_inverse_set(m, y);
  int take = *m.event_index("take");
  CHECK(x.count({Step{take, *m.state_index("(B,B_deleted)")}, Step{any_event, bb}}));
  CHECK(x.count({Step{take, *m.state_index("(B_deleted,B)")}, Step{any_event, bb}}));
  // oracle: one extension per predecessor edge
  CHECK(x.size() == invert_transition(m)[static_cast<std::size_t>(bb)].size());
}

TEST_CASE("fixed-length meaning agrees with explicit back-tracing") {
  auto m = printer();
  std::vector<std::pair<Property, std::int64_t>> os = {{Property::any(), 3},
                                                       {state_is(m, "(B_deleted,B_deleted)"), 1}};
  auto fast = meaning_fixed_length(m, os);
  auto slow = meaning_by_backtracing(m, os);
  CHECK(fast.len == Lens{3, 1});
  CHECK(fast.runs.count() == doctest::Approx(static_cast<double>(slow.size())));
  for (const auto& c : slow) {
    CHECK(chained(m, c));
    CHECK(fast.runs.contains(c));
  }
  for (const auto& c : fast.runs.enumerate(100000)) CHECK(slow.count(c));
}

TEST_CASE("generic expansion") {
  SequenceSpec os = {{Property::any(), 1, 3, false}, {Property::any(), 1, 2, false}};
  CHECK(expand_generic(os, 0).size() == 12);
  SequenceSpec fixed = {{Property::any(), 2, 0, false}};
  CHECK(expand_generic(fixed, 0) == std::vector<Lens>{{2}});
  SequenceSpec open = {{Property::any(), 0, 0, true}};
  CHECK(expand_generic(open, 3) == std::vector<Lens>{{0}, {1}, {2}, {3}});
}

TEST_CASE("comb on abstract computations") {
  using C = std::set<int>;
  MPR<C> m1{{2, 1, 4}, {1, 2, 3}};
  MPR<C> m2{{3, 4}, {4, 5, 6}};
  MPR<C> m3{{4, 4}, {1, 2, 3, 4}};
  MPR<C> m4{{5, 2, 1}, {2, 3, 5}};
  auto r = comb(m4, m3);
  REQUIRE(r.has_value());
  CHECK(r->lens == std::vector<Lens>{{4, 4}, {5, 2, 1}});
  CHECK(r->runs == C{2, 3});
  CHECK_FALSE(comb(m1, m2).has_value());
  auto self = comb(m3, m3);
  REQUIRE(self.has_value());
  CHECK(self->lens == std::vector<Lens>{{4, 4}, {4, 4}});
  CHECK(self->runs == m3.runs);
}

TEST_CASE("fsm file with properties") {
  auto f = parse_fsm(read(std::string(FIXTURE_DIR) + "/blackmail.fsm"));
  CHECK(f.machine.num_states() == 5);
  CHECK(f.machine.num_events() == 3);
  REQUIRE(f.properties.count("unrelated"));
  CHECK(f.properties.at("unrelated").allow_events->size() == 1);
  CHECK(f.properties.at("blackmail").states->size() == 2);
  CHECK_THROWS_AS(parse_fsm("a s -> t\na s -> u\n"), EraError);
}

TEST_CASE("printer claims") {
  auto m = printer();
  ObservationSpec dollar{Property::any(), 0, 0, true};
  auto at = [&](const std::string& s) { return ObservationSpec{state_is(m, s), 1, 0, false}; };
  SequenceSpec final_os = {dollar, at("(B_deleted,B_deleted)")};
  SequenceSpec manuf = {at("(empty,empty)"), dollar};
  auto ok = check_claim(m, {final_os, manuf});
  CHECK(ok.consistent);
  REQUIRE_FALSE(ok.backtraces.empty());
  for (const auto& c : ok.backtraces) {
    CHECK(chained(m, c));
    CHECK(m.states[static_cast<std::size_t>(c.back().state)] == "(B_deleted,B_deleted)");
    CHECK(m.states[static_cast<std::size_t>(c.front().state)] == "(empty,empty)");
  }
  auto text = format_backtrace(m, ok.backtraces.front());
  CHECK(text.rfind("*:(B_deleted,B_deleted)", 0) == 0);

  // Alice: only add_B and take happened before the final state
  Property alice{"alice", std::nullopt, std::set<int>{*m.event_index("add_B"), *m.event_index("take")}, {}};
  SequenceSpec alice_os = {{alice, 0, 0, true}, at("(B_deleted,B_deleted)")};
  CHECK_FALSE(check_claim(m, {final_os, manuf, alice_os}).consistent);
}
