#include "doctest.h"
#include "flucid/evaluator.hpp"
#include "flucid/parser.hpp"
#include "flucid/semantics.hpp"

using namespace flucid;

TEST_CASE("declared tag sets") {
  auto p = parse_program("d where dimension day: {1 to 31}; d = 1; end");
  auto a = analyze(*p);
  CHECK(a.ok());
  const Entry* day = nullptr;
  for (const auto& e : a.entries)
    if (e.name == "day") day = &e;
  REQUIRE(day);
  CHECK(day->kind == EntryKind::dim);
  REQUIRE(day->tags);
  CHECK(day->tags->finite);
  CHECK(day->tags->ordered);
  CHECK(day->tags->size() == 31);
}

TEST_CASE("observation declarations are default-filled") {
  auto p = parse_program("o where observation o = \"P\"; end");
  auto a = analyze(*p);
  const Entry* o = nullptr;
  for (const auto& e : a.entries)
    if (e.name == "o") o = &e;
  REQUIRE(o);
  CHECK(o->kind == EntryKind::odim);
  REQUIRE(o->tuple);
  CHECK(o->tuple->min->literal == Value(1));
  CHECK(o->tuple->max->literal == Value(0));
  CHECK(o->tuple->w->literal == Value(1.0));
}

TEST_CASE("undefined identifiers") {
  auto a = analyze(*parse_program("foo + 1"));
  REQUIRE(a.error_count() == 1);
  CHECK(a.diagnostics[0].message.find("foo") != std::string::npos);
  CHECK(a.diagnostics[0].span.length == 3);

  auto f = analyze(*parse_program("foo + 1"), AnalyzeOptions{true});
  CHECK(f.ok());
  CHECK(f.diagnostics.size() == 1);
}

TEST_CASE("analysis is deterministic") {
  auto p = parse_program("x where dimension d; x = 1 fby.d (x + 1); y = z; end");
  auto a = analyze(*p), b = analyze(*p);
  REQUIRE(a.diagnostics.size() == b.diagnostics.size());
  for (std::size_t i = 0; i < a.diagnostics.size(); ++i) CHECK(format_diagnostic(a.diagnostics[i]) == format_diagnostic(b.diagnostics[i]));
  CHECK(a.entries.size() == b.entries.size());
}

TEST_CASE("generic promotion") {
  EvidentialStatement es{"es", {ObservationSequence{"os", {make_observation(Value("A"), 1, Value(3)),
                                                           make_observation(Value("B"), 1, Value(2))}}}};
  auto p = promote_generic(es);
  CHECK(p.variant_count() == 12);
  CHECK_FALSE(p.deferred);
  for (const auto& v : p.families[0]) {
    REQUIRE(v.observations.size() == 2);
    for (const auto& o : v.observations) CHECK(o.max == 0);
  }

  auto two = promote_sequence(ObservationSequence{"os", {make_observation(Value("P"), 2, Value(1))}}, 0);
  REQUIRE(two.size() == 2);
  std::set<std::int64_t> lens{two[0].observations[0].min, two[1].observations[0].min};
  CHECK(lens == std::set<std::int64_t>{2, 3});

  EvidentialStatement fixed{"es", {ObservationSequence{"os", {make_observation(Value("A"), 2, Value(0))}}}};
  auto f = promote_generic(fixed);
  CHECK(f.variant_count() == 1);
  CHECK(f.families[0][0] == fixed.sequences[0]);

  EvidentialStatement open{"es", {ObservationSequence{"os", {no_observation()}}}};
  CHECK(promote_generic(open).deferred);
  CHECK(promote_generic(open, 3).variant_count() == 4);
}

TEST_CASE("core rewrites") {
  auto first = rewrite_to_core(*parse_expression("first X"));
  CHECK(same_tree(*first, *parse_expression("X @ 0")));
  auto core = parse_expression("if X then Y @ (# + 1) else 3 fi");
  CHECK(same_tree(*rewrite_to_core(*core), *core));
  auto asa = rewrite_to_core(*parse_expression("X asa Y"));
  auto printed = pretty_print(*asa);
  for (const auto& op : core_rewritable_operators())
    CHECK_MESSAGE(printed.find(" " + op + " ") == std::string::npos, op);
}

TEST_CASE("conservative extension on a core corpus") {
  // programs without forensic constructs mean the same with or without the rewrite
  const char* corpus[] = {
      "N @.d 2 where dimension d; N = 42 fby.d (N + 1); end",
      "(X fby (X + 1)) @ 3 where X = 5; end",
      "if 1 < 2 then 10 else 20 fi",
      "(first S + next S) where S = 3 fby (S * 2); end",
  };
  for (const char* src : corpus) {
    auto t = parse_program(src);
    CHECK(analyze(*t).ok());
    auto before = Evaluator(t).run();
    auto r = rewrite_to_core(*t);
    auto after = Evaluator(r).run();
    CHECK_MESSAGE(before == after, src);
  }
}
