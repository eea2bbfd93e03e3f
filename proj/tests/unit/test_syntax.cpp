#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "flucid/lexer.hpp"
#include "flucid/parser.hpp"

using namespace flucid;

namespace {

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string listing(const std::string& name) { return read(std::filesystem::path(FIXTURE_DIR) / "listings" / name); }

// random expression source over a fixed vocabulary
std::string gen(std::mt19937_64& rng, int depth) {
  static const char* atoms[] = {"X", "Y", "1", "2.5", "true", "\"s\"", "#", "eod", "$", "[d:1, e:\"a\"]"};
  static const char* bins[] = {"fby", "wvr", "upon", "asa", "+", "-", "*", "&&", "||", "==", "<", "@",
                               "\\union", "\\intersection", "\\override", "pby", "rupon"};
  static const char* uns[] = {"first", "next", "prev", "!", "-", "iseod", "bel", "last"};
  std::uniform_int_distribution<int> pick(0, 9);
  int k = depth <= 0 ? 0 : pick(rng);
  if (k < 3) return atoms[rng() % std::size(atoms)];
  if (k < 7) return "(" + gen(rng, depth - 1) + " " + bins[rng() % std::size(bins)] + " " + gen(rng, depth - 1) + ")";
  if (k < 9) return std::string(uns[rng() % std::size(uns)]) + " (" + gen(rng, depth - 1) + ")";
  return "if " + gen(rng, depth - 1) + " then " + gen(rng, depth - 1) + " else " + gen(rng, depth - 1) + " fi";
}

}  // namespace

TEST_CASE("tokens") {
  auto t = tokenize("X fby Y");
  REQUIRE(t.size() == 4);
  CHECK(t[0].kind == TokKind::ident);
  CHECK(t[1].text == "fby");
  CHECK(t[2].kind == TokKind::ident);
  CHECK(t[3].kind == TokKind::end);

  auto o = tokenize("observation o = (P, 1, 0, 0.85);");
  bool saw = false;
  for (const auto& x : o)
    if (x.kind == TokKind::real) {
      saw = true;
      CHECK(x.value == Value(0.85));
    }
  CHECK(saw);
}

TEST_CASE("lexical errors carry an offset") {
  try {
    tokenize(std::string("a \0 b", 5));
    FAIL("expected an error");
  } catch (const SyntaxError& e) {
    CHECK(e.diagnostic.span.offset == 2);
    CHECK(e.diagnostic.code == "L001");
  }
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(parse_program("x where end"), SyntaxError);
  CHECK_THROWS_AS(parse_program("x = (1 +;"), SyntaxError);
  for (std::string bad : {"x where end", "(1 +", "if a then", "[d:1", "observation o = ;"}) {
    try {
      parse_program(bad);
      FAIL("accepted " << bad);
    } catch (const SyntaxError& e) {
      CHECK(e.diagnostic.span.offset <= bad.size());
    }
  }
}

TEST_CASE("limb example") {
  auto p = parse_program(listing("listing_9_1.ipl"));
  REQUIRE(p->kind == NodeKind::program);
  REQUIRE(!p->kids.empty());
  CHECK(p->kids[0]->kind == NodeKind::where);
  auto printed = pretty_print(*p);
  CHECK(printed.find("[bel(es), pl(es)]") != std::string::npos);
}

TEST_CASE("ACME claim line") {
  auto p = parse_program(listing("listing_9_4.ipl"));
  CHECK(pretty_print(*p).find("invpsiacme[S](es \\union alice)") != std::string::npos);
}

TEST_CASE("observation annotation") {
  auto e = parse_expression("(\"(u,t2)\" => \"threats in slack of unrelated letter\", 1)");
  CHECK(e->kind == NodeKind::tuple);
  CHECK(same_tree(*parse_expression(pretty_print(*e)), *e));
}

TEST_CASE("subscript and context literal are distinct") {
  CHECK(parse_expression("f[S]")->kind == NodeKind::subscript);
  CHECK(parse_expression("[d:1]")->kind == NodeKind::bracket);
}

TEST_CASE("round trip on raining example and arp evidence") {
  for (const char* name : {"listing_9_2.ipl", "listing_8_4.ctx"}) {
    auto t = parse_program(listing(name));
    auto again = parse_program(pretty_print(*t));
    CHECK_MESSAGE(same_tree(*t, *again), name);
    CHECK(pretty_print(*again) == pretty_print(*t));
  }
}

TEST_CASE("round trip on random expressions") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    auto src = gen(rng, 4);
    auto t = parse_expression(src);
    auto printed = pretty_print(*t);
    auto again = parse_expression(printed);
    CHECK_MESSAGE(same_tree(*t, *again), src << "  =>  " << printed);
  }
}
