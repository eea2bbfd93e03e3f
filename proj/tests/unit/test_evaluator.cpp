#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "flucid/evaluator.hpp"
#include "flucid/parser.hpp"

using namespace flucid;

namespace {

std::string read(const std::string& rel) {
  std::ifstream in(std::filesystem::path(FIXTURE_DIR) / rel, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Value eval(const std::string& src, EvalOptions opt = {}) { return Evaluator(parse_program(src), opt).run(); }

const Value E = Value::eod();
const Value B = Value::bod();

std::vector<Value> ints(std::initializer_list<int> xs) {
  std::vector<Value> out;
  for (int x : xs) out.emplace_back(x);
  return out;
}

struct Table14 {
  Evaluator ev{parse_program("0")};
  Table14() {
    std::vector<Value> x, y;
    const char* ys = "TFFTFFTTFT";
    for (int i = 0; i < 10; ++i) {
      x.emplace_back(i + 1);
      y.emplace_back(ys[i] == 'T');
    }
    ev.bind_stream("X", x);
    ev.bind_stream("Y", y);
  }
  std::vector<Value> row(const std::string& expr, std::size_t n) {
    std::vector<Value> out;
    for (std::size_t k = 0; k < n; ++k) {
      auto v = ev.evaluate("(" + expr + ") @ " + std::to_string(k));
      out.push_back(v);
    }
    return out;
  }
};

}  // namespace

TEST_CASE("constants and laziness") {
  CHECK(eval("42") == Value(42));
  CHECK(evaluate_expression("42", SimpleContext({{"d", Value(3)}})) == Value(42));
  CHECK(eval("if true then 1 else undefined_div fi") == Value(1));
  CHECK(eval("if false then 1 / 0 else 2 fi") == Value(2));
  CHECK_THROWS_AS(eval("1 / 0"), EvalError);
  CHECK(eval("7 / 2") == Value(3));
}

TEST_CASE("natural numbers along a dimension") {
  CHECK(eval("N @.d 2 where dimension d; N = 42 fby.d (N + 1); end") == Value(44));
  CHECK(eval("N @ [d:5] where dimension d; N = 42 fby.d (N + 1); end") == Value(47));
}

TEST_CASE("context queries") {
  CHECK(eval("#d where dimension d; end") == Value(0));
  CHECK(eval("#d @ [d:3] where dimension d; end") == Value(3));
  auto v = eval("x @ {[d:1], [d:2]} where dimension d; x = #d * 10; end");
  REQUIRE(v.kind() == Value::Kind::array);
  CHECK(v.as_array() == ints({10, 20}));
  CHECK(eval("o.w where observation o = (\"P\", 1, 0, 0.3); end") == Value(0.3));
}

TEST_CASE("credibility gate") {
  CHECK(eval("x @ o where observation o = ([d:1], 1, 0, 0.3); x = 5; end") == E);
  CHECK(eval("x @ o where observation o = ([d:1], 1, 0, 0.8); x = 5; end") == Value(5));
  EvalOptions low;
  low.threshold = 0.2;
  CHECK(eval("x @ o where observation o = ([d:1], 1, 0, 0.3); x = 5; end", low) == Value(5));
}

TEST_CASE("Table 14") {
  Table14 t;
  CHECK(t.row("first X", 10) == ints({1, 1, 1, 1, 1, 1, 1, 1, 1, 1}));
  CHECK(t.row("last X", 10) == ints({10, 10, 10, 10, 10, 10, 10, 10, 10, 10}));
  auto next = ints({2, 3, 4, 5, 6, 7, 8, 9, 10});
  next.push_back(E);
  next.push_back(E);
  CHECK(t.row("next X", 11) == next);
  auto prev = t.row("prev X", 2);
  CHECK(prev[0] == B);
  CHECK(prev[1] == Value(1));

  std::vector<Value> y;
  for (char c : std::string("TFFTFFTTFT")) y.emplace_back(c == 'T');
  std::vector<Value> fby{Value(1)};
  fby.insert(fby.end(), y.begin(), y.end());
  fby.push_back(E);
  CHECK(t.row("X fby Y", 12) == fby);
  std::vector<Value> pby = y;
  pby.push_back(Value(1));
  pby.push_back(E);
  CHECK(t.row("X pby Y", 12) == pby);

  auto tail = [](std::vector<Value> v, std::size_t n, const Value& s) {
    v.resize(n, s);
    return v;
  };
  CHECK(t.row("X wvr Y", 6) == tail(ints({1, 4, 7, 8, 10}), 6, E));
  CHECK(t.row("X rwvr Y", 6) == tail(ints({10, 8, 7, 4, 1}), 6, B));
  CHECK(t.row("X nwvr Y", 6) == tail(ints({2, 3, 5, 6, 9}), 6, E));
  CHECK(t.row("X nrwvr Y", 6) == tail(ints({9, 6, 5, 3, 2}), 6, B));
  CHECK(t.row("X asa Y", 10) == ints({1, 1, 1, 1, 1, 1, 1, 1, 1, 1}));
  CHECK(t.row("X nasa Y", 10) == ints({2, 2, 2, 2, 2, 2, 2, 2, 2, 2}));
  CHECK(t.row("X ala Y", 10) == ints({10, 10, 10, 10, 10, 10, 10, 10, 10, 10}));
  CHECK(t.row("X nala Y", 10) == ints({9, 9, 9, 9, 9, 9, 9, 9, 9, 9}));
  CHECK(t.row("X upon Y", 11) == tail(ints({1, 2, 2, 2, 3, 3, 3, 4, 5, 5}), 11, E));
  CHECK(t.row("X rupon Y", 11) == tail(ints({10, 9, 9, 8, 7, 7, 7, 6, 6, 6}), 11, B));
  CHECK(t.row("X nupon Y", 12) == tail(ints({1, 1, 2, 3, 3, 4, 5, 5, 5, 6, 6}), 12, E));
  CHECK(t.row("X nrupon Y", 12) == tail(ints({10, 10, 9, 9, 9, 8, 7, 7, 6, 5, 5}), 12, B));
  CHECK(t.row("neg X", 12) == tail(ints({-1, -2, -3, -4, -5, -6, -7, -8, -9, -10}), 12, E));
  std::vector<Value> noty;
  for (char c : std::string("FTTFTTFFTF")) noty.emplace_back(c == 'T');
  CHECK(t.row("not Y", 12) == tail(noty, 12, E));
  CHECK(t.row("X and Y", 12) == tail(ints({1, 0, 0, 1, 0, 0, 1, 1, 0, 1}), 12, E));
}

TEST_CASE("wvr and rwvr are mirror images") {
  Table14 t;
  auto a = t.row("X wvr Y", 5), b = t.row("X rwvr Y", 5);
  std::reverse(b.begin(), b.end());
  CHECK(a == b);
  auto c = t.row("X nwvr Y", 5), d = t.row("X nrwvr Y", 5);
  std::reverse(d.begin(), d.end());
  CHECK(c == d);
}

TEST_CASE("asa is first of wvr") {
  Table14 t;
  CHECK(t.row("X asa Y", 3) == t.row("first (X wvr Y)", 3));
}

TEST_CASE("limb example credibility") {
  auto v = eval(read("listings/listing_9_1.ipl"));
  REQUIRE(v.kind() == Value::Kind::array);
  REQUIRE(v.as_array().size() == 2);
  CHECK(v.as_array()[0].to_real() == doctest::Approx(0.99));
  CHECK(v.as_array()[1].to_real() == doctest::Approx(1.0));
}

TEST_CASE("raining query") {
  auto v = eval(read("listings/listing_9_2.ipl"));
  REQUIRE(v.kind() == Value::Kind::observation);
  const auto& p = v.as_observation().property.as_context();
  CHECK(*p.get("city") == Value("Montreal"));
  CHECK(*p.get("day") == Value(4));
  CHECK(*p.get("month") == Value("Sep"));
}

TEST_CASE("ACME claims") {
  auto src = read("acme.ipl");
  Evaluator ev(parse_program(src));
  auto alice = ev.run();
  auto reports = ev.claims();
  REQUIRE(reports.size() == 1);
  CHECK_FALSE(reports[0].consistent);

  auto without = ev.evaluate("invpsiacme[S](es)");
  REQUIRE(without.kind() == Value::Kind::array);
  REQUIRE_FALSE(without.as_array().empty());
  for (const auto& b : without.as_array()) CHECK(b.as_text().rfind("*:(B_deleted,B_deleted)", 0) == 0);
  bool any_consistent = false;
  for (const auto& r : ev.claims()) any_consistent = any_consistent || r.consistent;
  CHECK(any_consistent);
}

TEST_CASE("memoization does not change results") {
  auto src = read("acme.ipl");
  EvalOptions off;
  off.memoize = false;
  Evaluator a(parse_program(src)), b(parse_program(src), off);
  CHECK(a.run() == b.run());
  CHECK(a.warehouse_size() > 0);
  CHECK(b.warehouse_size() == 0);
  const char* nat = "N @.d 6 where dimension d; N = 42 fby.d (N + 1); end";
  CHECK(eval(nat) == eval(nat, off));
  Evaluator twice(parse_program(nat));
  CHECK(twice.run() == twice.run());
}

TEST_CASE("parallel evaluation agrees with sequential") {
  EvalOptions par;
  par.jobs = 4;
  auto src = read("listings/listing_9_1.ipl");
  CHECK(eval(src) == eval(src, par));
  auto acme = read("acme.ipl");
  CHECK(eval(acme) == eval(acme, par));
}

TEST_CASE("trace lines") {
  std::ostringstream os;
  EvalOptions opt;
  opt.trace = &os;
  eval("x where x = 1 + 2; end", opt);
  CHECK(os.str().find("DEMAND x @ [] -> 3") != std::string::npos);
}

TEST_CASE("demand cycles are errors") {
  CHECK_THROWS_WITH_AS(eval("x where x = y + 1; y = x; end"), doctest::Contains("demand cycle"), EvalError);
}

TEST_CASE("evaluation errors carry spans") {
  try {
    eval("x where x = 1 / 0; end");
    FAIL("expected an error");
  } catch (const EvalError& e) {
    CHECK(e.span.line == 1);
  }
}
