// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "../common/properties.hpp"
#include "flucid/claims.hpp"

using namespace flucid;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fixture(const std::string& rel) { return fs::path(FIXTURE_DIR) / rel; }

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void report(int n, const std::string& title, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  " << n << ". " << title << ": " << detail << std::endl;
  if (!ok) ++failures;
}

template <class F>
void criterion(int n, const std::string& title, F body) {
  try {
    std::string detail;
    bool ok = body(detail);
    report(n, title, ok, detail);
  } catch (const std::exception& e) {
    report(n, title, false, std::string("exception: ") + e.what());
  }
}

// forward path notation: event -> state -> event -> state ...
std::string forward(const era::StateMachine& m, const era::Computation& c) {
  std::string s;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    if (!s.empty()) s += "->";
    s += m.events[static_cast<std::size_t>(c[k].event)] + "->" + m.states[static_cast<std::size_t>(c[k + 1].state)];
  }
  return s;
}

std::string row(Evaluator& ev, const std::string& expr, int n) {
  std::string out;
  for (int k = 0; k < n; ++k) {
    if (k) out += " ";
    auto v = ev.evaluate("(" + expr + ") @ " + std::to_string(k));
    out += v.is_bool() ? (v.as_bool() ? "T" : "F") : to_source(v);
  }
  return out;
}

}  // namespace

int main() {
  criterion(1, "ACME printer case", [](std::string& detail) {
    auto start = Clock::now();
    Evaluator ev(parse_program(read(fixture("acme.ipl"))));
    ev.run();
    auto reports = ev.claims();
    bool alice_inconsistent = reports.size() == 1 && !reports[0].consistent;
    auto without = ev.evaluate("invpsiacme[S](es)");
    std::size_t ending = 0, total = without.as_array().size();
    for (const auto& b : without.as_array())
      if (b.as_text().rfind("*:(B_deleted,B_deleted)", 0) == 0) ++ending;
    double t = seconds_since(start);
    std::ostringstream os;
    os << "Alice " << (alice_inconsistent ? "inconsistent" : "NOT inconsistent") << "; without Alice " << total
       << " backtraces, " << ending << " ending at (B_deleted,B_deleted); " << t << " s";
    detail = os.str();
    return alice_inconsistent && total > 0 && ending == total && t < 1.0;
  });

  criterion(2, "blackmail case", [](std::string& detail) {
    auto fsm = era::parse_fsm(read(fixture("blackmail.fsm")));
    auto es = lift_statement(Evaluator(parse_program(read(fixture("blackmail.es")))).run());
    auto specs = claims::specs_of(fsm.machine, es, 0.5, fsm.properties);
    auto r = era::check_claim(fsm.machine, specs);
    std::set<std::string> got;
    for (const auto& c : r.backtraces) got.insert(forward(fsm.machine, c));
    std::set<std::string> want = {"(u)->(1,u,o2)->(u,t2)->(2,u,t2)->(u)->(1,u,t2)", "(u)->(1,u,o2)->d(u,t2)->(1,u,t2)"};
    std::ostringstream os;
    os << r.backtrace_total << " explanations:";
    for (const auto& g : got) os << " [" << g << "]";
    detail = os.str();
    return r.consistent && r.backtrace_total == 2 && got == want;
  });

  criterion(3, "Table 14 operator rows", [](std::string& detail) {
    Evaluator ev(parse_program("0"));
    std::vector<Value> x, y;
    const std::string ys = "TFFTFFTTFT";
    for (int i = 0; i < 10; ++i) {
      x.emplace_back(i + 1);
      y.emplace_back(ys[static_cast<std::size_t>(i)] == 'T');
    }
    ev.bind_stream("X", x);
    ev.bind_stream("Y", y);
    const std::vector<std::tuple<std::string, int, std::string>> rows = {
        {"first X", 10, "1 1 1 1 1 1 1 1 1 1"},
        {"last X", 10, "10 10 10 10 10 10 10 10 10 10"},
        {"next X", 11, "2 3 4 5 6 7 8 9 10 eod eod"},
        {"prev X", 2, "bod 1"},
        {"X fby Y", 12, "1 T F F T F F T T F T eod"},
        {"X pby Y", 12, "T F F T F F T T F T 1 eod"},
        {"X wvr Y", 6, "1 4 7 8 10 eod"},
        {"X rwvr Y", 6, "10 8 7 4 1 bod"},
        {"X nwvr Y", 6, "2 3 5 6 9 eod"},
        {"X nrwvr Y", 6, "9 6 5 3 2 bod"},
        {"X asa Y", 10, "1 1 1 1 1 1 1 1 1 1"},
        {"X nasa Y", 10, "2 2 2 2 2 2 2 2 2 2"},
        {"X ala Y", 10, "10 10 10 10 10 10 10 10 10 10"},
        {"X nala Y", 10, "9 9 9 9 9 9 9 9 9 9"},
        {"X upon Y", 11, "1 2 2 2 3 3 3 4 5 5 eod"},
        {"X rupon Y", 11, "10 9 9 8 7 7 7 6 6 6 bod"},
        {"X nupon Y", 12, "1 1 2 3 3 4 5 5 5 6 6 eod"},
        {"X nrupon Y", 12, "10 10 9 9 9 8 7 7 6 5 5 bod"},
        {"neg X", 12, "-1 -2 -3 -4 -5 -6 -7 -8 -9 -10 eod eod"},
        {"not Y", 12, "F T T F T T F F T F eod eod"},
        {"X and Y", 12, "1 0 0 1 0 0 1 1 0 1 eod eod"},
    };
    int matched = 0;
    std::string bad;
    for (const auto& [expr, n, want] : rows) {
      auto got = row(ev, expr, n);
      if (got == want) ++matched;
      else bad += " [" + expr + ": " + got + "]";
    }
    detail = std::to_string(matched) + "/" + std::to_string(rows.size()) + " rows exact" + bad;
    return matched == static_cast<int>(rows.size()) && rows.size() == 21;
  });

  criterion(4, "DSTME numbers", [](std::string& detail) {
    using namespace dstme;
    MassAssignment colors({"Red", "Yellow", "Green"}, {{0b001, 0.35}, {0b010, 0.25}, {0b100, 0.15}, {0b011, 0.06},
                                                       {0b101, 0.05}, {0b110, 0.04}, {0b111, 0.10}});
    auto witness = [](Subset s) { return MassAssignment({"limb", "no limb"}, {{s, 0.9}, {0b11, 0.1}}); };
    auto agree = dempster_combine(witness(0b01), witness(0b01));
    auto clash = dempster_combine(witness(0b01), witness(0b10));
    std::vector<std::pair<double, double>> checks = {
        {belief(colors, 0b011), 0.66},        {plausibility(colors, 0b011), 0.85},
        {belief(agree, 0b01), 0.99},          {clash.mass(0b01), 9.0 / 19},
        {clash.mass(0b10), 9.0 / 19},         {clash.mass(0b11), 1.0 / 19},
    };
    double worst = 0;
    std::ostringstream os;
    os.precision(10);
    for (const auto& [got, want] : checks) {
      worst = std::max(worst, std::abs(got - want));
      os << got << " ";
    }
    os << "(max error " << worst << ")";
    detail = os.str();
    return worst <= 1e-9;
  });

  criterion(5, "comb fixtures", [](std::string& detail) {
    using C = std::set<int>;  // c1..c6 by index
    era::MPR<C> m1{{2, 1, 4}, {1, 2, 3}}, m2{{3, 4}, {4, 5, 6}}, m3{{4, 4}, {1, 2, 3, 4}}, m4{{5, 2, 1}, {2, 3, 5}};
    auto a = era::comb(m4, m3);
    auto b = era::comb(m1, m2);
    bool a_ok = a && a->lens == std::vector<era::Lens>{{4, 4}, {5, 2, 1}} && a->runs == C{2, 3};
    detail = std::string("comb(MPR4,MPR3) ") + (a_ok ? "= ((<4,4>,<5,2,1>), {c2,c3})" : "wrong") +
             "; comb(MPR1,MPR2) " + (b ? "non-empty" : "= empty");
    return a_ok && !b;
  });

  criterion(6, "generic expansion", [](std::string& detail) {
    auto es = lift_statement(Evaluator(parse_program(
                                 "es where evidential statement es = {os}; observation sequence os = {a, b};"
                                 " observation a = (\"A\", 1, 3); observation b = (\"B\", 1, 2); end"))
                                 .run());
    auto promoted = promote_generic(es);
    era::SequenceSpec spec = {{era::Property::any(), 1, 3, false}, {era::Property::any(), 1, 2, false}};
    auto lens = era::expand_generic(spec, 0);
    std::set<std::pair<std::int64_t, std::int64_t>> distinct;
    for (const auto& v : promoted.families.at(0))
      distinct.insert({v.observations.at(0).min, v.observations.at(1).min});
    detail = std::to_string(promoted.variant_count()) + " variants (" + std::to_string(distinct.size()) +
             " distinct), engine expansion " + std::to_string(lens.size());
    return promoted.variant_count() == 12 && distinct.size() == 12 && lens.size() == 12;
  });

  criterion(7, "property suite", [](std::string& detail) {
    auto start = Clock::now();
    std::vector<props::Outcome> runs;
    runs.push_back(props::translation_equivalence(1000));
    runs.push_back(props::era_oracle(200));
    runs.push_back(props::mass_laws(500));
    runs.push_back(props::context_laws(1000));
    runs.push_back(props::encoder_round_trip());
    double t = seconds_since(start);
    bool ok = t < 60.0;
    std::ostringstream os;
    const char* tags = "abcde";
    for (std::size_t i = 0; i < runs.size(); ++i) {
      ok = ok && runs[i].ok();
      os << "(" << tags[i] << ") " << runs[i].name << " " << runs[i].cases - runs[i].failures << "/" << runs[i].cases;
      if (!runs[i].ok()) os << " first failure: " << runs[i].first_failure;
      os << "; ";
    }
    os << t << " s";
    detail = os.str();
    return ok;
  });

  criterion(8, "golden parse corpus", [](std::string& detail) {
    std::vector<std::string> names;
    for (int i : {1, 2, 3, 4, 5, 6, 7}) names.push_back("listing_9_" + std::to_string(i) + ".ipl");
    names.push_back("listing_8_1.ipl");
    for (int i : {2, 3, 4}) names.push_back("listing_8_" + std::to_string(i) + ".ctx");
    for (int i : {9, 10, 11, 12, 13}) names.push_back("listing_9_" + std::to_string(i) + ".ctx");
    int ok = 0;
    std::string bad;
    for (const auto& n : names) {
      try {
        auto tree = parse_program(read(fixture("listings/" + n)));
        auto a = analyze(*tree, AnalyzeOptions{true});
        auto printed = pretty_print(*tree);
        auto again = parse_program(printed);
        if (a.ok() && same_tree(*tree, *again) && pretty_print(*again) == printed) ++ok;
        else bad += " " + n;
      } catch (const std::exception& e) {
        bad += " " + n + " (" + e.what() + ")";
      }
    }
    detail = std::to_string(ok) + "/" + std::to_string(names.size()) + " listings parse, analyze and round-trip" +
             (bad.empty() ? "" : "; failing:" + bad);
    return ok == static_cast<int>(names.size());
  });

  return failures;
}
