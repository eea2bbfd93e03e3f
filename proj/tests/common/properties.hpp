#pragma once

// Randomized property suites shared by the unit tests and the acceptance run.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "flucid/context_calculus.hpp"
#include "flucid/dstme.hpp"
#include "flucid/encoders.hpp"
#include "flucid/era.hpp"
#include "flucid/evaluator.hpp"
#include "flucid/parser.hpp"
#include "flucid/semantics.hpp"

namespace props {

using namespace flucid;
using namespace flucid::calculus;

struct Outcome {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  void fail(const std::string& why) {
    if (failures++ == 0) first_failure = why;
  }
  bool ok() const { return failures == 0 && cases > 0; }
};

inline std::string attempt(const std::function<Value()>& f) {
  try {
    return to_source(f());
  } catch (const std::exception& e) {
    return std::string("error: ") + e.what();
  }
}

inline std::vector<std::string> unary_operators() {
  return {"first", "last", "next", "prev", "nnext", "nprev", "second", "prelast", "neg", "not"};
}

// (a) direct evaluation against the rewritten core form
inline Outcome translation_equivalence(std::size_t streams = 1000, std::uint64_t seed = 1) {
  Outcome out{"translation equivalence"};
  std::mt19937_64 rng(seed);
  std::set<std::string> unary;
  for (const auto& u : unary_operators()) unary.insert(u);
  auto program = parse_program("0");
  for (const auto& op : core_rewritable_operators()) {
    std::string src;
    if (op == "not") src = "not Y";
    else if (unary.count(op)) src = op + " X";
    else if (op == "and" || op == "or" || op == "xor") src = "Y " + op + " Z";
    else src = "X " + op + " Y";
    auto direct = parse_expression(src);
    auto core = rewrite_to_core(*direct);
    for (std::size_t n = 0; n < streams; ++n) {
      std::uniform_int_distribution<int> len(0, 32), val(-50, 50), coin(0, 1);
      std::vector<Value> x, y, z;
      int nx = len(rng), ny = len(rng), nz = len(rng);
      for (int i = 0; i < nx; ++i) x.emplace_back(val(rng));
      for (int i = 0; i < ny; ++i) y.emplace_back(coin(rng) == 1);
      for (int i = 0; i < nz; ++i) z.emplace_back(coin(rng) == 1);
      Evaluator ev(program);
      ev.bind_stream("X", x);
      ev.bind_stream("Y", y);
      ev.bind_stream("Z", z);
      int top = std::max({nx, ny, nz}) + 2;
      for (int k = 0; k <= top; ++k) {
        SimpleContext at({{"_", Value(k)}});
        auto a = attempt([&] { return ev.evaluate(*direct, at); });
        auto b = attempt([&] { return ev.evaluate(*core, at); });
        ++out.cases;
        if (a != b) {
          std::ostringstream why;
          why << src << " @ " << k << ": direct " << a << ", core " << b << " (|X|=" << nx << ", |Y|=" << ny << ")";
          out.fail(why.str());
        }
      }
    }
  }
  return out;
}

// every chained computation of each length up to h, filtered by the evidence
inline std::set<era::Computation> brute_force_explanations(const era::StateMachine& m,
                                                           const std::vector<era::SequenceSpec>& es,
                                                           std::int64_t h) {
  std::set<era::Computation> found;
  auto fits = [&](const era::SequenceSpec& os, const era::Computation& c) {
    // can the observations be laid end to end over c?
    std::function<bool(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t pos) {
      if (i == os.size()) return pos == c.size();
      const auto& o = os[i];
      std::int64_t hi = o.max_inf ? static_cast<std::int64_t>(c.size() - pos) : o.min + o.max;
      for (std::int64_t len = o.min; len <= hi && pos + static_cast<std::size_t>(len) <= c.size(); ++len) {
        bool good = true;
        for (std::int64_t k = 0; k < len && good; ++k) {
          const auto& s = c[pos + static_cast<std::size_t>(k)];
          good = o.property.holds(s.event, s.state);
        }
        if (good && go(i + 1, pos + static_cast<std::size_t>(len))) return true;
      }
      return false;
    };
    return go(0, 0);
  };
  auto accept = [&](const era::Computation& c) {
    for (const auto& os : es)
      if (!fits(os, c)) return;
    auto masked = c;
    if (!masked.empty()) masked.back().event = era::any_event;
    found.insert(masked);
  };
  // c holds at least one step; every event is tried for the newest step
  std::function<void(era::Computation&, std::int64_t)> grow = [&](era::Computation& c, std::int64_t L) {
    for (int e = 0; e < m.num_events(); ++e) {
      c.back().event = e;
      if (static_cast<std::int64_t>(c.size()) < L) {
        c.push_back({0, m.step(e, c.back().state)});
        grow(c, L);
        c.pop_back();
      } else {
        accept(c);
      }
    }
  };
  for (std::int64_t L = 0; L <= h; ++L) {
    if (L == 0) {
      accept({});
      continue;
    }
    for (int q = 0; q < m.num_states(); ++q) {
      era::Computation c{{0, q}};
      grow(c, L);
    }
  }
  return found;
}

// (b) check_claim against exhaustive path enumeration
inline Outcome era_oracle(std::size_t machines = 200, std::uint64_t seed = 2) {
  Outcome out{"ERA brute-force agreement"};
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (std::size_t n = 0; n < machines; ++n) {
    int nq = uni(1, 10), ni = uni(1, 4);
    std::vector<std::string> qs, is;
    for (int q = 0; q < nq; ++q) qs.push_back("q" + std::to_string(q));
    for (int i = 0; i < ni; ++i) is.push_back("e" + std::to_string(i));
    auto m = era::make_machine(qs, is);
    for (int e = 0; e < ni; ++e)
      for (int q = 0; q < nq; ++q) m.set(e, q, uni(0, nq - 1));
    std::int64_t h = uni(1, 6);
    auto random_property = [&] {
      era::Property p;
      p.name = "p";
      if (uni(0, 2) > 0) {
        p.states.emplace();
        for (int q = 0; q < nq; ++q)
          if (uni(0, 1)) p.states->insert(q);
      }
      if (uni(0, 3) == 0) {
        p.allow_events.emplace();
        for (int e = 0; e < ni; ++e)
          if (uni(0, 1)) p.allow_events->insert(e);
      }
      if (uni(0, 5) == 0) p.deny_events.insert(uni(0, ni - 1));
      return p;
    };
    std::vector<era::SequenceSpec> es;
    int nos = uni(1, 3);
    for (int s = 0; s < nos; ++s) {
      era::SequenceSpec os;
      int nobs = uni(1, 3);
      std::int64_t used = 0;
      for (int k = 0; k < nobs; ++k) {
        era::ObservationSpec o;
        o.property = uni(0, 3) == 0 ? era::Property::any() : random_property();
        o.min = std::min<std::int64_t>(uni(0, 2), h - used);
        used += o.min;
        o.max_inf = uni(0, 4) == 0;
        o.max = o.max_inf ? 0 : uni(0, 2);
        os.push_back(o);
      }
      es.push_back(os);
    }
    era::ClaimOptions co;
    co.horizon = h;
    co.max_backtraces = 1u << 20;
    co.enumeration_cap = 1u << 20;
    auto got = era::check_claim(m, es, co);
    auto want = brute_force_explanations(m, es, h);
    std::set<era::Computation> have(got.backtraces.begin(), got.backtraces.end());
    ++out.cases;
    if (got.consistent != !want.empty() || have != want || got.backtraces_truncated) {
      std::ostringstream why;
      why << "machine " << n << " (|Q|=" << nq << ", |I|=" << ni << ", h=" << h << "): engine " << have.size()
          << " paths, oracle " << want.size();
      out.fail(why.str());
    }
    for (const auto& c : got.backtraces) {
      auto full = c;
      bool chained = true;
      for (std::size_t k = 0; k + 1 < full.size(); ++k) chained = chained && m.step(full[k].event, full[k].state) == full[k + 1].state;
      if (!chained) out.fail("unchained backtrace in machine " + std::to_string(n));
    }
  }
  return out;
}

// (c) Möbius inversion and Dempster's rule
inline Outcome mass_laws(std::size_t masses = 500, std::uint64_t seed = 3) {
  Outcome out{"Moebius round trip and Dempster laws"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_mass = [&](const std::vector<std::string>& frame) {
    dstme::Subset full = static_cast<dstme::Subset>((1u << frame.size()) - 1);
    std::map<dstme::Subset, double> raw;
    raw[full] = 0.05 + u(rng);  // keeps conflict below 1
    int focal = std::uniform_int_distribution<int>(0, 4)(rng);
    for (int k = 0; k < focal; ++k) {
      auto a = static_cast<dstme::Subset>(std::uniform_int_distribution<std::uint32_t>(1, full)(rng));
      raw[a] += u(rng);
    }
    double sum = 0;
    for (const auto& [a, v] : raw) sum += v;
    for (auto& [a, v] : raw) v /= sum;
    return dstme::MassAssignment(frame, raw);
  };
  auto close = [](const dstme::MassAssignment& a, const dstme::MassAssignment& b) {
    dstme::Subset full = a.full();
    for (dstme::Subset s = 0; s <= full; ++s)
      if (std::abs(a.mass(s) - b.mass(s)) > 1e-9) return false;
    return true;
  };
  for (std::size_t n = 0; n < masses; ++n) {
    std::size_t size = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    std::vector<std::string> frame;
    for (std::size_t i = 0; i < size; ++i) frame.push_back("x" + std::to_string(i));
    auto m1 = random_mass(frame), m2 = random_mass(frame), m3 = random_mass(frame);
    ++out.cases;
    std::map<dstme::Subset, double> bel;
    for (dstme::Subset a = 0; a <= m1.full(); ++a) {
      double brute = 0;
      for (const auto& [b, v] : m1.masses())
        if ((b & ~a) == 0) brute += v;
      bel[a] = dstme::belief(m1, a);
      if (std::abs(bel[a] - brute) > 1e-9) out.fail("belief differs from subset sum");
      double pl = dstme::plausibility(m1, a);
      if (bel[a] > pl + 1e-9 || pl > 1 + 1e-9) out.fail("bel <= pl <= 1 violated");
      if (std::abs(pl - (1 - dstme::belief(m1, m1.full() & ~a))) > 1e-9) out.fail("pl duality violated");
    }
    if (!close(dstme::mass_from_belief(bel, frame), m1)) out.fail("Moebius round trip, frame size " + std::to_string(size));
    if (!close(dstme::dempster_combine(m1, m2), dstme::dempster_combine(m2, m1))) out.fail("Dempster not commutative");
    auto left = dstme::dempster_combine(dstme::dempster_combine(m1, m2), m3);
    auto right = dstme::dempster_combine(m1, dstme::dempster_combine(m2, m3));
    if (!close(left, right)) out.fail("Dempster not associative");
  }
  return out;
}

// (d) projection/hiding partition and override idempotence
inline Outcome context_laws(std::size_t contexts = 1000, std::uint64_t seed = 4) {
  Outcome out{"context calculus laws"};
  std::mt19937_64 rng(seed);
  const std::vector<std::string> dims = {"a", "b", "c", "d", "e", "f"};
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto random_context = [&] {
    std::vector<std::pair<std::string, Value>> p;
    for (const auto& d : dims)
      if (uni(0, 1)) p.emplace_back(d, uni(0, 2) == 0 ? Value("t" + std::to_string(uni(0, 3))) : Value(uni(0, 3)));
    return SimpleContext(p);
  };
  for (std::size_t n = 0; n < contexts; ++n) {
    auto c = random_context(), b = random_context(), x = random_context();
    std::vector<std::string> sel;
    for (const auto& d : dims)
      if (uni(0, 1)) sel.push_back(d);
    ++out.cases;
    auto u = union_of(projection(c, sel), hiding(c, sel));
    if (u.kind() != Value::Kind::context || u.as_context() != c) out.fail("projection union hiding != c for " + to_source(Value(c)));
    auto o = override_with(c, b);
    if (override_with(o, b) != o) out.fail("override not idempotent");
    if (override_with(c, c) != c) out.fail("c override c != c");
    for (const auto& [d, v] : b.pairs)
      if (!o.get(d) || *o.get(d) != v) out.fail("override not right-biased");
    if (intersection(c, b) != intersection(b, c)) out.fail("intersection not commutative");
    if (intersection(c, c) != c) out.fail("intersection not idempotent");
    if (!is_sub_context(difference(c, b), c)) out.fail("difference not a sub-context");
    if (!is_sub_context(c, c)) out.fail("sub-context not reflexive");
    if (is_sub_context(c, b) && is_sub_context(b, c) && c != b) out.fail("sub-context not antisymmetric");
    if (is_sub_context(c, b) && is_sub_context(b, x) && !is_sub_context(c, x)) out.fail("sub-context not transitive");
  }
  return out;
}

// (e) encoder output is itself a valid program
inline Outcome encoder_round_trip(std::size_t inputs_per_preset = 40, std::uint64_t seed = 5) {
  Outcome out{"encoder round trip"};
  std::mt19937_64 rng(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto hex = [&](int digits) {
    std::string s;
    for (int i = 0; i < digits; ++i) s += "0123456789abcdefABCDEF"[uni(0, 21)];
    return s;
  };
  auto mac = [&]() -> std::string {
    switch (uni(0, 5)) {
      case 0: return hex(2) + ":" + hex(2) + ":" + hex(2) + ":" + hex(2) + ":" + hex(2) + ":" + hex(2);
      case 1: return hex(4) + "." + hex(4) + "." + hex(4);
      case 2: return hex(2) + "-" + hex(2) + "-" + hex(2) + "-" + hex(2) + "-" + hex(2) + "-" + hex(2);
      case 3: return hex(12);
      case 4: return hex(1) + ":" + hex(2) + ":" + hex(1) + ":" + hex(2) + ":" + hex(2) + ":" + hex(1);
      default: return "bad\"mac";
    }
  };
  auto ip = [&] {
    return std::to_string(uni(1, 254)) + "." + std::to_string(uni(0, 255)) + "." + std::to_string(uni(0, 255)) + "." +
           std::to_string(uni(1, 254));
  };
  auto host = [&] { return std::string(uni(0, 1) ? "Host" : "h") + std::to_string(uni(1, 99)) + ".Example.ORG"; };
  static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  auto syslog = [&] {
    return std::string(months[uni(0, 11)]) + " " + std::to_string(uni(1, 28)) + " " + std::to_string(uni(10, 23)) +
           ":" + std::to_string(uni(10, 59)) + ":" + std::to_string(uni(10, 59));
  };
  auto iso = [&] {
    return "2013-0" + std::to_string(uni(1, 9)) + "-1" + std::to_string(uni(0, 9)) + " 1" + std::to_string(uni(0, 9)) +
           ":2" + std::to_string(uni(0, 9)) + ":3" + std::to_string(uni(0, 9)) + "." + std::to_string(uni(100000, 999999));
  };
  std::map<std::string, std::function<std::string()>> line = {
      {"arp", [&] { return "? (" + ip() + ") at " + mac() + " [ether] on eth0"; }},
      {"dhcp", [&] { return syslog() + " srv dhcpd: DHCPACK on " + ip() + " to " + mac() + " (" + host() + ") via eth0"; }},
      {"argus",
       [&] {
         return iso() + "," + iso() + ",tcp," + mac() + "," + mac() + "," + ip() + "," + std::to_string(uni(1, 65535)) +
                ",->," + ip() + "," + std::to_string(uni(1, 1024)) + "," + std::to_string(uni(1, 99)) + "," +
                std::to_string(uni(1, 9999)) + "," + std::to_string(uni(1, 9999)) + ",CON";
       }},
      {"swm", [&] { return "Fa0/" + std::to_string(uni(1, 48)) + " " + (uni(0, 1) ? "up" : "down") + " " + mac() + " " + host(); }},
      {"nmap", [&] { return "Host: " + ip() + " (" + host() + ")\tStatus: Up"; }},
      {"msw",
       [&] {
         return "switch=sw" + std::to_string(uni(1, 9)) + " port=Fa0/" + std::to_string(uni(1, 48)) + " mac=" + mac() +
                " host=" + host() + " time=\"" + syslog() + "\"";
       }},
      {"activity", [&] { return iso() + "|user" + std::to_string(uni(1, 9)) + "|" + host() + "|login"; }},
  };
  for (const auto& name : encoders::preset_names()) {
    auto schema = encoders::preset(name);
    auto gen = line.find(name);
    if (gen == line.end()) {
      out.fail("no generator for preset " + name);
      continue;
    }
    for (std::size_t n = 0; n < inputs_per_preset; ++n) {
      std::string input;
      int lines = uni(0, 5);
      for (int k = 0; k < lines; ++k) input += gen->second() + "\n";
      if (uni(0, 4) == 0) input += "unparseable noise line\n";
      encoders::EncodeOptions eo;
      eo.reference_year = 2013;
      eo.zone = "UTC";
      eo.encoded_at = 1376408233;
      ++out.cases;
      try {
        auto r = encoders::encode_log(encoders::extract(schema, input), schema, name, eo);
        auto prog = parse_program(r.text);
        auto a = analyze(*prog, AnalyzeOptions{true});
        if (!a.ok()) out.fail(name + ": emitted text fails analysis");
        auto again = parse_program(pretty_print(*prog));
        if (!same_tree(*prog, *again)) out.fail(name + ": pretty-print round trip differs");
        std::size_t observations = 0;
        for (std::size_t p = r.text.find("observation " + name + "_o_"); p != std::string::npos;
             p = r.text.find("observation " + name + "_o_", p + 1))
          ++observations;
        if (observations != std::max<std::size_t>(1, static_cast<std::size_t>(lines)))
          out.fail(name + ": expected one observation per line");
      } catch (const std::exception& e) {
        out.fail(name + ": " + e.what() + " on input:\n" + input);
      }
    }
  }
  return out;
}

}  // namespace props
