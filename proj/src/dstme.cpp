#include "flucid/dstme.hpp"

#include <bit>
#include <cmath>

namespace flucid::dstme {

MassAssignment::MassAssignment(std::vector<std::string> frame, std::map<Subset, double> masses)
    : frame_(std::move(frame)) {
  if (frame_.size() > 31) throw DomainError("frame too large");
  double total = 0.0;
  for (auto [a, v] : masses) {
    if ((a & ~full()) != 0) throw DomainError("subset outside the frame");
    if (v < -tolerance || v > 1.0 + tolerance) throw DomainError("mass outside [0,1]");
    if (a == 0 && std::abs(v) > tolerance) throw DomainError("mass of the empty set must be 0");
    if (a != 0 && v != 0.0) masses_[a] = v;
    total += v;
  }
  if (std::abs(total - 1.0) > tolerance)
    throw DomainError("masses sum to " + std::to_string(total) + ", not 1");
}

MassAssignment MassAssignment::vacuous(std::vector<std::string> frame) {
  MassAssignment m;
  m.frame_ = std::move(frame);
  m.masses_[m.full()] = 1.0;
  return m;
}

double MassAssignment::mass(Subset a) const {
  auto it = masses_.find(a);
  return it == masses_.end() ? 0.0 : it->second;
}

Subset MassAssignment::subset(const std::vector<std::string>& names) const {
  Subset s = 0;
  for (const auto& n : names) {
    bool found = false;
    for (std::size_t i = 0; i < frame_.size(); ++i)
      if (frame_[i] == n) {
        s |= Subset{1} << i;
        found = true;
      }
    if (!found) throw DomainError("'" + n + "' is not in the frame");
  }
  return s;
}

namespace {
void check_within(const MassAssignment& m, Subset a) {
  if ((a & ~m.full()) != 0) throw DomainError("subset not within the frame");
}
}  // namespace

double belief(const MassAssignment& m, Subset a) {
  check_within(m, a);
  double s = 0.0;
  for (auto [b, v] : m.masses())
    if ((b & ~a) == 0) s += v;
  return s;
}

double plausibility(const MassAssignment& m, Subset a) {
  check_within(m, a);
  double s = 0.0;
  for (auto [b, v] : m.masses())
    if ((b & a) != 0) s += v;
  return s;
}

MassAssignment mass_from_belief(const std::map<Subset, double>& bel, const std::vector<std::string>& frame) {
  if (frame.size() > 20) throw DomainError("frame too large for inversion");
  Subset full = frame.empty() ? 0 : static_cast<Subset>((std::uint64_t{1} << frame.size()) - 1);
  auto get = [&](Subset b) {
    auto it = bel.find(b);
    if (it == bel.end()) throw DomainError("belief table misses a subset");
    return it->second;
  };
  std::map<Subset, double> m;
  for (Subset a = 1; a <= full && a != 0; ++a) {
    double s = 0.0;
    // all B subset of A, including the empty set
    for (Subset b = a;; b = (b - 1) & a) {
      int diff = std::popcount(a & ~b);
      double bb = b == 0 ? (bel.count(0) ? bel.at(0) : 0.0) : get(b);
      s += (diff % 2 ? -bb : bb);
      if (b == 0) break;
    }
    if (s < -tolerance) throw DomainError("belief table yields a negative mass");
    m[a] = std::max(0.0, s);
  }
  return MassAssignment(frame, m);
}

MassAssignment dempster_combine(const MassAssignment& m1, const MassAssignment& m2) {
  if (m1.frame() != m2.frame()) throw DomainError("frames differ");
  std::map<Subset, double> raw;
  double conflict = 0.0;
  for (auto [b, x] : m1.masses())
    for (auto [c, y] : m2.masses()) {
      Subset a = b & c;
      if (a == 0)
        conflict += x * y;
      else
        raw[a] += x * y;
    }
  if (conflict >= 1.0 - tolerance) throw DomainError("total conflict, combination undefined");
  for (auto& [a, v] : raw) v /= (1.0 - conflict);
  return MassAssignment(m1.frame(), raw);
}

namespace {

double observation_credibility(Measure, const Observation& o) {
  if (o.is_no_observation()) return 1.0;
  if (o.is_zero_observation()) return 0.0;
  return o.w;
}

double sequence_credibility(const ObservationSequence& os) {
  if (os.observations.empty()) return 1.0;
  double s = 0.0;
  for (const auto& o : os.observations) s += o.w;
  return s / static_cast<double>(os.observations.size());
}

}  // namespace

double credibility(Measure kind, const Value& f) {
  switch (f.kind()) {
    case Value::Kind::observation: return observation_credibility(kind, f.as_observation());
    case Value::Kind::sequence: return sequence_credibility(f.as_sequence());
    case Value::Kind::statement: {
      const auto& seqs = f.as_statement().sequences;
      if (kind == Measure::pl || seqs.empty()) return 1.0;
      double s = 0.0;
      for (const auto& os : seqs) s += sequence_credibility(os);
      return s / static_cast<double>(seqs.size());
    }
    case Value::Kind::context:
    case Value::Kind::context_set: return 1.0;
    default:
      throw DomainError(std::string(kind == Measure::bel ? "bel" : "pl") + " is not defined for " +
                        kind_name(f.kind()));
  }
}

double credibility(Measure kind, const Value& a, const Value& b) {
  if (a.kind() != Value::Kind::observation || b.kind() != Value::Kind::observation)
    throw DomainError("two-argument credibility expects two observations");
  const auto &x = a.as_observation(), &y = b.as_observation();
  if (x.any_property != y.any_property || (!x.any_property && !(x.property == y.property)))
    throw DomainError("observations concern different properties");
  double wx = observation_credibility(kind, x), wy = observation_credibility(kind, y);
  return 1.0 - (1.0 - wx) * (1.0 - wy);
}

}  // namespace flucid::dstme
