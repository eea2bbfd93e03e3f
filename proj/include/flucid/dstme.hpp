#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "flucid/value.hpp"

namespace flucid::dstme {

using Subset = std::uint32_t;  // bit i set: frame[i] is a member

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double tolerance = 1e-9;

class MassAssignment {
 public:
  MassAssignment() = default;
  // validates m(empty) = 0, masses in [0,1], total 1
  MassAssignment(std::vector<std::string> frame, std::map<Subset, double> masses);

  static MassAssignment vacuous(std::vector<std::string> frame);

  const std::vector<std::string>& frame() const { return frame_; }
  const std::map<Subset, double>& masses() const { return masses_; }
  double mass(Subset a) const;
  Subset full() const { return frame_.empty() ? 0 : static_cast<Subset>((std::uint64_t{1} << frame_.size()) - 1); }
  Subset subset(const std::vector<std::string>& names) const;

 private:
  std::vector<std::string> frame_;
  std::map<Subset, double> masses_;
};

double belief(const MassAssignment& m, Subset a);
double plausibility(const MassAssignment& m, Subset a);
MassAssignment mass_from_belief(const std::map<Subset, double>& bel, const std::vector<std::string>& frame);
MassAssignment dempster_combine(const MassAssignment& m1, const MassAssignment& m2);

enum class Measure { bel, pl };

// Credibility of a forensic or context value.
double credibility(Measure kind, const Value& f);
// Two observations of the same property.
double credibility(Measure kind, const Value& a, const Value& b);

}  // namespace flucid::dstme
