#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flucid::era {

struct EraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StateMachine {
  std::vector<std::string> states;
  std::vector<std::string> events;
  std::vector<int> psi;  // psi[e * |Q| + q]

  int num_states() const { return static_cast<int>(states.size()); }
  int num_events() const { return static_cast<int>(events.size()); }
  int step(int e, int q) const { return psi[static_cast<std::size_t>(e * num_states() + q)]; }
  void set(int e, int q, int to) { psi[static_cast<std::size_t>(e * num_states() + q)] = to; }
  std::optional<int> state_index(std::string_view name) const;
  std::optional<int> event_index(std::string_view name) const;
  // throws unless psi is total and in range
  void validate() const;
};

StateMachine make_machine(std::vector<std::string> states, std::vector<std::string> events);

struct Step {
  int event = 0;
  int state = 0;
  auto operator<=>(const Step&) const = default;
};

using Computation = std::vector<Step>;

bool chained(const StateMachine& fsm, const Computation& c);

struct Property {
  std::string name;
  std::optional<std::set<int>> states;        // nullopt: any state
  std::optional<std::set<int>> allow_events;  // nullopt: any event
  std::set<int> deny_events;

  bool holds(int event, int state) const {
    if (states && !states->count(state)) return false;
    if (allow_events && !allow_events->count(event)) return false;
    return !deny_events.count(event);
  }
  static Property any() { return Property{"$", std::nullopt, std::nullopt, {}}; }
};

struct ObservationSpec {
  Property property;
  std::int64_t min = 1;
  std::int64_t max = 0;
  bool max_inf = false;
};

using SequenceSpec = std::vector<ObservationSpec>;

// predecessors[q'] = {(e, q) : psi(e, q) = q'}
std::vector<std::vector<Step>> invert_transition(const StateMachine& fsm);

// One-step left extensions of every member of Y.
std::set<Computation> psi_inverse_set(const StateMachine& fsm, const std::set<Computation>& Y);

// Set of chained computations of a fixed window length, stored as one node set
// per position with the edges implied by psi.
class RunSet {
 public:
  RunSet() = default;
  static RunSet universal(const StateMachine& fsm, int length);
  // allowed[k][e * |Q| + q]
  static RunSet from_masks(const StateMachine& fsm, std::vector<std::vector<char>> allowed);

  int length() const { return length_; }
  bool empty() const;
  bool contains(const Computation& c) const;
  // number of distinct computations (saturating double)
  double count() const;
  // depth-first in index order
  std::vector<Computation> enumerate(std::size_t limit) const;
  const std::vector<std::vector<char>>& layers() const { return layers_; }

  friend RunSet intersect(const RunSet& a, const RunSet& b);
  friend bool operator==(const RunSet& a, const RunSet& b) {
    return a.length_ == b.length_ && a.layers_ == b.layers_ && a.empty() == b.empty();
  }

 private:
  void trim();

  const StateMachine* fsm_ = nullptr;
  int length_ = 0;
  bool zero_nonempty_ = false;  // length 0: holds the empty computation
  std::vector<std::vector<char>> layers_;
};

inline bool is_empty(const RunSet& r) { return r.empty(); }

template <class T>
std::set<T> intersect(const std::set<T>& a, const std::set<T>& b) {
  std::set<T> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}
template <class T>
bool is_empty(const std::set<T>& s) {
  return s.empty();
}

using Lens = std::vector<std::int64_t>;

inline std::int64_t total(const Lens& l) { return std::accumulate(l.begin(), l.end(), std::int64_t{0}); }

template <class C>
struct MPR {
  Lens len;
  C runs;
  bool operator==(const MPR&) const = default;
};

// lens are kept in canonical (lexicographic) order
template <class C>
struct MSPR {
  std::vector<Lens> lens;
  C runs;

  bool proper() const {
    for (const auto& l : lens)
      if (total(l) != total(lens.front())) return false;
    return true;
  }
  bool operator==(const MSPR&) const = default;
};

template <class C>
std::optional<MSPR<C>> comb(const MSPR<C>& x, const MPR<C>& y) {
  if (x.lens.empty() || total(x.lens.front()) != total(y.len)) return std::nullopt;
  C common = intersect(x.runs, y.runs);
  if (is_empty(common)) return std::nullopt;
  MSPR<C> out{x.lens, std::move(common)};
  out.lens.push_back(y.len);
  std::sort(out.lens.begin(), out.lens.end());
  return out;
}

template <class C>
std::optional<MSPR<C>> comb(const MPR<C>& x, const MPR<C>& y) {
  return comb(MSPR<C>{{x.len}, x.runs}, y);
}

// Meaning of a fixed-length sequence: (property, exact length) per observation.
MPR<RunSet> meaning_fixed_length(const StateMachine& fsm,
                                 const std::vector<std::pair<Property, std::int64_t>>& os);

// The same meaning computed literally with explicit sets and repeated Psi^-1.
std::set<Computation> meaning_by_backtracing(const StateMachine& fsm,
                                             const std::vector<std::pair<Property, std::int64_t>>& os);

// Every fixed-length variant: lengths min..min+max per observation, INF+ cut at horizon.
std::vector<Lens> expand_generic(const SequenceSpec& os, std::int64_t horizon);

std::int64_t default_horizon(const StateMachine& fsm, const std::vector<SequenceSpec>& es);

struct ClaimOptions {
  std::optional<std::int64_t> horizon;
  std::size_t max_backtraces = 64;
  std::size_t enumeration_cap = 20000;
  int jobs = 1;
};

struct ClaimResult {
  bool consistent = false;
  std::int64_t horizon = 0;
  bool horizon_truncated = false;  // some INF+ observation was cut at the horizon
  std::vector<MSPR<RunSet>> explanations;
  // distinct paths, last event masked, shortest first
  std::vector<Computation> backtraces;
  std::size_t backtrace_total = 0;
  bool backtraces_truncated = false;
};

inline constexpr int any_event = -1;

ClaimResult check_claim(const StateMachine& fsm, const std::vector<SequenceSpec>& es,
                        const ClaimOptions& options = {});

// `event:(state)` arrows, newest step first; a masked event prints as `*`.
std::string format_backtrace(const StateMachine& fsm, const Computation& c);

// Text fixture: `event state -> state` lines, `#` comments, property blocks,
// optional `states:`/`events:` declarations and an `otherwise -> STATE` directive.
struct FsmFile {
  StateMachine machine;
  std::map<std::string, Property> properties;
};
FsmFile parse_fsm(std::string_view text);

}  // namespace flucid::era
