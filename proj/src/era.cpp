#include "flucid/era.hpp"

#include <functional>
#include <future>
#include <limits>

namespace flucid::era {

std::optional<int> StateMachine::state_index(std::string_view name) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> StateMachine::event_index(std::string_view name) const {
  for (std::size_t i = 0; i < events.size(); ++i)
    if (events[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

void StateMachine::validate() const {
  if (states.empty()) throw EraError("state machine has no states");
  if (psi.size() != states.size() * events.size()) throw EraError("transition table has the wrong size");
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (psi[i] < 0 || psi[i] >= num_states())
      throw EraError("no transition for event " + events[i / states.size()] + " in state " +
                     states[i % states.size()]);
}

StateMachine make_machine(std::vector<std::string> states, std::vector<std::string> events) {
  StateMachine m;
  m.states = std::move(states);
  m.events = std::move(events);
  m.psi.assign(m.states.size() * m.events.size(), -1);
  return m;
}

bool chained(const StateMachine& fsm, const Computation& c) {
  for (std::size_t k = 0; k + 1 < c.size(); ++k)
    if (fsm.step(c[k].event, c[k].state) != c[k + 1].state) return false;
  return true;
}

std::vector<std::vector<Step>> invert_transition(const StateMachine& fsm) {
  std::vector<std::vector<Step>> pred(fsm.states.size());
  for (int e = 0; e < fsm.num_events(); ++e)
    for (int q = 0; q < fsm.num_states(); ++q) pred[fsm.step(e, q)].push_back({e, q});
  return pred;
}

std::set<Computation> psi_inverse_set(const StateMachine& fsm, const std::set<Computation>& Y) {
  auto pred = invert_transition(fsm);
  std::set<Computation> out;
  for (const auto& y : Y) {
    if (y.empty()) continue;
    for (const auto& p : pred[y.front().state]) {
      Computation x;
      x.reserve(y.size() + 1);
      x.push_back(p);
      x.insert(x.end(), y.begin(), y.end());
      out.insert(std::move(x));
    }
  }
  return out;
}

RunSet RunSet::universal(const StateMachine& fsm, int length) {
  std::vector<std::vector<char>> masks(static_cast<std::size_t>(length),
                                       std::vector<char>(fsm.states.size() * fsm.events.size(), 1));
  return from_masks(fsm, std::move(masks));
}

RunSet RunSet::from_masks(const StateMachine& fsm, std::vector<std::vector<char>> allowed) {
  RunSet r;
  r.fsm_ = &fsm;
  r.length_ = static_cast<int>(allowed.size());
  r.zero_nonempty_ = r.length_ == 0;
  r.layers_ = std::move(allowed);
  r.trim();
  return r;
}

void RunSet::trim() {
  if (length_ == 0) return;
  const int Q = fsm_->num_states(), I = fsm_->num_events();
  // backward: a node survives if its successor state is alive in the next layer
  for (int k = length_ - 2; k >= 0; --k) {
    std::vector<char> alive_state(static_cast<std::size_t>(Q), 0);
    for (int e = 0; e < I; ++e)
      for (int q = 0; q < Q; ++q)
        if (layers_[k + 1][static_cast<std::size_t>(e * Q + q)]) alive_state[q] = 1;
    for (int e = 0; e < I; ++e)
      for (int q = 0; q < Q; ++q) {
        auto& n = layers_[k][static_cast<std::size_t>(e * Q + q)];
        if (n && !alive_state[fsm_->step(e, q)]) n = 0;
      }
  }
  // forward: a node survives if some alive node leads into its state
  for (int k = 1; k < length_; ++k) {
    std::vector<char> reach(static_cast<std::size_t>(Q), 0);
    for (int e = 0; e < I; ++e)
      for (int q = 0; q < Q; ++q)
        if (layers_[k - 1][static_cast<std::size_t>(e * Q + q)]) reach[fsm_->step(e, q)] = 1;
    for (int e = 0; e < I; ++e)
      for (int q = 0; q < Q; ++q) {
        auto& n = layers_[k][static_cast<std::size_t>(e * Q + q)];
        if (n && !reach[q]) n = 0;
      }
  }
}

bool RunSet::empty() const {
  if (length_ == 0) return !zero_nonempty_;
  for (char c : layers_.front())
    if (c) return false;
  return true;
}

bool RunSet::contains(const Computation& c) const {
  if (static_cast<int>(c.size()) != length_) return false;
  if (length_ == 0) return zero_nonempty_;
  if (!chained(*fsm_, c)) return false;
  const int Q = fsm_->num_states();
  for (int k = 0; k < length_; ++k)
    if (!layers_[k][static_cast<std::size_t>(c[k].event * Q + c[k].state)]) return false;
  return true;
}

double RunSet::count() const {
  if (length_ == 0) return zero_nonempty_ ? 1.0 : 0.0;
  const int Q = fsm_->num_states(), I = fsm_->num_events();
  std::vector<double> ways_by_state(static_cast<std::size_t>(Q), 0.0);
  // paths starting in layer k at a node with state q
  for (int e = 0; e < I; ++e)
    for (int q = 0; q < Q; ++q)
      if (layers_[length_ - 1][static_cast<std::size_t>(e * Q + q)]) ways_by_state[q] += 1.0;
  for (int k = length_ - 2; k >= 0; --k) {
    std::vector<double> next(static_cast<std::size_t>(Q), 0.0);
    for (int e = 0; e < I; ++e)
      for (int q = 0; q < Q; ++q)
        if (layers_[k][static_cast<std::size_t>(e * Q + q)]) next[q] += ways_by_state[fsm_->step(e, q)];
    ways_by_state = std::move(next);
  }
  double s = 0.0;
  for (double v : ways_by_state) s += v;
  return s;
}

std::vector<Computation> RunSet::enumerate(std::size_t limit) const {
  std::vector<Computation> out;
  if (length_ == 0) {
    if (zero_nonempty_ && limit > 0) out.emplace_back();
    return out;
  }
  const int Q = fsm_->num_states(), I = fsm_->num_events();
  Computation cur;
  std::function<void(int, int)> dfs = [&](int k, int want_state) {
    if (out.size() >= limit) return;
    for (int e = 0; e < I && out.size() < limit; ++e)
      for (int q = 0; q < Q && out.size() < limit; ++q) {
        if (want_state >= 0 && q != want_state) continue;
        if (!layers_[k][static_cast<std::size_t>(e * Q + q)]) continue;
        cur.push_back({e, q});
        if (k + 1 == length_)
          out.push_back(cur);
        else
          dfs(k + 1, fsm_->step(e, q));
        cur.pop_back();
      }
  };
  dfs(0, -1);
  return out;
}

RunSet intersect(const RunSet& a, const RunSet& b) {
  RunSet r;
  r.fsm_ = a.fsm_ ? a.fsm_ : b.fsm_;
  if (a.length_ != b.length_) {
    r.length_ = a.length_;
    r.layers_ = a.layers_;
    for (auto& layer : r.layers_) std::fill(layer.begin(), layer.end(), 0);
    return r;
  }
  r.length_ = a.length_;
  r.zero_nonempty_ = a.zero_nonempty_ && b.zero_nonempty_;
  r.layers_ = a.layers_;
  for (std::size_t k = 0; k < r.layers_.size(); ++k)
    for (std::size_t i = 0; i < r.layers_[k].size(); ++i) r.layers_[k][i] = r.layers_[k][i] && b.layers_[k][i];
  r.trim();
  return r;
}

namespace {

std::vector<const Property*> positions(const std::vector<std::pair<Property, std::int64_t>>& os) {
  std::vector<const Property*> pos;
  for (const auto& [p, n] : os) {
    if (n < 0) throw EraError("negative observation length");
    for (std::int64_t i = 0; i < n; ++i) pos.push_back(&p);
  }
  return pos;
}

}  // namespace

MPR<RunSet> meaning_fixed_length(const StateMachine& fsm,
                                 const std::vector<std::pair<Property, std::int64_t>>& os) {
  auto pos = positions(os);
  const int Q = fsm.num_states(), I = fsm.num_events();
  std::vector<std::vector<char>> masks(pos.size(), std::vector<char>(static_cast<std::size_t>(Q * I), 0));
  for (std::size_t k = 0; k < pos.size(); ++k)
    for (int e = 0; e < I; ++e)
      for (int q = 0; q < Q; ++q) masks[k][static_cast<std::size_t>(e * Q + q)] = pos[k]->holds(e, q);
  MPR<RunSet> m;
  for (const auto& [p, n] : os) m.len.push_back(n);
  m.runs = RunSet::from_masks(fsm, std::move(masks));
  return m;
}

std::set<Computation> meaning_by_backtracing(const StateMachine& fsm,
                                             const std::vector<std::pair<Property, std::int64_t>>& os) {
  auto pos = positions(os);
  if (pos.empty()) return {Computation{}};
  std::set<Computation> Y;
  for (int e = 0; e < fsm.num_events(); ++e)
    for (int q = 0; q < fsm.num_states(); ++q)
      if (pos.back()->holds(e, q)) Y.insert(Computation{{e, q}});
  for (int k = static_cast<int>(pos.size()) - 2; k >= 0; --k) {
    std::set<Computation> next;
    for (auto& x : psi_inverse_set(fsm, Y))
      if (pos[static_cast<std::size_t>(k)]->holds(x.front().event, x.front().state)) next.insert(x);
    Y = std::move(next);
  }
  return Y;
}

std::vector<Lens> expand_generic(const SequenceSpec& os, std::int64_t horizon) {
  std::int64_t min_total = 0;
  bool open = false;
  for (const auto& o : os) {
    min_total += o.min;
    open = open || o.max_inf;
  }
  if (open && horizon < min_total)
    throw EraError("horizon " + std::to_string(horizon) + " is smaller than the minimum length " +
                   std::to_string(min_total));
  std::vector<Lens> out{Lens{}};
  for (const auto& o : os) {
    std::int64_t hi = o.min + (o.max_inf ? horizon : o.max);
    std::vector<Lens> next;
    for (const auto& l : out)
      for (std::int64_t n = o.min; n <= hi; ++n) {
        Lens x = l;
        x.push_back(n);
        next.push_back(std::move(x));
      }
    out = std::move(next);
  }
  return out;
}

std::int64_t default_horizon(const StateMachine& fsm, const std::vector<SequenceSpec>& es) {
  std::int64_t best = 0;
  const std::int64_t Q = fsm.num_states();
  for (const auto& os : es) {
    std::int64_t s = 0;
    for (const auto& o : os) s += o.min + (o.max_inf ? Q : std::min(o.max, Q));
    best = std::max(best, s);
  }
  return best;
}

namespace {

// variants whose total stays within the horizon
std::vector<Lens> bounded_variants(const SequenceSpec& os, std::int64_t horizon) {
  std::vector<Lens> out;
  Lens cur;
  std::vector<std::int64_t> rest_min(os.size() + 1, 0);
  for (std::size_t i = os.size(); i-- > 0;) rest_min[i] = rest_min[i + 1] + os[i].min;
  std::function<void(std::size_t, std::int64_t)> go = [&](std::size_t i, std::int64_t used) {
    if (i == os.size()) {
      out.push_back(cur);
      return;
    }
    std::int64_t hi = os[i].min + (os[i].max_inf ? horizon : os[i].max);
    for (std::int64_t n = os[i].min; n <= hi && used + n + rest_min[i + 1] <= horizon; ++n) {
      cur.push_back(n);
      go(i + 1, used + n);
      cur.pop_back();
    }
  };
  go(0, 0);
  return out;
}

std::vector<MPR<RunSet>> sequence_meaning(const StateMachine& fsm, const SequenceSpec& os,
                                          std::int64_t horizon) {
  std::vector<MPR<RunSet>> out;
  for (const auto& lens : bounded_variants(os, horizon)) {
    std::vector<std::pair<Property, std::int64_t>> fixed;
    for (std::size_t i = 0; i < os.size(); ++i) fixed.emplace_back(os[i].property, lens[i]);
    auto m = meaning_fixed_length(fsm, fixed);
    if (!m.runs.empty()) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

ClaimResult check_claim(const StateMachine& fsm, const std::vector<SequenceSpec>& es,
                        const ClaimOptions& options) {
  if (es.empty()) throw EraError("evidential statement is empty");
  fsm.validate();
  ClaimResult result;
  result.horizon = options.horizon ? *options.horizon : default_horizon(fsm, es);
  for (const auto& os : es) {
    std::int64_t m = 0;
    for (const auto& o : os) {
      m += o.min;
      if (o.max_inf) result.horizon_truncated = true;
    }
    if (m > result.horizon)
      throw EraError("horizon " + std::to_string(result.horizon) + " is smaller than the minimum length " +
                     std::to_string(m));
  }

  std::vector<std::vector<MPR<RunSet>>> meanings(es.size());
  if (options.jobs > 1) {
    std::vector<std::future<std::vector<MPR<RunSet>>>> jobs;
    for (const auto& os : es)
      jobs.push_back(std::async(std::launch::async, [&fsm, &os, h = result.horizon] {
        return sequence_meaning(fsm, os, h);
      }));
    for (std::size_t i = 0; i < es.size(); ++i) meanings[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < es.size(); ++i) meanings[i] = sequence_meaning(fsm, es[i], result.horizon);
  }

  std::map<std::int64_t, std::vector<MSPR<RunSet>>> spm;
  for (const auto& m : meanings[0]) spm[total(m.len)].push_back(MSPR<RunSet>{{m.len}, m.runs});
  for (std::size_t i = 1; i < es.size(); ++i) {
    std::map<std::int64_t, std::vector<const MPR<RunSet>*>> by_total;
    for (const auto& m : meanings[i]) by_total[total(m.len)].push_back(&m);
    std::map<std::int64_t, std::vector<MSPR<RunSet>>> next;
    for (const auto& [sum, msprs] : spm) {
      auto it = by_total.find(sum);
      if (it == by_total.end()) continue;
      for (const auto& x : msprs)
        for (const auto* y : it->second)
          if (auto c = comb(x, *y)) next[sum].push_back(std::move(*c));
    }
    spm = std::move(next);
  }
  for (auto& [sum, msprs] : spm)
    for (auto& m : msprs) result.explanations.push_back(std::move(m));
  result.consistent = !result.explanations.empty();

  std::set<Computation> seen;
  for (const auto& x : result.explanations) {
    if (seen.size() >= options.enumeration_cap) {
      result.backtraces_truncated = true;
      break;
    }
    // enough raw paths to cover the cap after the last event is masked
    std::size_t want = (options.enumeration_cap - seen.size()) * static_cast<std::size_t>(fsm.num_events()) + 1;
    auto paths = x.runs.enumerate(want);
    if (paths.size() >= want) result.backtraces_truncated = true;
    for (auto& p : paths) {
      if (!p.empty()) p.back().event = any_event;
      if (seen.size() >= options.enumeration_cap) {
        result.backtraces_truncated = true;
        break;
      }
      if (seen.insert(p).second && result.backtraces.size() < options.max_backtraces)
        result.backtraces.push_back(p);
    }
  }
  result.backtrace_total = seen.size();
  return result;
}

std::string format_backtrace(const StateMachine& fsm, const Computation& c) {
  if (c.empty()) return "(empty run)";
  std::string out;
  for (std::size_t k = c.size(); k-- > 0;) {
    if (!out.empty()) out += " <- ";
    out += c[k].event == any_event ? std::string("*") : fsm.events[static_cast<std::size_t>(c[k].event)];
    const std::string& s = fsm.states[static_cast<std::size_t>(c[k].state)];
    out += ":";
    out += (!s.empty() && s.front() == '(') ? s : "(" + s + ")";
  }
  return out;
}

namespace {

struct Tok {
  enum Kind { label, arrow, colon, comma, semi, lbrace, rbrace, newline, end } kind;
  std::string text;
  int line;
};

std::vector<Tok> fsm_tokens(std::string_view s) {
  std::vector<Tok> out;
  int line = 1;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      out.push_back({Tok::newline, "", line++});
      ++i;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::arrow, "->", line});
      i += 2;
    } else if (c == ':' || c == ',' || c == ';' || c == '{' || c == '}') {
      Tok::Kind k = c == ':' ? Tok::colon : c == ',' ? Tok::comma : c == ';' ? Tok::semi
                  : c == '{' ? Tok::lbrace : Tok::rbrace;
      out.push_back({k, std::string(1, c), line});
      ++i;
    } else if (c == '"') {
      std::string t;
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\n') throw EraError("line " + std::to_string(line) + ": unterminated quoted label");
        t += s[i++];
      }
      if (i >= s.size()) throw EraError("line " + std::to_string(line) + ": unterminated quoted label");
      ++i;
      out.push_back({Tok::label, t, line});
    } else {
      std::string t;
      int depth = 0;
      while (i < s.size()) {
        char d = s[i];
        if (d == '(') ++depth;
        if (d == ')') --depth;
        if (depth <= 0 && (d == ' ' || d == '\t' || d == '\r' || d == '\n' || d == ':' || d == ',' ||
                           d == ';' || d == '{' || d == '}' || d == '#'))
          break;
        if (depth <= 0 && d == '-' && i + 1 < s.size() && s[i + 1] == '>') break;
        if (depth > 0 && d == '\n') throw EraError("line " + std::to_string(line) + ": unbalanced parenthesis");
        t += d;
        ++i;
      }
      out.push_back({Tok::label, t, line});
    }
  }
  out.push_back({Tok::end, "", line});
  return out;
}

}  // namespace

FsmFile parse_fsm(std::string_view text) {
  auto toks = fsm_tokens(text);
  std::size_t p = 0;
  auto err = [&](const std::string& m) -> EraError {
    return EraError("line " + std::to_string(toks[p].line) + ": " + m);
  };
  std::vector<std::string> states, events;
  auto add = [](std::vector<std::string>& v, const std::string& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  struct Transition {
    std::string event, from, to;
    int line;
  };
  std::vector<Transition> transitions;
  std::optional<std::string> otherwise;
  struct RawProperty {
    std::string name;
    std::optional<std::vector<std::string>> states, allow;
    std::vector<std::string> deny;
  };
  std::vector<RawProperty> raw_props;

  auto read_list = [&](bool stop_at_newline) {
    std::vector<std::string> items;
    while (toks[p].kind == Tok::label || toks[p].kind == Tok::comma ||
           (!stop_at_newline && toks[p].kind == Tok::newline)) {
      if (toks[p].kind == Tok::label && toks[p + 1].kind == Tok::colon) break;
      if (toks[p].kind == Tok::label) items.push_back(toks[p].text);
      ++p;
    }
    return items;
  };

  while (toks[p].kind != Tok::end) {
    if (toks[p].kind == Tok::newline || toks[p].kind == Tok::semi) {
      ++p;
      continue;
    }
    if (toks[p].kind != Tok::label) throw err("unexpected '" + toks[p].text + "'");
    const std::string head = toks[p].text;
    if ((head == "states" || head == "events") && toks[p + 1].kind == Tok::colon) {
      p += 2;
      for (const auto& x : read_list(true)) add(head == "states" ? states : events, x);
      continue;
    }
    if (head == "otherwise" && toks[p + 1].kind == Tok::arrow) {
      p += 2;
      if (toks[p].kind != Tok::label) throw err("expected a state after 'otherwise ->'");
      otherwise = toks[p++].text;
      continue;
    }
    if (head == "property" && toks[p + 1].kind == Tok::label) {
      RawProperty rp;
      rp.name = toks[p + 1].text;
      p += 2;
      while (toks[p].kind == Tok::newline) ++p;
      if (toks[p].kind != Tok::lbrace) throw err("expected '{' after property name");
      ++p;
      while (true) {
        while (toks[p].kind == Tok::newline || toks[p].kind == Tok::semi) ++p;
        if (toks[p].kind == Tok::rbrace) {
          ++p;
          break;
        }
        if (toks[p].kind != Tok::label || toks[p + 1].kind != Tok::colon) throw err("expected 'field:' in property block");
        std::string field = toks[p].text;
        p += 2;
        auto items = read_list(false);
        bool wildcard = items.size() == 1 && items[0] == "*";
        if (field == "states") {
          if (!wildcard) rp.states = items;
        } else if (field == "allow-events") {
          if (!wildcard) rp.allow = items;
        } else if (field == "deny-events") {
          if (!wildcard) rp.deny = items;
        } else {
          throw err("unknown property field '" + field + "'");
        }
      }
      raw_props.push_back(std::move(rp));
      continue;
    }
    // event state -> state
    if (toks[p + 1].kind != Tok::label || toks[p + 2].kind != Tok::arrow || toks[p + 3].kind != Tok::label)
      throw err("expected 'event state -> state'");
    transitions.push_back({toks[p].text, toks[p + 1].text, toks[p + 3].text, toks[p].line});
    p += 4;
    if (toks[p].kind != Tok::newline && toks[p].kind != Tok::end && toks[p].kind != Tok::semi)
      throw err("trailing text after transition");
  }

  for (const auto& t : transitions) {
    add(events, t.event);
    add(states, t.from);
    add(states, t.to);
  }
  if (otherwise) add(states, *otherwise);
  FsmFile f;
  f.machine = make_machine(states, events);
  auto& m = f.machine;
  for (const auto& t : transitions) {
    int e = *m.event_index(t.event), q = *m.state_index(t.from), to = *m.state_index(t.to);
    int prev = m.step(e, q);
    if (prev >= 0 && prev != to)
      throw EraError("line " + std::to_string(t.line) + ": conflicting transition for " + t.event + " in " + t.from);
    m.set(e, q, to);
  }
  if (otherwise) {
    int sink = *m.state_index(*otherwise);
    for (auto& x : m.psi)
      if (x < 0) x = sink;
  }
  m.validate();

  auto resolve = [&](const std::vector<std::string>& names, bool state, const std::string& prop) {
    std::set<int> out;
    for (const auto& n : names) {
      auto i = state ? m.state_index(n) : m.event_index(n);
      if (!i) throw EraError("property " + prop + " names unknown " + (state ? "state " : "event ") + n);
      out.insert(*i);
    }
    return out;
  };
  for (const auto& rp : raw_props) {
    Property pr;
    pr.name = rp.name;
    if (rp.states) pr.states = resolve(*rp.states, true, rp.name);
    if (rp.allow) pr.allow_events = resolve(*rp.allow, false, rp.name);
    pr.deny_events = resolve(rp.deny, false, rp.name);
    f.properties[rp.name] = std::move(pr);
  }
  return f;
}

}  // namespace flucid::era
