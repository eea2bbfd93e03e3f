#include "flucid/claims.hpp"

#include <algorithm>

namespace flucid::claims {

namespace {

void walk(const Node& n, const std::function<void(const Node&)>& f) {
  f(n);
  for (const auto& k : n.kids)
    if (k) walk(*k, f);
  for (const auto& d : n.decls)
    if (d) walk(*d, f);
}

void add_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

bool is_ident(const Node& n, const std::string& name) { return n.kind == NodeKind::ident && n.text == name; }

}  // namespace

std::vector<std::string> event_literals(const Node& body, const std::string& param) {
  std::vector<std::string> out;
  walk(body, [&](const Node& n) {
    if (n.kind != NodeKind::binary || n.text != "==") return;
    const Node& a = *n.kids[0];
    const Node& b = *n.kids[1];
    if (is_ident(a, param) && b.kind == NodeKind::literal && b.literal.is_text()) add_unique(out, b.literal.as_text());
    if (is_ident(b, param) && a.kind == NodeKind::literal && a.literal.is_text()) add_unique(out, a.literal.as_text());
  });
  return out;
}

int component_count(const Node& body, const std::string& param) {
  int n = 1;
  walk(body, [&](const Node& x) {
    if (x.kind != NodeKind::unary || x.kids.empty() || !is_ident(*x.kids[0], param)) return;
    if (x.text == "second") n = std::max(n, 2);
  });
  return n;
}

std::vector<std::string> string_literals(const Node& body) {
  std::vector<std::string> out;
  walk(body, [&](const Node& n) {
    if (n.kind == NodeKind::literal && n.literal.is_text()) add_unique(out, n.literal.as_text());
  });
  return out;
}

std::string state_label(const std::vector<std::string>& components) {
  std::string s = "(";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) s += ",";
    s += components[i];
  }
  return s + ")";
}

era::StateMachine derive_machine(const std::vector<std::string>& events, const std::vector<std::string>& domain,
                                 int components, const StepFunction& step) {
  if (domain.empty()) throw ClaimError("empty state domain");
  if (events.empty()) throw ClaimError("no events found in the transition function");
  std::vector<std::vector<std::string>> tuples{{}};
  for (int c = 0; c < components; ++c) {
    std::vector<std::vector<std::string>> next;
    for (const auto& t : tuples)
      for (const auto& d : domain) {
        auto u = t;
        u.push_back(d);
        next.push_back(std::move(u));
      }
    tuples = std::move(next);
  }
  std::vector<std::string> labels;
  for (const auto& t : tuples) labels.push_back(state_label(t));
  auto fsm = era::make_machine(labels, events);
  std::map<std::vector<std::string>, int> index;
  for (std::size_t i = 0; i < tuples.size(); ++i) index[tuples[i]] = static_cast<int>(i);
  for (int e = 0; e < fsm.num_events(); ++e)
    for (std::size_t q = 0; q < tuples.size(); ++q) {
      auto to = step(events[static_cast<std::size_t>(e)], tuples[q]);
      auto it = index.find(to);
      if (it == index.end())
        throw ClaimError("transition " + events[static_cast<std::size_t>(e)] + " from " + labels[q] +
                         " leaves the state domain: " + state_label(to));
      fsm.set(e, static_cast<int>(q), it->second);
    }
  return fsm;
}

namespace {

std::set<int> uniform_states(const era::StateMachine& fsm, const std::string& s) {
  std::set<int> out;
  for (int q = 0; q < fsm.num_states(); ++q) {
    const std::string& label = fsm.states[static_cast<std::size_t>(q)];
    if (label.size() < 2 || label.front() != '(' || label.back() != ')') continue;
    std::string inner = label.substr(1, label.size() - 2);
    bool all = true;
    std::size_t start = 0;
    while (true) {
      auto comma = inner.find(',', start);
      if (inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start) != s) {
        all = false;
        break;
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (all) out.insert(q);
  }
  return out;
}

void add_label(const era::StateMachine& fsm, const std::string& s, const std::map<std::string, era::Property>& named,
               era::Property& p, bool& saw_event, bool& saw_state) {
  if (auto it = named.find(s); it != named.end()) {
    const auto& n = it->second;
    if (n.states) {
      if (!p.states) p.states.emplace();
      p.states->insert(n.states->begin(), n.states->end());
      saw_state = true;
    }
    if (n.allow_events) {
      if (!p.allow_events) p.allow_events.emplace();
      p.allow_events->insert(n.allow_events->begin(), n.allow_events->end());
      saw_event = true;
    }
    p.deny_events.insert(n.deny_events.begin(), n.deny_events.end());
    return;
  }
  if (auto q = fsm.state_index(s)) {
    if (!p.states) p.states.emplace();
    p.states->insert(*q);
    saw_state = true;
    return;
  }
  if (auto e = fsm.event_index(s)) {
    if (!p.allow_events) p.allow_events.emplace();
    p.allow_events->insert(*e);
    saw_event = true;
    return;
  }
  auto u = uniform_states(fsm, s);
  if (u.empty()) throw ClaimError("observed property \"" + s + "\" names no state, event or property of the machine");
  if (!p.states) p.states.emplace();
  p.states->insert(u.begin(), u.end());
  saw_state = true;
}

}  // namespace

era::Property property_of(const era::StateMachine& fsm, const Value& p,
                          const std::map<std::string, era::Property>& named) {
  std::vector<std::string> labels;
  std::string name;
  switch (p.kind()) {
    case Value::Kind::text: labels.push_back(p.as_text()); break;
    case Value::Kind::dimension: {
      const auto& d = p.as_dimension();
      name = d.name;
      if (!d.tags || !d.tags->finite) throw ClaimError("dimension " + d.name + " has no finite tag set");
      for (const auto& t : d.tags->listing()) labels.push_back(to_source(t));
      break;
    }
    case Value::Kind::tag_set:
      for (const auto& t : p.as_tag_set().listing()) labels.push_back(to_source(t));
      break;
    case Value::Kind::array:
      for (const auto& t : p.as_array()) labels.push_back(to_source(t));
      break;
    default: throw ClaimError("observed property " + to_source(p) + " cannot be read as a machine property");
  }
  for (auto& l : labels)
    if (l.size() >= 2 && l.front() == '"') l = l.substr(1, l.size() - 2);
  era::Property out;
  out.name = name.empty() ? (labels.size() == 1 ? labels[0] : to_source(p)) : name;
  bool saw_event = false, saw_state = false;
  for (const auto& l : labels) add_label(fsm, l, named, out, saw_event, saw_state);
  return out;
}

std::vector<era::SequenceSpec> specs_of(const era::StateMachine& fsm, const EvidentialStatement& es, double threshold,
                                        const std::map<std::string, era::Property>& named) {
  std::vector<era::SequenceSpec> out;
  for (const auto& os : es.sequences) {
    era::SequenceSpec spec;
    for (const auto& o : os.observations) {
      era::ObservationSpec s;
      if (o.any_property || o.w < threshold) {
        // no-observation, or one too weak to count
        s.property = era::Property::any();
        s.min = o.any_property ? o.min : 0;
        s.max = o.any_property ? o.max : 0;
        s.max_inf = o.any_property ? o.max_inf : true;
      } else {
        s.property = property_of(fsm, o.property, named);
        s.min = o.min;
        s.max = o.max;
        s.max_inf = o.max_inf;
      }
      spec.push_back(std::move(s));
    }
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace flucid::claims
