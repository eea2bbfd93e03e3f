#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "flucid/ast.hpp"
#include "flucid/era.hpp"
#include "flucid/value.hpp"

namespace flucid::claims {

struct ClaimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// String literals compared with == against `param`, in order of appearance.
std::vector<std::string> event_literals(const Node& body, const std::string& param);
// Highest component read from `param` through first/second (1 or 2); 1 when unread.
int component_count(const Node& body, const std::string& param);
// Every string literal in the subtree, in order of first appearance.
std::vector<std::string> string_literals(const Node& body);

std::string state_label(const std::vector<std::string>& components);

using StepFunction =
    std::function<std::vector<std::string>(const std::string& event, const std::vector<std::string>& state)>;

// Machine over every tuple of `domain` values with `components` entries.
era::StateMachine derive_machine(const std::vector<std::string>& events, const std::vector<std::string>& domain,
                                 int components, const StepFunction& step);

// Property denoted by an observation's P.
era::Property property_of(const era::StateMachine& fsm, const Value& p,
                          const std::map<std::string, era::Property>& named = {});

std::vector<era::SequenceSpec> specs_of(const era::StateMachine& fsm, const EvidentialStatement& es,
                                        double threshold = 0.5,
                                        const std::map<std::string, era::Property>& named = {});

}  // namespace flucid::claims
