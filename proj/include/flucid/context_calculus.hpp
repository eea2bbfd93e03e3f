#pragma once

#include <string>
#include <vector>

#include "flucid/value.hpp"

namespace flucid::calculus {

struct TypeError : ValueError {
  using ValueError::ValueError;
};

// simple contexts
bool is_sub_context(const SimpleContext& a, const SimpleContext& b);
SimpleContext difference(const SimpleContext& a, const SimpleContext& b);
SimpleContext intersection(const SimpleContext& a, const SimpleContext& b);
SimpleContext override_with(const SimpleContext& a, const SimpleContext& b);
SimpleContext projection(const SimpleContext& c, const std::vector<std::string>& dims);
SimpleContext hiding(const SimpleContext& c, const std::vector<std::string>& dims);
SimpleContext tag_projection(const SimpleContext& c, const std::vector<Value>& tags);
SimpleContext tag_hiding(const SimpleContext& c, const std::vector<Value>& tags);
bool conflicts(const SimpleContext& a, const SimpleContext& b);
// conflict-free union or the normalized context set
Value union_of(const SimpleContext& a, const SimpleContext& b);

// context sets
ContextSet union_of(const ContextSet& a, const ContextSet& b);
ContextSet override_with(const ContextSet& a, const ContextSet& b);

// forensic contexts
Value union_forensic(const Value& a, const Value& b);
Value combine(const Value& a, const Value& b);
Value product(const Value& a, const Value& b);
// every observation of a nested forensic value, outermost order
std::vector<Observation> flatten(const Value& forensic);

// Generic dispatch used by the evaluator for the \op tokens.
bool membership(const std::string& op, const Value& a, const Value& b);  // "in" | "isSubContext"
Value set_like(const std::string& op, const Value& a, const Value& b);   // difference | intersection | union
Value override_values(const Value& a, const Value& b);
Value filter(const std::string& mode, const Value& c, const Value& sel);  // projection | hiding

}  // namespace flucid::calculus
