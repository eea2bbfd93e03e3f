#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flucid/ast.hpp"
#include "flucid/value.hpp"

namespace flucid {

enum class EntryKind { dim, cnst, op, var, func, cop, sop, odim, osdim, esdim, fop };

std::string entry_kind_name(EntryKind k);

// Default-filled observation components; absent parts hold literal nodes.
struct ForensicTuple {
  NodePtr property, min, max, w, t;
};

struct Entry {
  EntryKind kind = EntryKind::var;
  std::string name;
  const Node* decl = nullptr;  // null for parameters and implicit dimensions
  int scope = 0;
  std::shared_ptr<const TagSet> tags;  // dim with a statically known tag set
  std::optional<ForensicTuple> tuple;  // odim
  bool implicit = false;
};

struct Scope {
  int parent = -1;
  const Node* owner = nullptr;
  std::map<std::string, int> names;
};

struct AnalyzeOptions {
  // undefined identifiers become warnings (evidence files, elided listings)
  bool fragment = false;
};

struct Analysis {
  std::vector<Entry> entries;
  std::vector<Scope> scopes;
  std::map<const Node*, int> resolution;  // identifier node -> entry
  std::vector<Diagnostic> diagnostics;
  std::set<std::string> implicit_dimensions;

  bool ok() const;
  std::size_t error_count() const;
  const Entry* entry_for(const Node* ident) const;
  // lookup by name from the root scope
  const Entry* global(const std::string& name) const;
};

Analysis analyze(const Node& program, const AnalyzeOptions& options = {});

// Cross-product family of fixed-length variants per sequence.
struct PromotedStatement {
  std::string name;
  std::vector<std::vector<ObservationSequence>> families;
  bool deferred = false;  // INF+ seen with no horizon given

  std::size_t variant_count() const;
};

// horizon <= 0 leaves INF+ observations unexpanded and sets `deferred`.
PromotedStatement promote_generic(const EvidentialStatement& es, std::int64_t horizon = 0);
std::vector<ObservationSequence> promote_sequence(const ObservationSequence& os, std::int64_t horizon,
                                                  bool* deferred = nullptr);

// Extended stream operators expressed through @, # and if; forensic and
// context-calculus operators are left alone.
NodePtr rewrite_to_core(const Node& tree);
// operators that rewrite_to_core replaces
const std::set<std::string>& core_rewritable_operators();

}  // namespace flucid
