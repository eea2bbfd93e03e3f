#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flucid/ast.hpp"
#include "flucid/value.hpp"

namespace flucid {

struct EvalOptions {
  double threshold = 0.5;                // credibility gate
  std::optional<std::int64_t> horizon;   // for INF+ observations in claims
  std::ostream* trace = nullptr;         // DEMAND lines
  int jobs = 1;
  bool memoize = true;
  int max_depth = 5000;
  std::int64_t scan_limit = 1 << 16;     // longest stream scanned for its end
  std::string base_dir;                  // for embed() of relative paths
};

struct EvalError : std::runtime_error {
  Span span;
  EvalError(const std::string& what, Span s) : std::runtime_error(what), span(s) {}
};

// One claim answered by the reconstruction engine during evaluation.
struct ClaimReport {
  std::string function;
  bool consistent = false;
  std::int64_t horizon = 0;
  bool truncated = false;
  std::vector<std::string> backtraces;
  std::size_t total = 0;
};

class Evaluator {
 public:
  explicit Evaluator(NodePtr program, EvalOptions options = {});
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  // value of the program's result expression
  Value run(const SimpleContext& context = {});
  // an expression evaluated inside the program's outermost where scope
  Value evaluate(const Node& expr, const SimpleContext& context = {});
  Value evaluate(std::string_view expr_source, const SimpleContext& context = {});
  Value value_of(const std::string& name, const SimpleContext& context = {});

  // binds `name` in the outermost scope to a finite stream along `dim`
  void bind_stream(const std::string& name, std::vector<Value> values, const std::string& dim = "_");

  std::vector<ClaimReport> claims() const;
  std::size_t warehouse_size() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

// Evaluates a stand-alone expression with no declarations.
Value evaluate_expression(std::string_view source, const SimpleContext& context = {}, EvalOptions options = {});

}  // namespace flucid
