#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "emuc/model.hpp"

namespace emuc {

using Valuation = std::map<std::string, Value>;

/// Raised by evaluate() on division by zero, integer overflow, or an operand
/// combination the type rules exclude.
class EvalTrap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trap raised while firing a step; names the arc and the expression.
class TrapError : public std::runtime_error {
 public:
  TrapError(std::size_t arc, std::string expression, const std::string& reason);

  std::size_t arc_index() const { return arc_; }
  const std::string& expression() const { return expression_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t arc_;
  std::string expression_;
  std::string reason_;
};

/// Evaluates `e` over `v`. `&&` and `||` short-circuit, matching C.
Value evaluate(const Expr& e, const Valuation& v);

/// The three ways a step can go, one per case of the equivalence argument.
enum class StepCase { not_permitted, guard_unsatisfied, fired };

std::string_view case_name(StepCase c);

struct StepResult {
  MachineState state;
  StepCase kind = StepCase::not_permitted;
  std::optional<std::size_t> arc;
};

/// Instrumentation counters: how often each step case occurred and how often
/// each arc fired.
struct Coverage {
  std::size_t not_permitted = 0;
  std::size_t guard_unsatisfied = 0;
  std::size_t fired = 0;
  std::vector<std::size_t> arc_fired;

  void record(const StepResult& r);
  void merge(const Coverage& other);
  std::size_t count(StepCase c) const;
};

/// Reference executor for one diagram. Holds a (node, trigger) → arcs index;
/// the diagram must outlive the interpreter and be accepted by the analyzer.
class Interpreter {
 public:
  explicit Interpreter(const Diagram& d);

  const Diagram& diagram() const { return *d_; }
  const std::vector<std::string>& triggers() const { return triggers_; }
  bool knows_trigger(std::string_view t) const;

  MachineState init() const;
  /// True iff the current node has at least one arc for `t`; guards are not
  /// consulted. Throws DomainError for a trigger the diagram never uses.
  bool permitted(const MachineState& s, std::string_view t) const;
  StepResult step_detailed(const MachineState& s, std::string_view t) const;
  MachineState step(const MachineState& s, std::string_view t) const;

  /// Arc indices for (node, trigger) in declaration order.
  const std::vector<std::size_t>& arcs_from(std::string_view node, std::string_view t) const;

 private:
  std::size_t trigger_index(std::string_view t) const;
  std::size_t node_index(std::string_view n) const;

  const Diagram* d_;
  std::vector<std::string> triggers_;
  // [node][trigger] -> arc indices
  std::vector<std::vector<std::vector<std::size_t>>> table_;
};

MachineState init(const Diagram& d);
bool permitted(const Diagram& d, const MachineState& s, std::string_view t);
MachineState step(const Diagram& d, const MachineState& s, std::string_view t);
/// [q0, q1, ..., qk] with q(i) = step(q(i-1), events[i-1]).
std::vector<MachineState> run(const Diagram& d, const std::vector<std::string>& events);

/// Result of running a sequence that may trap part-way. `states` holds the
/// states reached before the trap (always at least q0).
struct RunOutcome {
  std::vector<MachineState> states;
  std::optional<std::string> trap;
  Coverage coverage;
};

RunOutcome run_checked(const Interpreter& interp, const std::vector<std::string>& events);

}  // namespace emuc
