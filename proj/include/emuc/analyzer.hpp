#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emuc/diagnostic.hpp"
#include "emuc/model.hpp"

namespace emuc {

/// Retypes flexible integer literals from context: the other operand of an
/// arithmetic or comparison operator, or the assignment target. Literals that
/// do not fit their context are left alone for type_check to report.
Diagram infer_literal_types(const Diagram& d);

/// Type rules: guards are bool8; arithmetic takes two operands of one
/// non-boolean type; comparisons take two operands of one type (ordering
/// excludes bool8) and yield bool8; `!`, `&&`, `||` take bool8; unary minus
/// takes real64 or int32; each assignment's right-hand side has the target's
/// type. Also reports undeclared variables and repeated assignment targets.
std::vector<Diagnostic> type_check(const Diagram& d);

/// Unreachable nodes and duplicate (source, trigger, guard) arcs are errors,
/// as are names that would collide in generated C. Triggers with no arc from
/// some reachable node are reported as warnings.
std::vector<Diagnostic> check_structure(const Diagram& d);

/// Searches for valuations satisfying two guards of one (node, trigger) pair.
/// Sampling-based: absence of warnings is not a proof of exclusivity.
std::vector<Diagnostic> check_guard_exclusivity(const Diagram& d, std::size_t samples_per_var,
                                                std::uint64_t seed);

/// Parse, type literals, and run type_check and check_structure. The value is
/// present only if no error-severity diagnostic was produced.
Parsed<Diagram> load_model(std::string_view source);
/// As load_model, for an already-parsed diagram.
Parsed<Diagram> accept_diagram(const Diagram& parsed);

struct ExploreLimits {
  std::size_t bfs_depth = 8;
  std::size_t max_states = 4096;
  /// States at most this deep also start single-trigger runs.
  std::size_t saturate_from_depth = 2;
  std::size_t saturate_length = 64;
};

using NodeTrigger = std::pair<std::string, std::string>;

/// (node, trigger) pairs at which some explored reachable state has the
/// trigger permitted but no guard satisfied. Exploration is bounded: a
/// breadth-first sweep plus long runs repeating a single trigger.
std::set<NodeTrigger> find_idle_pairs(const Diagram& d, const ExploreLimits& limits = {});

}  // namespace emuc
