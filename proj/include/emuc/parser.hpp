#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "emuc/diagnostic.hpp"
#include "emuc/model.hpp"

namespace emuc {

/// Parses a `.emuc` model. Literal typing is left to the analyzer
/// (see infer_literal_types); integer literals come back flexible.
Parsed<Diagram> parse_diagram(std::string_view source);

/// Parses a guard or right-hand-side expression. Precedence, loosest first:
/// `||`, `&&`, `!`, comparisons, `+ -`, `* /`, unary `-`.
Parsed<ExprPtr> parse_expr(std::string_view source);

/// Prints `e` in model syntax with the minimum parentheses needed to reparse
/// to the same tree.
std::string print_expr(const Expr& e);

/// Prints a literal in model syntax (`10.0`, `7`, `7u`, `true`).
std::string print_literal(const Value& v);

/// Serializes a diagram in the `.emuc` text format.
std::string print_diagram(const Diagram& d);

// Structured interchange form. Expressions travel as model-syntax strings:
//
//   {"name": "...", "nodes": [...], "initial": "...",
//    "variables": [{"name", "type", "initial"}],
//    "arcs": [{"source", "target", "trigger", "guard", "action": [{"target", "rhs"}]}]}
nlohmann::json diagram_to_json(const Diagram& d);
Parsed<Diagram> diagram_from_json(const nlohmann::json& j);

}  // namespace emuc
