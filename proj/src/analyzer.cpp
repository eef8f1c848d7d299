#include "emuc/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <unordered_set>

#include "emuc/interpreter.hpp"
#include "emuc/parser.hpp"
#include "emuc/trace.hpp"

namespace emuc {
namespace {

using VarTypes = std::map<std::string, NumericType, std::less<>>;

VarTypes var_types(const Diagram& d) {
  VarTypes out;
  for (const auto& v : d.variables) out.emplace(v.name, v.type);
  return out;
}

// Type of `e` when it does not hinge on a flexible literal.
std::optional<NumericType> concrete_type(const Expr& e, const VarTypes& vars) {
  if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) {
    if (lit->flexible) return std::nullopt;
    return lit->value.type();
  }
  if (const auto* v = std::get_if<VarExpr>(&e.node)) {
    auto it = vars.find(v->name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  }
  if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
    if (u->op == UnaryOp::logical_not) return NumericType::bool8;
    return concrete_type(*u->operand, vars);
  }
  const auto& b = std::get<BinaryExpr>(e.node);
  if (!is_arithmetic(b.op)) return NumericType::bool8;
  if (auto t = concrete_type(*b.lhs, vars)) return t;
  return concrete_type(*b.rhs, vars);
}

ExprPtr coerce(const ExprPtr& e, std::optional<NumericType> expected, const VarTypes& vars) {
  if (const auto* lit = std::get_if<LiteralExpr>(&e->node)) {
    if (!lit->flexible) return e;
    if (expected && *expected != NumericType::bool8) {
      if (auto v = convert_exact(lit->value, *expected)) return Expr::literal(*v);
    }
    return e;
  }
  if (std::holds_alternative<VarExpr>(e->node)) return e;
  if (const auto* u = std::get_if<UnaryExpr>(&e->node)) {
    auto want = u->op == UnaryOp::logical_not ? std::optional(NumericType::bool8) : expected;
    return Expr::unary(u->op, coerce(u->operand, want, vars));
  }
  const auto& b = std::get<BinaryExpr>(e->node);
  if (is_logical(b.op)) {
    return Expr::binary(b.op, coerce(b.lhs, NumericType::bool8, vars),
                        coerce(b.rhs, NumericType::bool8, vars));
  }
  auto t = concrete_type(*b.lhs, vars);
  if (!t) t = concrete_type(*b.rhs, vars);
  if (!t && is_arithmetic(b.op) && expected && *expected != NumericType::bool8) t = expected;
  return Expr::binary(b.op, coerce(b.lhs, t, vars), coerce(b.rhs, t, vars));
}

class TypeChecker {
 public:
  TypeChecker(const VarTypes& vars, std::vector<Diagnostic>& out, SourceLocation at)
      : vars_(vars), out_(out), at_(at) {}

  std::optional<NumericType> synth(const Expr& e) {
    if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) return lit->value.type();
    if (const auto* v = std::get_if<VarExpr>(&e.node)) {
      auto it = vars_.find(v->name);
      if (it == vars_.end()) return error("undeclared variable '" + v->name + "'");
      return it->second;
    }
    if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
      auto t = synth(*u->operand);
      if (!t) return std::nullopt;
      if (u->op == UnaryOp::logical_not) {
        if (*t != NumericType::bool8) return error("'!' needs a bool8 operand, got " + name(*t));
        return t;
      }
      if (*t != NumericType::real64 && *t != NumericType::int32) {
        return error("unary '-' needs a real64 or int32 operand, got " + name(*t));
      }
      return t;
    }
    const auto& b = std::get<BinaryExpr>(e.node);
    auto l = synth(*b.lhs);
    auto r = synth(*b.rhs);
    if (!l || !r) return std::nullopt;
    std::string op(op_symbol(b.op));
    if (is_logical(b.op)) {
      if (*l != NumericType::bool8 || *r != NumericType::bool8) {
        return error("'" + op + "' needs bool8 operands, got " + name(*l) + " and " + name(*r));
      }
      return NumericType::bool8;
    }
    if (*l != *r) {
      return error("'" + op + "' operands differ in type: " + name(*l) + " and " + name(*r));
    }
    if (is_arithmetic(b.op)) {
      if (*l == NumericType::bool8) return error("'" + op + "' is not defined on bool8");
      return l;
    }
    if (*l == NumericType::bool8 && b.op != BinaryOp::eq && b.op != BinaryOp::ne) {
      return error("'" + op + "' is not defined on bool8");
    }
    return NumericType::bool8;
  }

  std::optional<NumericType> error(std::string msg) {
    out_.push_back(make_error(std::move(msg), at_));
    return std::nullopt;
  }

  static std::string name(NumericType t) { return std::string(type_name(t)); }

 private:
  const VarTypes& vars_;
  std::vector<Diagnostic>& out_;
  SourceLocation at_;
};

const std::set<std::string, std::less<>>& reserved_names() {
  static const std::set<std::string, std::less<>> names = {
      // C89/C99 keywords
      "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
      "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
      "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
      "union", "unsigned", "void", "volatile", "while", "_Bool", "_Complex", "_Imaginary",
      // names the generated module and driver declare or use
      "enter", "leave", "init", "state", "node_label", "st", "l", "main", "true", "false",
      "assert", "curr_node", "prev_node", "curr", "prev", "UC_8", "CH_8", "I_32", "UI_32", "D_64",
      "print_state", "print_real", "line", "len", "NULL", "size_t", "printf", "fprintf",
      "snprintf", "fgets", "strcmp", "strlen", "strtod", "stdin", "stdout", "stderr", "exit",
      "abort", "and", "or", "not"};
  return names;
}

}  // namespace

Diagram infer_literal_types(const Diagram& d) {
  Diagram out = d;
  auto vars = var_types(d);
  for (auto& arc : out.arcs) {
    arc.guard = coerce(arc.guard, NumericType::bool8, vars);
    for (auto& as : arc.action) {
      auto it = vars.find(as.target);
      std::optional<NumericType> want;
      if (it != vars.end()) want = it->second;
      as.rhs = coerce(as.rhs, want, vars);
    }
  }
  return out;
}

std::vector<Diagnostic> type_check(const Diagram& d) {
  std::vector<Diagnostic> out;
  auto vars = var_types(d);
  for (const auto& arc : d.arcs) {
    TypeChecker tc(vars, out, arc.location);
    if (auto g = tc.synth(*arc.guard); g && *g != NumericType::bool8) {
      tc.error("guard of '" + arc.trigger + "' arc must be bool8, got " + TypeChecker::name(*g));
    }
    std::set<std::string, std::less<>> assigned;
    for (const auto& as : arc.action) {
      auto it = vars.find(as.target);
      if (it == vars.end()) {
        tc.error("assignment to undeclared variable '" + as.target + "'");
      }
      if (!assigned.insert(as.target).second) {
        tc.error("variable '" + as.target + "' assigned twice in one action");
      }
      auto t = tc.synth(*as.rhs);
      if (t && it != vars.end() && *t != it->second) {
        tc.error("cannot assign " + TypeChecker::name(*t) + " to '" + as.target + "' of type " +
                 TypeChecker::name(it->second));
      }
    }
  }
  return out;
}

std::vector<Diagnostic> check_structure(const Diagram& d) {
  std::vector<Diagnostic> out;
  const SourceLocation top{1, 1};
  const auto& reserved = reserved_names();
  auto triggers = trigger_set(d);

  // Generated C puts nodes (enum constants), triggers (functions) and
  // variables (struct fields) side by side.
  std::map<std::string, std::string, std::less<>> kinds;
  auto claim = [&](const std::string& name, const std::string& kind, SourceLocation at) {
    if (reserved.count(name) != 0 || name.rfind("emuc_", 0) == 0 ||
        (kind != "trigger" && name.rfind("per_", 0) == 0)) {
      out.push_back(make_error(kind + " name '" + name + "' is reserved in generated C", at));
      return;
    }
    auto [it, fresh] = kinds.emplace(name, kind);
    if (!fresh) {
      out.push_back(make_error(kind + " name '" + name + "' clashes with " + it->second + " '" +
                                   name + "'",
                               at));
    }
  };
  if (!is_c_identifier(d.name)) {
    out.push_back(make_error("diagram name '" + d.name + "' is not a C identifier", top));
  }
  for (const auto& n : d.nodes) claim(n, "node", top);
  for (const auto& v : d.variables) claim(v.name, "variable", v.location);
  auto first_arc = [&](const std::string& t) -> const Arc* {
    for (const auto& a : d.arcs) {
      if (a.trigger == t) return &a;
    }
    return nullptr;
  };
  for (const auto& t : triggers) claim(t, "trigger", first_arc(t)->location);
  for (const auto& t : triggers) {
    const Arc* first = first_arc(t);
    if (kinds.count("per_" + t) != 0) {
      out.push_back(make_error("trigger '" + t + "' generates 'per_" + t +
                                   "', which clashes with another name",
                               first->location));
    }
  }

  // Reachability over the arc graph, guards ignored.
  std::set<std::string, std::less<>> seen{d.initial};
  std::deque<std::string> todo{d.initial};
  while (!todo.empty()) {
    auto n = todo.front();
    todo.pop_front();
    for (const auto& a : d.arcs) {
      if (a.source == n && seen.insert(a.target).second) todo.push_back(a.target);
    }
  }
  for (const auto& n : d.nodes) {
    if (seen.count(n) == 0) out.push_back(make_error("unreachable node '" + n + "'", top));
  }

  for (std::size_t i = 0; i < d.arcs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = d.arcs[i];
      const auto& b = d.arcs[j];
      if (a.source == b.source && a.trigger == b.trigger && equal(*a.guard, *b.guard)) {
        out.push_back(make_error("duplicate arc: '" + a.source + "' already has a '" + a.trigger +
                                     "' arc with guard [" + print_expr(*a.guard) + "] (line " +
                                     std::to_string(b.location.line) + ")",
                                 a.location));
        break;
      }
    }
  }

  for (const auto& n : d.nodes) {
    if (seen.count(n) == 0) continue;
    for (const auto& t : triggers) {
      bool any = std::any_of(d.arcs.begin(), d.arcs.end(),
                             [&](const Arc& a) { return a.source == n && a.trigger == t; });
      if (!any) {
        out.push_back(make_warning("trigger '" + t + "' has no arc from node '" + n + "'", top));
      }
    }
  }
  return out;
}

namespace {

void push_unique(std::vector<Value>& xs, const Value& v) {
  if (std::find(xs.begin(), xs.end(), v) == xs.end()) xs.push_back(v);
}

void collect_literals(const Expr& e, std::vector<Value>& out) {
  if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) {
    push_unique(out, lit->value);
  } else if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
    collect_literals(*u->operand, out);
  } else if (const auto* b = std::get_if<BinaryExpr>(&e.node)) {
    collect_literals(*b->lhs, out);
    collect_literals(*b->rhs, out);
  }
}

double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<Value> sample_values(const ContextVariable& var, const std::vector<Value>& literals,
                                 std::size_t random_count, std::mt19937_64& rng) {
  std::vector<Value> out;
  push_unique(out, var.initial);
  long double span = 1;
  span = std::max(span, std::fabs(var.initial.widened()));
  for (const auto& lit : literals) {
    if (lit.type() == NumericType::bool8 && var.type != NumericType::bool8) continue;
    auto v = convert_exact(lit, var.type);
    if (!v) continue;
    span = std::max(span, std::fabs(v->widened()));
    push_unique(out, *v);
    switch (var.type) {
      case NumericType::real64: {
        double x = v->as_real();
        push_unique(out, Value::real(std::nextafter(x, -INFINITY)));
        push_unique(out, Value::real(std::nextafter(x, INFINITY)));
        break;
      }
      case NumericType::int32: {
        auto x = v->as_int32();
        if (x > std::numeric_limits<std::int32_t>::min()) push_unique(out, Value::int32(x - 1));
        if (x < std::numeric_limits<std::int32_t>::max()) push_unique(out, Value::int32(x + 1));
        break;
      }
      case NumericType::uint32: {
        auto x = v->as_uint32();
        if (x > 0) push_unique(out, Value::uint32(x - 1));
        if (x < std::numeric_limits<std::uint32_t>::max()) push_unique(out, Value::uint32(x + 1));
        break;
      }
      case NumericType::bool8: break;
    }
  }
  if (var.type == NumericType::bool8) {
    push_unique(out, Value::boolean(false));
    push_unique(out, Value::boolean(true));
    return out;
  }
  long double range = 2 * span;
  for (std::size_t i = 0; i < random_count; ++i) {
    double u = unit_interval(rng);
    switch (var.type) {
      case NumericType::real64:
        push_unique(out, Value::real(static_cast<double>((2 * u - 1) * range)));
        break;
      case NumericType::int32: {
        long double lim = std::min<long double>(range, std::numeric_limits<std::int32_t>::max());
        push_unique(out, Value::int32(static_cast<std::int32_t>(std::floor((2 * u - 1) * lim))));
        break;
      }
      case NumericType::uint32: {
        long double lim = std::min<long double>(range, std::numeric_limits<std::uint32_t>::max());
        push_unique(out, Value::uint32(static_cast<std::uint32_t>(std::floor(u * lim))));
        break;
      }
      case NumericType::bool8: break;
    }
  }
  return out;
}

bool holds(const Expr& guard, const Valuation& v) {
  try {
    Value g = evaluate(guard, v);
    return g.type() == NumericType::bool8 && g.as_bool();
  } catch (const EvalTrap&) {
    return false;
  }
}

}  // namespace

std::vector<Diagnostic> check_guard_exclusivity(const Diagram& d, std::size_t samples_per_var,
                                                std::uint64_t seed) {
  std::vector<Diagnostic> out;
  std::mt19937_64 rng(seed);
  Valuation base;
  for (const auto& v : d.variables) base.emplace(v.name, v.initial);

  for (const auto& node : d.nodes) {
    for (const auto& trig : trigger_set(d)) {
      auto idx = arc_indices_for(d, node, trig);
      if (idx.size() < 2) continue;

      std::vector<Value> literals;
      std::vector<std::string> names;
      for (auto i : idx) {
        collect_literals(*d.arcs[i].guard, literals);
        for (const auto& n : variables_read(*d.arcs[i].guard)) {
          if (d.find_variable(n) && std::find(names.begin(), names.end(), n) == names.end()) {
            names.push_back(n);
          }
        }
      }
      std::vector<std::vector<Value>> samples;
      for (const auto& n : names) {
        samples.push_back(sample_values(*d.find_variable(n), literals, samples_per_var, rng));
      }

      std::set<std::pair<std::size_t, std::size_t>> reported;
      auto probe = [&](const Valuation& v) {
        std::vector<std::size_t> sat;
        for (auto i : idx) {
          if (holds(*d.arcs[i].guard, v)) sat.push_back(i);
        }
        for (std::size_t a = 0; a < sat.size(); ++a) {
          for (std::size_t b = a + 1; b < sat.size(); ++b) {
            if (!reported.insert({sat[a], sat[b]}).second) continue;
            std::string witness;
            for (const auto& n : names) {
              if (!witness.empty()) witness += ", ";
              witness += n + "=" + format_value(v.at(n));
            }
            if (witness.empty()) witness = "any valuation";
            const auto& arc = d.arcs[sat[b]];
            out.push_back(make_warning(
                "guards [" + print_expr(*d.arcs[sat[a]].guard) + "] and [" +
                    print_expr(*arc.guard) + "] of '" + trig + "' arcs from node '" + node +
                    "' overlap; witness " + witness + "; the earlier arc (line " +
                    std::to_string(d.arcs[sat[a]].location.line) + ") takes precedence",
                arc.location));
          }
        }
      };

      std::size_t product = 1;
      for (const auto& s : samples) {
        product = std::min<std::size_t>(product * s.size(), std::size_t{1} << 40);
      }
      if (product <= 20000) {
        std::vector<std::size_t> odo(names.size(), 0);
        for (std::size_t k = 0; k < product; ++k) {
          Valuation v = base;
          for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = samples[i][odo[i]];
          probe(v);
          for (std::size_t i = names.size(); i-- > 0;) {
            if (++odo[i] < samples[i].size()) break;
            odo[i] = 0;
          }
        }
      } else {
        // One variable at a time around the initial valuation, then random
        // combinations of sample values.
        probe(base);
        for (std::size_t i = 0; i < names.size(); ++i) {
          for (const auto& s : samples[i]) {
            Valuation v = base;
            v[names[i]] = s;
            probe(v);
          }
        }
        std::size_t combos = std::max<std::size_t>(samples_per_var, 1) * names.size() * 64;
        for (std::size_t k = 0; k < combos; ++k) {
          Valuation v = base;
          for (std::size_t i = 0; i < names.size(); ++i) {
            v[names[i]] = samples[i][rng() % samples[i].size()];
          }
          probe(v);
        }
      }
    }
  }
  return out;
}

Parsed<Diagram> accept_diagram(const Diagram& parsed) {
  Parsed<Diagram> out;
  Diagram typed = infer_literal_types(parsed);
  out.diagnostics = type_check(typed);
  auto structure = check_structure(typed);
  out.diagnostics.insert(out.diagnostics.end(), structure.begin(), structure.end());
  if (!has_errors(out.diagnostics)) out.value = std::move(typed);
  return out;
}

Parsed<Diagram> load_model(std::string_view source) {
  auto parsed = parse_diagram(source);
  if (!parsed.ok()) return parsed;
  auto accepted = accept_diagram(*parsed.value);
  accepted.diagnostics.insert(accepted.diagnostics.begin(), parsed.diagnostics.begin(),
                              parsed.diagnostics.end());
  return accepted;
}

std::set<NodeTrigger> find_idle_pairs(const Diagram& d, const ExploreLimits& limits) {
  std::set<NodeTrigger> idle;
  Interpreter interp(d);
  const auto& triggers = interp.triggers();
  if (triggers.empty()) return idle;

  auto key = [&](const MachineState& s) {
    MachineState k = s;
    k.prev.clear();
    return format_state(d, k);
  };
  // Probes every trigger at `s`; returns false if some step trapped.
  auto visit = [&](const MachineState& s) {
    for (const auto& t : triggers) {
      try {
        if (interp.step_detailed(s, t).kind == StepCase::guard_unsatisfied) {
          idle.emplace(s.curr, t);
        }
      } catch (const TrapError&) {
      }
    }
  };

  std::unordered_set<std::string> seen;
  std::vector<std::pair<MachineState, std::size_t>> explored;
  std::deque<std::pair<MachineState, std::size_t>> frontier;
  auto start = interp.init();
  seen.insert(key(start));
  frontier.emplace_back(start, 0);
  while (!frontier.empty() && explored.size() < limits.max_states) {
    auto [s, depth] = frontier.front();
    frontier.pop_front();
    visit(s);
    explored.emplace_back(s, depth);
    if (depth >= limits.bfs_depth) continue;
    for (const auto& t : triggers) {
      try {
        auto next = interp.step(s, t);
        if (seen.insert(key(next)).second) frontier.emplace_back(std::move(next), depth + 1);
      } catch (const TrapError&) {
      }
    }
  }

  for (const auto& [s, depth] : explored) {
    if (depth > limits.saturate_from_depth) continue;
    for (const auto& t : triggers) {
      MachineState cur = s;
      for (std::size_t k = depth; k < limits.saturate_length; ++k) {
        try {
          auto r = interp.step_detailed(cur, t);
          if (r.kind != StepCase::fired) break;
          cur = std::move(r.state);
        } catch (const TrapError&) {
          break;
        }
        visit(cur);
      }
    }
  }
  return idle;
}

}  // namespace emuc
