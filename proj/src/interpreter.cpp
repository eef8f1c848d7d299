#include "emuc/interpreter.hpp"

#include <algorithm>
#include <limits>

#include "emuc/parser.hpp"

namespace emuc {

TrapError::TrapError(std::size_t arc, std::string expression, const std::string& reason)
    : std::runtime_error("trap in arc " + std::to_string(arc) + " evaluating '" + expression +
                         "': " + reason),
      arc_(arc),
      expression_(std::move(expression)),
      reason_(reason) {}

namespace {

[[noreturn]] void trap(const std::string& why) { throw EvalTrap(why); }

template <typename Int>
Int checked_int(BinaryOp op, Int a, Int b) {
  Int r{};
  switch (op) {
    case BinaryOp::add:
      if (__builtin_add_overflow(a, b, &r)) trap("integer overflow in +");
      return r;
    case BinaryOp::sub:
      if (__builtin_sub_overflow(a, b, &r)) trap("integer overflow in -");
      return r;
    case BinaryOp::mul:
      if (__builtin_mul_overflow(a, b, &r)) trap("integer overflow in *");
      return r;
    case BinaryOp::div:
      if (b == 0) trap("division by zero");
      if constexpr (std::numeric_limits<Int>::is_signed) {
        if (a == std::numeric_limits<Int>::min() && b == -1) trap("integer overflow in /");
      }
      return a / b;
    default: break;
  }
  trap("not an arithmetic operator");
}

template <typename T>
bool compare(BinaryOp op, T a, T b) {
  switch (op) {
    case BinaryOp::lt: return a < b;
    case BinaryOp::le: return a <= b;
    case BinaryOp::gt: return a > b;
    case BinaryOp::ge: return a >= b;
    case BinaryOp::eq: return a == b;
    case BinaryOp::ne: return a != b;
    default: break;
  }
  trap("not a comparison operator");
}

Value eval_binary(const BinaryExpr& b, const Valuation& v) {
  if (is_logical(b.op)) {
    Value lhs = evaluate(*b.lhs, v);
    if (lhs.type() != NumericType::bool8) trap("logical operator on a non-boolean");
    if (b.op == BinaryOp::logical_and && !lhs.as_bool()) return lhs;
    if (b.op == BinaryOp::logical_or && lhs.as_bool()) return lhs;
    Value rhs = evaluate(*b.rhs, v);
    if (rhs.type() != NumericType::bool8) trap("logical operator on a non-boolean");
    return rhs;
  }
  Value lhs = evaluate(*b.lhs, v);
  Value rhs = evaluate(*b.rhs, v);
  if (lhs.type() != rhs.type()) trap("operands of different types");
  if (is_comparison(b.op)) {
    switch (lhs.type()) {
      case NumericType::real64: return Value::boolean(compare(b.op, lhs.as_real(), rhs.as_real()));
      case NumericType::int32: return Value::boolean(compare(b.op, lhs.as_int32(), rhs.as_int32()));
      case NumericType::uint32:
        return Value::boolean(compare(b.op, lhs.as_uint32(), rhs.as_uint32()));
      case NumericType::bool8:
        if (b.op != BinaryOp::eq && b.op != BinaryOp::ne) trap("ordering comparison on booleans");
        return Value::boolean(compare(b.op, lhs.as_bool(), rhs.as_bool()));
    }
  }
  switch (lhs.type()) {
    case NumericType::real64: {
      double x = lhs.as_real();
      double y = rhs.as_real();
      switch (b.op) {
        case BinaryOp::add: return Value::real(x + y);
        case BinaryOp::sub: return Value::real(x - y);
        case BinaryOp::mul: return Value::real(x * y);
        case BinaryOp::div:
          if (y == 0.0) trap("division by zero");
          return Value::real(x / y);
        default: break;
      }
      break;
    }
    case NumericType::int32: return Value::int32(checked_int(b.op, lhs.as_int32(), rhs.as_int32()));
    case NumericType::uint32:
      return Value::uint32(checked_int(b.op, lhs.as_uint32(), rhs.as_uint32()));
    case NumericType::bool8: trap("arithmetic on booleans");
  }
  trap("unsupported operator");
}

}  // namespace

Value evaluate(const Expr& e, const Valuation& v) {
  if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) return lit->value;
  if (const auto* var = std::get_if<VarExpr>(&e.node)) {
    auto it = v.find(var->name);
    if (it == v.end()) trap("undeclared variable '" + var->name + "'");
    return it->second;
  }
  if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
    Value x = evaluate(*u->operand, v);
    if (u->op == UnaryOp::logical_not) {
      if (x.type() != NumericType::bool8) trap("'!' on a non-boolean");
      return Value::boolean(!x.as_bool());
    }
    switch (x.type()) {
      case NumericType::real64: return Value::real(-x.as_real());
      case NumericType::int32:
        if (x.as_int32() == std::numeric_limits<std::int32_t>::min()) trap("integer overflow in -");
        return Value::int32(-x.as_int32());
      case NumericType::uint32: trap("negation of an unsigned value");
      case NumericType::bool8: trap("negation of a boolean");
    }
  }
  return eval_binary(std::get<BinaryExpr>(e.node), v);
}

std::string_view case_name(StepCase c) {
  switch (c) {
    case StepCase::not_permitted: return "not_permitted";
    case StepCase::guard_unsatisfied: return "guard_unsatisfied";
    case StepCase::fired: return "fired";
  }
  return "?";
}

void Coverage::record(const StepResult& r) {
  switch (r.kind) {
    case StepCase::not_permitted: ++not_permitted; break;
    case StepCase::guard_unsatisfied: ++guard_unsatisfied; break;
    case StepCase::fired: ++fired; break;
  }
  if (r.arc) {
    if (arc_fired.size() <= *r.arc) arc_fired.resize(*r.arc + 1, 0);
    ++arc_fired[*r.arc];
  }
}

void Coverage::merge(const Coverage& other) {
  not_permitted += other.not_permitted;
  guard_unsatisfied += other.guard_unsatisfied;
  fired += other.fired;
  if (arc_fired.size() < other.arc_fired.size()) arc_fired.resize(other.arc_fired.size(), 0);
  for (std::size_t i = 0; i < other.arc_fired.size(); ++i) arc_fired[i] += other.arc_fired[i];
}

std::size_t Coverage::count(StepCase c) const {
  switch (c) {
    case StepCase::not_permitted: return not_permitted;
    case StepCase::guard_unsatisfied: return guard_unsatisfied;
    case StepCase::fired: return fired;
  }
  return 0;
}

Interpreter::Interpreter(const Diagram& d) : d_(&d), triggers_(trigger_set(d)) {
  table_.assign(d.nodes.size(), std::vector<std::vector<std::size_t>>(triggers_.size()));
  for (std::size_t i = 0; i < d.arcs.size(); ++i) {
    const auto& a = d.arcs[i];
    table_[node_index(a.source)][trigger_index(a.trigger)].push_back(i);
  }
}

bool Interpreter::knows_trigger(std::string_view t) const {
  return std::find(triggers_.begin(), triggers_.end(), t) != triggers_.end();
}

std::size_t Interpreter::trigger_index(std::string_view t) const {
  auto it = std::find(triggers_.begin(), triggers_.end(), t);
  if (it == triggers_.end()) throw DomainError("unknown trigger '" + std::string(t) + "'");
  return static_cast<std::size_t>(it - triggers_.begin());
}

std::size_t Interpreter::node_index(std::string_view n) const {
  auto it = std::find(d_->nodes.begin(), d_->nodes.end(), n);
  if (it == d_->nodes.end()) throw DomainError("unknown node '" + std::string(n) + "'");
  return static_cast<std::size_t>(it - d_->nodes.begin());
}

const std::vector<std::size_t>& Interpreter::arcs_from(std::string_view node,
                                                       std::string_view t) const {
  return table_[node_index(node)][trigger_index(t)];
}

MachineState Interpreter::init() const {
  MachineState s{d_->initial, d_->initial, {}};
  for (const auto& v : d_->variables) s.valuation.emplace(v.name, v.initial);
  return s;
}

bool Interpreter::permitted(const MachineState& s, std::string_view t) const {
  return !arcs_from(s.curr, t).empty();
}

StepResult Interpreter::step_detailed(const MachineState& s, std::string_view t) const {
  const auto& candidates = arcs_from(s.curr, t);
  if (candidates.empty()) return {s, StepCase::not_permitted, std::nullopt};
  for (auto idx : candidates) {
    const Arc& arc = d_->arcs[idx];
    bool enabled = false;
    try {
      Value g = evaluate(*arc.guard, s.valuation);
      enabled = g.type() == NumericType::bool8 && g.as_bool();
    } catch (const EvalTrap& e) {
      throw TrapError(idx, print_expr(*arc.guard), e.what());
    }
    if (!enabled) continue;
    // Every right-hand side reads the pre-state valuation.
    std::vector<Value> rhs;
    rhs.reserve(arc.action.size());
    for (const auto& as : arc.action) {
      try {
        rhs.push_back(evaluate(*as.rhs, s.valuation));
      } catch (const EvalTrap& e) {
        throw TrapError(idx, print_expr(*as.rhs), e.what());
      }
    }
    MachineState next{arc.target, s.curr, s.valuation};
    for (std::size_t k = 0; k < arc.action.size(); ++k) {
      next.valuation.at(arc.action[k].target) = rhs[k];
    }
    return {std::move(next), StepCase::fired, idx};
  }
  return {s, StepCase::guard_unsatisfied, std::nullopt};
}

MachineState Interpreter::step(const MachineState& s, std::string_view t) const {
  return step_detailed(s, t).state;
}

MachineState init(const Diagram& d) { return Interpreter(d).init(); }

bool permitted(const Diagram& d, const MachineState& s, std::string_view t) {
  return Interpreter(d).permitted(s, t);
}

MachineState step(const Diagram& d, const MachineState& s, std::string_view t) {
  return Interpreter(d).step(s, t);
}

std::vector<MachineState> run(const Diagram& d, const std::vector<std::string>& events) {
  Interpreter interp(d);
  std::vector<MachineState> out{interp.init()};
  out.reserve(events.size() + 1);
  for (const auto& e : events) out.push_back(interp.step(out.back(), e));
  return out;
}

RunOutcome run_checked(const Interpreter& interp, const std::vector<std::string>& events) {
  RunOutcome out;
  out.states.reserve(events.size() + 1);
  out.states.push_back(interp.init());
  out.coverage.arc_fired.assign(interp.diagram().arcs.size(), 0);
  for (const auto& e : events) {
    try {
      auto r = interp.step_detailed(out.states.back(), e);
      out.coverage.record(r);
      out.states.push_back(std::move(r.state));
    } catch (const TrapError& err) {
      out.trap = err.what();
      break;
    }
  }
  return out;
}

}  // namespace emuc
