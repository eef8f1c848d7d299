#include "emuc/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace emuc {

int width_bits(NumericType t) {
  switch (t) {
    case NumericType::real64: return 64;
    case NumericType::int32: return 32;
    case NumericType::uint32: return 32;
    case NumericType::bool8: return 8;
  }
  return 0;
}

bool is_signed(NumericType t) {
  return t == NumericType::real64 || t == NumericType::int32;
}

std::string_view type_name(NumericType t) {
  switch (t) {
    case NumericType::real64: return "real64";
    case NumericType::int32: return "int32";
    case NumericType::uint32: return "uint32";
    case NumericType::bool8: return "bool8";
  }
  return "?";
}

std::optional<NumericType> parse_type_name(std::string_view name) {
  for (auto t : {NumericType::real64, NumericType::int32, NumericType::uint32, NumericType::bool8}) {
    if (type_name(t) == name) return t;
  }
  return std::nullopt;
}

Value Value::zero(NumericType t) {
  switch (t) {
    case NumericType::real64: return real(0.0);
    case NumericType::int32: return int32(0);
    case NumericType::uint32: return uint32(0);
    case NumericType::bool8: return boolean(false);
  }
  return real(0.0);
}

long double Value::widened() const {
  return std::visit([](auto v) { return static_cast<long double>(v); }, payload_);
}

bool operator==(const Value& a, const Value& b) {
  if (a.type() != b.type()) return false;
  if (a.type() == NumericType::real64) {
    return std::bit_cast<std::uint64_t>(a.as_real()) == std::bit_cast<std::uint64_t>(b.as_real());
  }
  return a.payload_ == b.payload_;
}

std::optional<Value> convert_exact(const Value& v, NumericType to) {
  if (v.type() == to) return v;
  if (to == NumericType::bool8 || v.type() == NumericType::bool8) return std::nullopt;
  long double x = v.widened();
  switch (to) {
    case NumericType::real64: {
      auto d = static_cast<double>(x);
      if (static_cast<long double>(d) != x) return std::nullopt;
      return Value::real(d);
    }
    case NumericType::int32:
      if (x != std::trunc(x) || x < std::numeric_limits<std::int32_t>::min() ||
          x > std::numeric_limits<std::int32_t>::max()) {
        return std::nullopt;
      }
      return Value::int32(static_cast<std::int32_t>(x));
    case NumericType::uint32:
      if (x != std::trunc(x) || x < 0 || x > std::numeric_limits<std::uint32_t>::max()) {
        return std::nullopt;
      }
      return Value::uint32(static_cast<std::uint32_t>(x));
    case NumericType::bool8: break;
  }
  return std::nullopt;
}

std::string_view op_symbol(UnaryOp op) {
  return op == UnaryOp::negate ? "-" : "!";
}

std::string_view op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::lt: return "<";
    case BinaryOp::le: return "<=";
    case BinaryOp::gt: return ">";
    case BinaryOp::ge: return ">=";
    case BinaryOp::eq: return "==";
    case BinaryOp::ne: return "!=";
    case BinaryOp::logical_and: return "&&";
    case BinaryOp::logical_or: return "||";
  }
  return "?";
}

bool is_arithmetic(BinaryOp op) {
  return op == BinaryOp::add || op == BinaryOp::sub || op == BinaryOp::mul || op == BinaryOp::div;
}

bool is_comparison(BinaryOp op) {
  return op == BinaryOp::lt || op == BinaryOp::le || op == BinaryOp::gt || op == BinaryOp::ge ||
         op == BinaryOp::eq || op == BinaryOp::ne;
}

bool is_logical(BinaryOp op) {
  return op == BinaryOp::logical_and || op == BinaryOp::logical_or;
}

ExprPtr Expr::literal(Value v, bool flexible) {
  return std::make_shared<const Expr>(Expr{LiteralExpr{v, flexible}});
}

ExprPtr Expr::var(std::string name) {
  return std::make_shared<const Expr>(Expr{VarExpr{std::move(name)}});
}

ExprPtr Expr::unary(UnaryOp op, ExprPtr operand) {
  return std::make_shared<const Expr>(Expr{UnaryExpr{op, std::move(operand)}});
}

ExprPtr Expr::binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(Expr{BinaryExpr{op, std::move(lhs), std::move(rhs)}});
}

ExprPtr Expr::truth() {
  static const ExprPtr t = literal(Value::boolean(true));
  return t;
}

bool Expr::is_true_literal() const {
  const auto* lit = std::get_if<LiteralExpr>(&node);
  return lit && lit->value.type() == NumericType::bool8 && lit->value.as_bool();
}

bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* la = std::get_if<LiteralExpr>(&a.node)) {
    return la->value == std::get<LiteralExpr>(b.node).value;
  }
  if (const auto* va = std::get_if<VarExpr>(&a.node)) {
    return va->name == std::get<VarExpr>(b.node).name;
  }
  if (const auto* ua = std::get_if<UnaryExpr>(&a.node)) {
    const auto& ub = std::get<UnaryExpr>(b.node);
    return ua->op == ub.op && equal(*ua->operand, *ub.operand);
  }
  const auto& ba = std::get<BinaryExpr>(a.node);
  const auto& bb = std::get<BinaryExpr>(b.node);
  return ba.op == bb.op && equal(*ba.lhs, *bb.lhs) && equal(*ba.rhs, *bb.rhs);
}

namespace {

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarExpr>) {
          if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
        } else if constexpr (std::is_same_v<T, UnaryExpr>) {
          collect_vars(*n.operand, out);
        } else if constexpr (std::is_same_v<T, BinaryExpr>) {
          collect_vars(*n.lhs, out);
          collect_vars(*n.rhs, out);
        }
      },
      e.node);
}

}  // namespace

std::vector<std::string> variables_read(const Expr& e) {
  std::vector<std::string> out;
  collect_vars(e, out);
  return out;
}

bool Diagram::has_node(std::string_view n) const {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

const ContextVariable* Diagram::find_variable(std::string_view n) const {
  for (const auto& v : variables) {
    if (v.name == n) return &v;
  }
  return nullptr;
}

bool structurally_equal(const Diagram& a, const Diagram& b) {
  if (a.name != b.name || a.nodes != b.nodes || a.initial != b.initial) return false;
  if (a.variables.size() != b.variables.size() || a.arcs.size() != b.arcs.size()) return false;
  for (std::size_t i = 0; i < a.variables.size(); ++i) {
    const auto& x = a.variables[i];
    const auto& y = b.variables[i];
    if (x.name != y.name || x.type != y.type || !(x.initial == y.initial)) return false;
  }
  for (std::size_t i = 0; i < a.arcs.size(); ++i) {
    const auto& x = a.arcs[i];
    const auto& y = b.arcs[i];
    if (x.source != y.source || x.target != y.target || x.trigger != y.trigger) return false;
    if (!equal(*x.guard, *y.guard) || x.action.size() != y.action.size()) return false;
    for (std::size_t k = 0; k < x.action.size(); ++k) {
      if (x.action[k].target != y.action[k].target || !equal(*x.action[k].rhs, *y.action[k].rhs)) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::string> trigger_set(const Diagram& d) {
  std::vector<std::string> out;
  for (const auto& a : d.arcs) {
    if (std::find(out.begin(), out.end(), a.trigger) == out.end()) out.push_back(a.trigger);
  }
  return out;
}

std::vector<std::size_t> arc_indices_for(const Diagram& d, std::string_view node,
                                         std::string_view trigger) {
  if (!d.has_node(node)) throw DomainError("unknown node '" + std::string(node) + "'");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d.arcs.size(); ++i) {
    if (d.arcs[i].source == node && d.arcs[i].trigger == trigger) out.push_back(i);
  }
  return out;
}

std::vector<const Arc*> arcs_for(const Diagram& d, std::string_view node, std::string_view trigger) {
  std::vector<const Arc*> out;
  for (auto i : arc_indices_for(d, node, trigger)) out.push_back(&d.arcs[i]);
  return out;
}

bool is_c_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(s.front())) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || (c >= '0' && c <= '9'); });
}

}  // namespace emuc
