#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace emuc {

/// Raised for requests that name a node, trigger or variable the diagram
/// does not declare.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NumericType { real64, int32, uint32, bool8 };

int width_bits(NumericType t);
bool is_signed(NumericType t);
std::string_view type_name(NumericType t);
std::optional<NumericType> parse_type_name(std::string_view name);

/// A typed scalar. The payload alternative always agrees with the type, so a
/// value can never hold something its type cannot represent.
class Value {
 public:
  Value() : payload_(0.0) {}

  static Value real(double v) { return Value(Payload(std::in_place_index<0>, v)); }
  static Value int32(std::int32_t v) { return Value(Payload(std::in_place_index<1>, v)); }
  static Value uint32(std::uint32_t v) { return Value(Payload(std::in_place_index<2>, v)); }
  static Value boolean(bool v) { return Value(Payload(std::in_place_index<3>, v)); }
  /// Zero of the given type.
  static Value zero(NumericType t);

  NumericType type() const { return static_cast<NumericType>(payload_.index()); }

  double as_real() const { return std::get<double>(payload_); }
  std::int32_t as_int32() const { return std::get<std::int32_t>(payload_); }
  std::uint32_t as_uint32() const { return std::get<std::uint32_t>(payload_); }
  bool as_bool() const { return std::get<bool>(payload_); }

  /// Numeric payload widened to long double (exact for every alternative).
  long double widened() const;

  /// Bitwise equality for reals (so -0.0 != 0.0 and NaN == NaN with the same
  /// bits); plain equality otherwise.
  friend bool operator==(const Value& a, const Value& b);

 private:
  // Alternative order mirrors NumericType.
  using Payload = std::variant<double, std::int32_t, std::uint32_t, bool>;
  explicit Value(Payload p) : payload_(p) {}
  Payload payload_;
};

/// Converts a literal value to another numeric type when it is exactly
/// representable there; nullopt otherwise.
std::optional<Value> convert_exact(const Value& v, NumericType to);

enum class UnaryOp { negate, logical_not };
enum class BinaryOp { add, sub, mul, div, lt, le, gt, ge, eq, ne, logical_and, logical_or };

std::string_view op_symbol(UnaryOp op);
std::string_view op_symbol(BinaryOp op);
bool is_arithmetic(BinaryOp op);
bool is_comparison(BinaryOp op);
bool is_logical(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct LiteralExpr {
  Value value;
  /// Integer literal written without a type; the analyzer may retype it to
  /// match its context.
  bool flexible = false;
};
struct VarExpr {
  std::string name;
};
struct UnaryExpr {
  UnaryOp op;
  ExprPtr operand;
};
struct BinaryExpr {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

/// Immutable expression tree shared by guards and assignment right-hand sides.
struct Expr {
  std::variant<LiteralExpr, VarExpr, UnaryExpr, BinaryExpr> node;

  static ExprPtr literal(Value v, bool flexible = false);
  static ExprPtr var(std::string name);
  static ExprPtr unary(UnaryOp op, ExprPtr operand);
  static ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
  static ExprPtr truth();

  bool is_true_literal() const;
};

/// Structural equality; the `flexible` marker on literals is ignored.
bool equal(const Expr& a, const Expr& b);
/// Names of variables read by `e`, in first-occurrence order.
std::vector<std::string> variables_read(const Expr& e);

struct Assignment {
  std::string target;
  ExprPtr rhs;
};

using Action = std::vector<Assignment>;

struct SourceLocation {
  int line = 0;
  int column = 0;
};

struct Arc {
  std::string source;
  std::string target;
  std::string trigger;
  ExprPtr guard = Expr::truth();
  Action action;
  SourceLocation location;
};

struct ContextVariable {
  std::string name;
  NumericType type = NumericType::real64;
  Value initial;
  SourceLocation location;
};

struct Diagram {
  std::string name;
  std::vector<std::string> nodes;
  std::string initial;
  std::vector<ContextVariable> variables;
  std::vector<Arc> arcs;

  bool has_node(std::string_view n) const;
  const ContextVariable* find_variable(std::string_view n) const;
};

bool structurally_equal(const Diagram& a, const Diagram& b);

/// Distinct triggers in first-appearance order over the arcs.
std::vector<std::string> trigger_set(const Diagram& d);

/// Arcs leaving `node` labelled `trigger`, in declaration order. Throws
/// DomainError when `node` is not declared.
std::vector<const Arc*> arcs_for(const Diagram& d, std::string_view node, std::string_view trigger);

/// Index-returning form of arcs_for.
std::vector<std::size_t> arc_indices_for(const Diagram& d, std::string_view node,
                                         std::string_view trigger);

/// ⟨curr, prev, valuation⟩. A plain value: stepping yields a new state.
struct MachineState {
  std::string curr;
  std::string prev;
  std::map<std::string, Value> valuation;

  friend bool operator==(const MachineState&, const MachineState&) = default;
};

bool is_c_identifier(std::string_view s);

}  // namespace emuc
