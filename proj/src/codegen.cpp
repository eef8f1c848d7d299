#include "emuc/codegen.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "emuc/parser.hpp"
#include "emuc/trace.hpp"

namespace emuc {
namespace {

const char* c_base_type(NumericType t) {
  switch (t) {
    case NumericType::bool8: return "unsigned char";
    case NumericType::int32: return "int";
    case NumericType::uint32: return "unsigned int";
    case NumericType::real64: return "double";
  }
  return "int";
}

std::string upper(std::string s) {
  for (auto& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

void literal_types(const Expr& e, std::set<NumericType>& out) {
  if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) {
    out.insert(lit->value.type());
  } else if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
    literal_types(*u->operand, out);
  } else if (const auto* b = std::get_if<BinaryExpr>(&e.node)) {
    literal_types(*b->lhs, out);
    literal_types(*b->rhs, out);
  }
}

class TypeNames {
 public:
  TypeNames(const Diagram& d, const CodegenConfig& cfg) {
    std::set<NumericType> needed{NumericType::bool8, NumericType::int32};
    for (const auto& v : d.variables) needed.insert(v.type);
    for (const auto& a : d.arcs) {
      literal_types(*a.guard, needed);
      for (const auto& as : a.action) literal_types(*as.rhs, needed);
    }
    for (auto t : needed) {
      auto it = cfg.word_size_map.find(t);
      if (it == cfg.word_size_map.end() || !is_c_identifier(it->second)) {
        throw ConfigError("word_size_map has no C typedef name for " + std::string(type_name(t)));
      }
      names_[t] = it->second;
    }
  }

  const std::string& operator[](NumericType t) const { return names_.at(t); }
  const std::map<NumericType, std::string>& all() const { return names_; }

 private:
  std::map<NumericType, std::string> names_;
};

// Static type of a well-typed expression.
NumericType type_of(const Expr& e, const Diagram& d) {
  if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) return lit->value.type();
  if (const auto* v = std::get_if<VarExpr>(&e.node)) {
    const auto* var = d.find_variable(v->name);
    if (var == nullptr) throw ConfigError("undeclared variable '" + v->name + "'");
    return var->type;
  }
  if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
    return u->op == UnaryOp::logical_not ? NumericType::bool8 : type_of(*u->operand, d);
  }
  const auto& b = std::get<BinaryExpr>(e.node);
  return is_arithmetic(b.op) ? type_of(*b.lhs, d) : NumericType::bool8;
}

// Checked helpers, in emission order. Each traps (assert) exactly where the
// interpreter raises an evaluation trap.
enum class Helper { add_i32, sub_i32, mul_i32, div_i32, neg_i32, add_u32, sub_u32, mul_u32, div_u32, div_d64 };

std::string helper_name(Helper h) {
  switch (h) {
    case Helper::add_i32: return "emuc_add_i32";
    case Helper::sub_i32: return "emuc_sub_i32";
    case Helper::mul_i32: return "emuc_mul_i32";
    case Helper::div_i32: return "emuc_div_i32";
    case Helper::neg_i32: return "emuc_neg_i32";
    case Helper::add_u32: return "emuc_add_u32";
    case Helper::sub_u32: return "emuc_sub_u32";
    case Helper::mul_u32: return "emuc_mul_u32";
    case Helper::div_u32: return "emuc_div_u32";
    case Helper::div_d64: return "emuc_div_d64";
  }
  return {};
}

std::optional<Helper> helper_for(BinaryOp op, NumericType t) {
  if (t == NumericType::real64) {
    if (op == BinaryOp::div) return Helper::div_d64;
    return std::nullopt;
  }
  bool u = t == NumericType::uint32;
  switch (op) {
    case BinaryOp::add: return u ? Helper::add_u32 : Helper::add_i32;
    case BinaryOp::sub: return u ? Helper::sub_u32 : Helper::sub_i32;
    case BinaryOp::mul: return u ? Helper::mul_u32 : Helper::mul_i32;
    case BinaryOp::div: return u ? Helper::div_u32 : Helper::div_i32;
    default: return std::nullopt;
  }
}

std::string helper_definition(Helper h, const TypeNames& tn) {
  const std::string i = tn[NumericType::int32];
  const std::string d = tn.all().count(NumericType::real64) ? tn[NumericType::real64] : "";
  const std::string u = tn.all().count(NumericType::uint32) ? tn[NumericType::uint32] : "";
  auto fn = [](const std::string& ret, const std::string& name, const std::string& params,
               const std::string& body) {
    return "static " + ret + " " + name + "(" + params + ") {\n" + body + "}\n\n";
  };
  const std::string ii = "const " + i + " a, const " + i + " b";
  const std::string uu = "const " + u + " a, const " + u + " b";
  switch (h) {
    case Helper::add_i32:
      return fn(i, helper_name(h), ii,
                "    assert(!(((b > 0) && (a > (2147483647 - b))) || ((b < 0) && (a < ((-2147483647 - 1) - b)))));\n"
                "    return a + b;\n");
    case Helper::sub_i32:
      return fn(i, helper_name(h), ii,
                "    assert(!(((b < 0) && (a > (2147483647 + b))) || ((b > 0) && (a < ((-2147483647 - 1) + b)))));\n"
                "    return a - b;\n");
    case Helper::mul_i32:
      return fn(i, helper_name(h), ii,
                "    assert(((a == 0) || (b == 0)) || ((a == -1) ? (b != (-2147483647 - 1)) : "
                    "((b == -1) ? (a != (-2147483647 - 1)) : (((a > 0) == (b > 0)) ? "
                    "((a > 0) ? (a <= (2147483647 / b)) : (a >= (2147483647 / b))) : "
                    "((a > 0) ? (b >= ((-2147483647 - 1) / a)) : (a >= ((-2147483647 - 1) / b)))))));\n"
                    "    return a * b;\n");
    case Helper::div_i32:
      return fn(i, helper_name(h), ii,
                "    assert(b != 0);\n"
                "    assert(!((a == (-2147483647 - 1)) && (b == -1)));\n"
                "    return a / b;\n");
    case Helper::neg_i32:
      return fn(i, helper_name(h), "const " + i + " a",
                "    assert(a != (-2147483647 - 1));\n"
                "    return -a;\n");
    case Helper::add_u32:
      return fn(u, helper_name(h), uu,
                "    assert(a <= (4294967295U - b));\n"
                "    return a + b;\n");
    case Helper::sub_u32:
      return fn(u, helper_name(h), uu,
                "    assert(b <= a);\n"
                "    return a - b;\n");
    case Helper::mul_u32:
      return fn(u, helper_name(h), uu,
                "    assert((a == 0U) || (b <= (4294967295U / a)));\n"
                "    return a * b;\n");
    case Helper::div_u32:
      return fn(u, helper_name(h), uu,
                "    assert(b != 0U);\n"
                "    return a / b;\n");
    case Helper::div_d64:
      return fn(d, helper_name(h), "const " + d + " a, const " + d + " b",
                "    assert(b != 0.0);\n"
                "    return a / b;\n");
  }
  return {};
}

// C precedence levels, loosest first.
constexpr int cOr = 1;
constexpr int cAnd = 2;
constexpr int cEq = 3;
constexpr int cRel = 4;
constexpr int cAdd = 5;
constexpr int cMul = 6;
constexpr int cUnary = 7;
constexpr int cAtom = 8;

int c_precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::logical_or: return cOr;
    case BinaryOp::logical_and: return cAnd;
    case BinaryOp::eq:
    case BinaryOp::ne: return cEq;
    case BinaryOp::lt:
    case BinaryOp::le:
    case BinaryOp::gt:
    case BinaryOp::ge: return cRel;
    case BinaryOp::add:
    case BinaryOp::sub: return cAdd;
    default: return cMul;
  }
}

bool may_trap(const Expr& e, const Diagram& d);

class CPrinter {
 public:
  CPrinter(const Diagram& d, std::set<Helper>* used) : d_(d), used_(used) {}

  std::string print(const Expr& e, int min_prec) const {
    int prec = cAtom;
    std::string s;
    if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) {
      s = render_literal(lit->value);
      if (s.front() == '-' || s.front() == '(') prec = cUnary;
    } else if (const auto* v = std::get_if<VarExpr>(&e.node)) {
      s = "st->" + v->name;
    } else if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
      if (u->op == UnaryOp::logical_not) {
        prec = cUnary;
        s = "!" + print(*u->operand, cUnary);
      } else if (type_of(*u->operand, d_) == NumericType::int32) {
        use(Helper::neg_i32);
        s = helper_name(Helper::neg_i32) + "(" + print(*u->operand, 0) + ")";
      } else {
        prec = cUnary;
        std::string inner = print(*u->operand, cUnary);
        s = inner.front() == '-' ? "-(" + inner + ")" : "-" + inner;
      }
    } else {
      const auto& b = std::get<BinaryExpr>(e.node);
      auto helper = is_arithmetic(b.op) ? helper_for(b.op, type_of(*b.lhs, d_)) : std::nullopt;
      if (helper) {
        use(*helper);
        s = helper_name(*helper) + "(" + print(*b.lhs, 0) + ", " + print(*b.rhs, 0) + ")";
      } else if (is_comparison(b.op) && equal(*b.lhs, *b.rhs) && type_of(*b.lhs, d_) != NumericType::real64 &&
                 !may_trap(*b.lhs, d_)) {
        // Self-comparison of an exact type is constant; -Wall rejects it spelled out.
        const bool reflexive = b.op == BinaryOp::eq || b.op == BinaryOp::le || b.op == BinaryOp::ge;
        s = reflexive ? "true" : "false";
      } else {
        prec = c_precedence(b.op);
        s = operand(b.op, *b.lhs, prec) + " " + std::string(op_symbol(b.op)) + " " +
            operand(b.op, *b.rhs, prec + 1);
      }
    }
    return prec < min_prec ? "(" + s + ")" : s;
  }

 private:
  // Also brackets `&&` under `||` and comparisons under comparisons, which
  // gcc's -Wparentheses asks for.
  std::string operand(BinaryOp parent, const Expr& child, int min_prec) const {
    const auto* cb = std::get_if<BinaryExpr>(&child.node);
    if (cb != nullptr && ((parent == BinaryOp::logical_or && cb->op == BinaryOp::logical_and) ||
                          (is_comparison(parent) && is_comparison(cb->op)))) {
      return "(" + print(child, 0) + ")";
    }
    return print(child, min_prec);
  }

  void use(Helper h) const {
    if (used_ != nullptr) used_->insert(h);
  }

  const Diagram& d_;
  std::set<Helper>* used_;
};

bool may_trap(const Expr& e, const Diagram& d) {
  if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
    if (u->op == UnaryOp::negate && type_of(*u->operand, d) == NumericType::int32) return true;
    return may_trap(*u->operand, d);
  }
  if (const auto* b = std::get_if<BinaryExpr>(&e.node)) {
    if (is_arithmetic(b->op) && helper_for(b->op, type_of(*b->lhs, d))) return true;
    return may_trap(*b->lhs, d) || may_trap(*b->rhs, d);
  }
  return false;
}

ExprPtr bump_first_literal(const ExprPtr& e, bool& done) {
  if (done) return e;
  if (const auto* lit = std::get_if<LiteralExpr>(&e->node)) {
    const Value& v = lit->value;
    switch (v.type()) {
      case NumericType::real64: done = true; return Expr::literal(Value::real(v.as_real() + 1.0));
      case NumericType::int32: done = true; return Expr::literal(Value::int32(v.as_int32() + 1));
      case NumericType::uint32: done = true; return Expr::literal(Value::uint32(v.as_uint32() + 1));
      case NumericType::bool8: return e;
    }
  }
  if (const auto* u = std::get_if<UnaryExpr>(&e->node)) {
    auto inner = bump_first_literal(u->operand, done);
    return Expr::unary(u->op, inner);
  }
  if (const auto* b = std::get_if<BinaryExpr>(&e->node)) {
    auto l = bump_first_literal(b->lhs, done);
    auto r = bump_first_literal(b->rhs, done);
    return Expr::binary(b->op, l, r);
  }
  return e;
}

Diagram apply_mutation(const Diagram& d, Mutation m) {
  Diagram out = d;
  if (m == Mutation::swap_arc_order) {
    for (std::size_t i = 0; i < out.arcs.size(); ++i) {
      for (std::size_t j = i + 1; j < out.arcs.size(); ++j) {
        if (out.arcs[i].source == out.arcs[j].source && out.arcs[i].trigger == out.arcs[j].trigger) {
          std::swap(out.arcs[i], out.arcs[j]);
          return out;
        }
      }
    }
  } else if (m == Mutation::off_by_one_literal) {
    bool done = false;
    for (auto& a : out.arcs) {
      a.guard = bump_first_literal(a.guard, done);
      if (done) break;
    }
  }
  return out;
}

std::vector<std::string> sources_for(const Diagram& d, const std::string& trigger) {
  std::vector<std::string> out;
  for (const auto& a : d.arcs) {
    if (a.trigger == trigger && std::find(out.begin(), out.end(), a.source) == out.end()) {
      out.push_back(a.source);
    }
  }
  return out;
}

std::string banner(const std::string& file, const Diagram& d, const std::string& what) {
  return "/* " + file + ": " + what + " for Emucharts model '" + d.name +
         "'.\n * Generated by emuc; do not edit. */\n\n";
}

struct ImplParts {
  std::string helpers;
  std::string body;
};

ImplParts impl_parts(const Diagram& src, const CodegenConfig& cfg, const TypeNames& tn) {
  const Diagram d = apply_mutation(src, cfg.mutation);
  std::set<Helper> used;
  CPrinter cp(d, &used);
  std::set<NodeTrigger> idle;
  if (cfg.emit_asserts) idle = find_idle_pairs(d, cfg.explore);
  const std::string& b8 = tn[NumericType::bool8];
  std::ostringstream o;

  o << "void enter(const node_label l, state* st) {\n"
    << "    st->curr_node = l;\n"
    << "}\n\n"
    << "void leave(const node_label l, state* st) {\n"
    << "    st->prev_node = l;\n"
    << "}\n\n"
    << "void init(state* st) {\n";
  for (const auto& v : d.variables) {
    o << "    st->" << v.name << " = " << render_literal(v.initial) << ";\n";
  }
  o << "    leave(" << d.initial << ", st);\n"
    << "    enter(" << d.initial << ", st);\n"
    << "}\n\n";

  auto triggers = trigger_set(d);
  for (const auto& t : triggers) {
    o << b8 << " per_" << t << "(const state* st) {\n";
    for (const auto& n : sources_for(d, t)) {
      o << "    if (st->curr_node == " << n << ") {\n"
        << "        return true;\n"
        << "    }\n";
    }
    o << "    return false;\n"
      << "}\n\n";
  }

  for (const auto& t : triggers) {
    auto sources = sources_for(d, t);
    o << "state " << t << "(state* st) {\n";
    if (cfg.emit_asserts) {
      o << "    assert(";
      for (std::size_t i = 0; i < sources.size(); ++i) {
        o << (i ? " || " : "") << "st->curr_node == " << sources[i];
      }
      o << ");\n";
      for (const auto& n : sources) {
        ExprPtr any;
        bool trivially_true = false;
        for (const auto& a : d.arcs) {
          if (a.source != n || a.trigger != t) continue;
          trivially_true = trivially_true || a.guard->is_true_literal();
          any = any ? Expr::binary(BinaryOp::logical_or, any, a.guard) : a.guard;
        }
        if (trivially_true) continue;
        if (idle.count({n, t}) != 0) {
          o << "    /* guards of '" << t << "' at node " << n
            << " are not exhaustive over reachable states: idle is possible */\n";
        } else if (sources.size() == 1) {
          o << "    assert(" << cp.print(*any, 0) << ");\n";
        } else {
          const auto* top = std::get_if<BinaryExpr>(&any->node);
          const bool conj = top != nullptr && top->op == BinaryOp::logical_and;
          o << "    assert(st->curr_node != " << n << " || " << cp.print(*any, conj ? cAnd + 1 : cAnd) << ");\n";
        }
      }
    }
    for (const auto& a : d.arcs) {
      if (a.trigger != t) continue;
      std::string node_test = "st->curr_node == " + a.source;
      if (may_trap(*a.guard, d)) {
        o << "    if (" << node_test << " && " << cp.print(*a.guard, cAnd + 1) << ") {\n";
      } else {
        o << "    if (" << cp.print(*a.guard, cAnd) << " && " << node_test << ") {\n";
      }
      if (cfg.mutation != Mutation::drop_leave) o << "        leave(" << a.source << ", st);\n";

      // Right-hand sides read the pre-state; go through temporaries when an
      // earlier assignment would be visible to a later right-hand side.
      bool needs_temps = false;
      for (std::size_t k = 0; k < a.action.size() && !needs_temps; ++k) {
        auto reads = variables_read(*a.action[k].rhs);
        for (std::size_t j = 0; j < k; ++j) {
          if (std::find(reads.begin(), reads.end(), a.action[j].target) != reads.end()) {
            needs_temps = true;
          }
        }
      }
      if (needs_temps) {
        o << "        {\n";
        for (std::size_t k = 0; k < a.action.size(); ++k) {
          const auto* var = d.find_variable(a.action[k].target);
          o << "            const " << tn[var->type] << " emuc_t" << k << " = "
            << cp.print(*a.action[k].rhs, 0) << ";\n";
        }
        for (std::size_t k = 0; k < a.action.size(); ++k) {
          o << "            st->" << a.action[k].target << " = emuc_t" << k << ";\n";
        }
        o << "        }\n";
      } else {
        for (const auto& as : a.action) {
          o << "        st->" << as.target << " = " << cp.print(*as.rhs, 0) << ";\n";
        }
      }
      o << "        enter(" << a.target << ", st);\n";
      if (cfg.emit_asserts) o << "        assert(st->curr_node == " << a.target << ");\n";
      o << "        return *st;\n"
        << "    }\n";
    }
    o << "    return *st;\n"
      << "}\n\n";
  }

  ImplParts parts;
  for (auto h : used) parts.helpers += helper_definition(h, tn);
  parts.body = o.str();
  return parts;
}

std::string escape_md(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else out += c;
  }
  return out;
}

}  // namespace

CodegenConfig default_config(const Diagram& d) {
  CodegenConfig cfg;
  cfg.base_name = d.name;
  return cfg;
}

std::string render_literal(const Value& v) {
  switch (v.type()) {
    case NumericType::real64: return format_real(v.as_real());
    case NumericType::int32:
      if (v.as_int32() == std::numeric_limits<std::int32_t>::min()) return "(-2147483647 - 1)";
      return std::to_string(v.as_int32());
    case NumericType::uint32: return std::to_string(v.as_uint32()) + "U";
    case NumericType::bool8: return v.as_bool() ? "true" : "false";
  }
  return {};
}

std::string c_expression(const Diagram& d, const Expr& e) { return CPrinter(d, nullptr).print(e, 0); }

std::string emit_header(const Diagram& d, const CodegenConfig& cfg) {
  TypeNames tn(d, cfg);
  const std::string guard = upper(cfg.base_name) + "_H";
  std::ostringstream o;
  o << banner(cfg.base_name + ".h", d, "interface");
  o << "#ifndef " << guard << "\n"
    << "#define " << guard << "\n\n"
    << "#include <assert.h>\n\n"
    << "#define true 1U\n"
    << "#define false 0U\n\n";
  for (const auto& [t, name] : tn.all()) {
    o << "typedef " << c_base_type(t) << " " << name << ";\n";
  }
  o << "\ntypedef enum { ";
  for (std::size_t i = 0; i < d.nodes.size(); ++i) o << (i ? ", " : "") << d.nodes[i];
  o << " } node_label;\n\n"
    << "typedef struct {\n";
  for (const auto& v : d.variables) o << "    " << tn[v.type] << " " << v.name << ";\n";
  o << "    node_label curr_node;\n"
    << "    node_label prev_node;\n"
    << "} state;\n\n"
    << "void enter(const node_label l, state* st);\n"
    << "void leave(const node_label l, state* st);\n\n"
    << "void init(state* st);\n\n";
  auto triggers = trigger_set(d);
  for (const auto& t : triggers) o << tn[NumericType::bool8] << " per_" << t << "(const state* st);\n";
  if (!triggers.empty()) o << "\n";
  for (const auto& t : triggers) o << "state " << t << "(state* st);\n";
  if (!triggers.empty()) o << "\n";
  o << "#endif\n";
  return o.str();
}

std::string emit_impl(const Diagram& d, const CodegenConfig& cfg) {
  TypeNames tn(d, cfg);
  auto parts = impl_parts(d, cfg, tn);
  std::ostringstream o;
  o << banner(cfg.base_name + ".c", d, "implementation");
  o << "#include \"" << cfg.base_name << ".h\"\n\n";
  o << parts.helpers << parts.body;
  return o.str();
}

std::string emit_makefile(const Diagram& d, const CodegenConfig& cfg) {
  (void)d;
  const std::string& b = cfg.base_name;
  std::ostringstream o;
  o << "# Makefile for the '" << b << "' module and its test driver. Generated by emuc.\n\n"
    << "CC ?= cc\n"
    << "CFLAGS ?= " << kStrictCFlags << "\n"
    << "OBJS = " << b << ".o " << b << "_driver.o\n\n"
    << "all: " << b << "_driver\n\n"
    << b << "_driver: $(OBJS)\n"
    << "\t$(CC) $(CFLAGS) -o $@ $(OBJS)\n\n"
    << b << ".o: " << b << ".c " << b << ".h\n"
    << "\t$(CC) $(CFLAGS) -c " << b << ".c\n\n"
    << b << "_driver.o: " << b << "_driver.c " << b << ".h\n"
    << "\t$(CC) $(CFLAGS) -c " << b << "_driver.c\n\n"
    << "clean:\n"
    << "\trm -f $(OBJS) " << b << "_driver\n\n"
    << ".PHONY: all clean\n";
  return o.str();
}

std::string emit_test_driver(const Diagram& d, const CodegenConfig& cfg) {
  TypeNames tn(d, cfg);
  const std::string& b8 = tn[NumericType::bool8];
  const std::string& i32 = tn[NumericType::int32];
  bool has_real = std::any_of(d.variables.begin(), d.variables.end(),
                              [](const ContextVariable& v) { return v.type == NumericType::real64; });
  std::ostringstream o;
  o << banner(cfg.base_name + "_driver.c", d, "test driver");
  o << "/* Reads one trigger name per line from standard input. For each, calls\n"
    << " * the permission function and, if it allows, the transition function;\n"
    << " * then prints the state as curr;prev;var=value;... The initial state is\n"
    << " * printed first. Blank lines are ignored; an unknown trigger ends the run\n"
    << " * with exit status 2. */\n\n"
    << "#include <stdio.h>\n"
    << "#include <stdlib.h>\n"
    << "#include <string.h>\n\n"
    << "#include \"" << cfg.base_name << ".h\"\n\n"
    << "typedef char CH_8;\n\n";

  o << "static const CH_8* node_name(const node_label n) {\n"
    << "    const CH_8* name = \"?\";\n";
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    o << "    " << (i ? "} else if" : "if") << " (n == " << d.nodes[i] << ") {\n"
      << "        name = \"" << d.nodes[i] << "\";\n";
  }
  o << "    }\n"
    << "    return name;\n"
    << "}\n\n";

  if (has_real) {
    const std::string& d64 = tn[NumericType::real64];
    o << "/* Shortest fixed notation that reads back exactly; exponent notation\n"
      << " * outside [1e-4, 1e15). Always shows a '.' or an exponent. */\n"
      << "static void print_real(const " << d64 << " v) {\n"
      << "    CH_8 buf[64];\n"
      << "    " << b8 << " found = false;\n"
      << "    " << i32 << " n;\n"
      << "    const " << d64 << " mag = (v < 0.0) ? -v : v;\n"
      << "    if (v != v) {\n"
      << "        (void)fputs(\"nan\", stdout);\n"
      << "    } else if (mag > 1.7976931348623157e308) {\n"
      << "        (void)fputs((v < 0.0) ? \"-inf\" : \"inf\", stdout);\n"
      << "    } else {\n"
      << "        if ((mag == 0.0) || ((mag >= 1e-4) && (mag < 1e15))) {\n"
      << "            for (n = 0; (n <= 24) && (found == false); n++) {\n"
      << "                (void)snprintf(buf, sizeof buf, \"%.*f\", n, v);\n"
      << "                found = (strtod(buf, NULL) == v) ? true : false;\n"
      << "            }\n"
      << "        }\n"
      << "        for (n = 1; (n <= 17) && (found == false); n++) {\n"
      << "            (void)snprintf(buf, sizeof buf, \"%.*e\", n - 1, v);\n"
      << "            found = (strtod(buf, NULL) == v) ? true : false;\n"
      << "        }\n"
      << "        (void)fputs(buf, stdout);\n"
      << "        if ((strchr(buf, '.') == NULL) && (strchr(buf, 'e') == NULL)) {\n"
      << "            (void)fputs(\".0\", stdout);\n"
      << "        }\n"
      << "    }\n"
      << "}\n\n";
  }

  o << "static void print_state(const state* st) {\n"
    << "    (void)fputs(node_name(st->curr_node), stdout);\n"
    << "    (void)fputs(\";\", stdout);\n"
    << "    (void)fputs(node_name(st->prev_node), stdout);\n";
  for (const auto& v : d.variables) {
    o << "    (void)fputs(\";" << v.name << "=\", stdout);\n";
    switch (v.type) {
      case NumericType::real64: o << "    print_real(st->" << v.name << ");\n"; break;
      case NumericType::int32: o << "    (void)printf(\"%d\", st->" << v.name << ");\n"; break;
      case NumericType::uint32: o << "    (void)printf(\"%u\", st->" << v.name << ");\n"; break;
      case NumericType::bool8:
        o << "    (void)fputs((st->" << v.name << " != false) ? \"1\" : \"0\", stdout);\n";
        break;
    }
  }
  o << "    (void)fputs(\"\\n\", stdout);\n"
    << "    (void)fflush(stdout);\n"
    << "}\n\n";

  o << "int main(void) {\n"
    << "    state st;\n"
    << "    CH_8 line[256];\n"
    << "    " << i32 << " status = 0;\n"
    << "    init(&st);\n"
    << "    print_state(&st);\n"
    << "    while ((status == 0) && (fgets(line, 256, stdin) != NULL)) {\n"
    << "        size_t len = strlen(line);\n"
    << "        while ((len > 0U) && ((line[len - 1U] == '\\n') || (line[len - 1U] == '\\r'))) {\n"
    << "            len--;\n"
    << "            line[len] = '\\0';\n"
    << "        }\n"
    << "        if (len == 0U) {\n"
    << "            /* blank line */\n";
  for (const auto& t : trigger_set(d)) {
    o << "        } else if (strcmp(line, \"" << t << "\") == 0) {\n"
      << "            if (per_" << t << "(&st) == true) {\n"
      << "                (void)" << t << "(&st);\n"
      << "            }\n"
      << "            print_state(&st);\n";
  }
  o << "        } else {\n"
    << "            (void)fprintf(stderr, \"unknown trigger '%s'\\n\", line);\n"
    << "            status = 2;\n"
    << "        }\n"
    << "    }\n"
    << "    return status;\n"
    << "}\n";
  return o.str();
}

std::string emit_docs(const Diagram& d, const CodegenConfig& cfg) {
  TypeNames tn(d, cfg);
  std::ostringstream o;
  o << "# " << cfg.base_name << ": generated state machine module\n\n"
    << "Generated by emuc from the Emucharts model `" << d.name << "`.\n\n"
    << "Calling protocol: call `init` once; on each event call the permission\n"
    << "function `per_<trigger>` and, only if it returns `true`, the transition\n"
    << "function `<trigger>`. A `state` object must not be used from more than\n"
    << "one thread at a time.\n\n";
  o << "## Nodes (" << d.nodes.size() << ")\n\n";
  for (const auto& n : d.nodes) o << "- `" << n << "`" << (n == d.initial ? " (initial)" : "") << "\n";
  o << "\n## Context variables (" << d.variables.size() << ")\n\n";
  if (d.variables.empty()) {
    o << "none\n";
  } else {
    o << "| name | type | C type | initial |\n|---|---|---|---|\n";
    for (const auto& v : d.variables) {
      o << "| `" << v.name << "` | " << type_name(v.type) << " | `" << tn[v.type] << "` | `"
        << render_literal(v.initial) << "` |\n";
    }
  }
  auto triggers = trigger_set(d);
  o << "\n## Triggers (" << triggers.size() << ")\n\n";
  if (triggers.empty()) o << "no triggers\n";
  for (const auto& t : triggers) {
    auto sources = sources_for(d, t);
    o << "### " << t << "\n\nPermitted in: ";
    for (std::size_t i = 0; i < sources.size(); ++i) o << (i ? ", " : "") << "`" << sources[i] << "`";
    o << "\n\nArcs are tried in this order; the first whose guard holds fires.\n\n"
      << "| # | source | target | guard | action |\n|---|---|---|---|---|\n";
    std::size_t k = 0;
    for (const auto& a : d.arcs) {
      if (a.trigger != t) continue;
      std::string action;
      for (const auto& as : a.action) {
        action += (action.empty() ? "" : "; ") + as.target + " := " + print_expr(*as.rhs);
      }
      o << "| " << ++k << " | `" << a.source << "` | `" << a.target << "` | `"
        << escape_md(print_expr(*a.guard)) << "` | " << (action.empty() ? "-" : "`" + escape_md(action) + "`")
        << " |\n";
    }
    o << "\n";
  }
  return o.str();
}

GeneratedBundle emit_bundle(const Diagram& d, const CodegenConfig& cfg) {
  if (!is_c_identifier(cfg.base_name)) {
    throw ConfigError("base name '" + cfg.base_name + "' is not a C identifier");
  }
  GeneratedBundle b;
  b.base_name = cfg.base_name;
  b.header = emit_header(d, cfg);
  b.impl = emit_impl(d, cfg);
  b.makefile = emit_makefile(d, cfg);
  b.test_driver = emit_test_driver(d, cfg);
  b.doc = emit_docs(d, cfg);
  return b;
}

void write_bundle(const GeneratedBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << text;
  };
  put(b.base_name + ".h", b.header);
  put(b.base_name + ".c", b.impl);
  put("Makefile", b.makefile);
  put(b.base_name + "_driver.c", b.test_driver);
  put(b.base_name + ".md", b.doc);
}

}  // namespace emuc
