#include <string>

#include "doctest.h"
#include "emuc/analyzer.hpp"
#include "emuc/interpreter.hpp"
#include "emuc/parser.hpp"
#include "support.hpp"

using namespace emuc;

namespace {

std::string first_error(std::string_view src) {
  auto r = parse_diagram(src);
  for (const auto& d : r.diagnostics) {
    if (d.severity == Severity::error) return d.message;
  }
  return {};
}

}  // namespace

TEST_CASE("MiniMed parses") {
  auto r = parse_diagram(test::slurp(test::models_dir() / "minimed.emuc"));
  REQUIRE(r.ok());
  const Diagram& d = *r.value;
  CHECK(d.name == "minimed");
  CHECK(d.nodes == std::vector<std::string>{"off", "on"});
  CHECK(d.initial == "off");
  REQUIRE(d.variables.size() == 1);
  CHECK(d.variables[0].type == NumericType::real64);
  CHECK(d.variables[0].initial == Value::real(0.0));
  REQUIRE(d.arcs.size() == 6);
  CHECK(d.arcs[2].trigger == "click_UP");
  CHECK(print_expr(*d.arcs[2].guard) == "display < 10");
  CHECK(print_expr(*d.arcs[2].action[0].rhs) == "display + 0.1");
  CHECK(d.arcs[0].guard->is_true_literal());
  CHECK(d.arcs[2].location.line == 12);
}

TEST_CASE("syntax errors carry locations") {
  CHECK(first_error("").find("expected diagram header") != std::string::npos);
  CHECK(first_error("# only a comment\n").find("expected diagram header") != std::string::npos);
  CHECK(first_error("diagram d { nodes { a } initial b }").find("unknown initial node") != std::string::npos);
  CHECK(first_error("diagram d { nodes { a, a } initial a }").find("duplicate node") != std::string::npos);
  CHECK(first_error("diagram d { arcs { } nodes { a } initial a }").find("must precede") != std::string::npos);
  CHECK(first_error("diagram d { nodes { a } nodes { b } initial a }").find("duplicate section") != std::string::npos);
  CHECK(first_error("diagram d { nodes { a } initial a variables { x : float = 1; } }").find("unknown type") !=
        std::string::npos);
  CHECK(first_error("diagram d { nodes { a } initial a variables { x : int32 = 1.5; } }")
            .find("not representable") != std::string::npos);

  auto r = parse_diagram("diagram d {\n  nodes { a }\n  initial a\n  arcs { a -> a : t [x $ 1] }\n}");
  REQUIRE_FALSE(r.ok());
  REQUIRE_FALSE(r.diagnostics.empty());
  CHECK(r.diagnostics[0].begin.line == 4);
  CHECK(r.diagnostics[0].begin.column == 24);
}

TEST_CASE("node labels and state fields are not expression operands") {
  CHECK_FALSE(first_error("diagram d { nodes { a, b } initial a arcs { a -> b : t [a == 1] } }").empty());
  CHECK_FALSE(first_error("diagram d { nodes { a } initial a arcs { a -> a : t [curr_node == 1] } }").empty());
}

TEST_CASE("deep nesting is rejected rather than overflowing") {
  std::string guard(5000, '(');
  guard += "x";
  guard += std::string(5000, ')');
  auto r = parse_expr(guard);
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.diagnostics.empty());
}

TEST_CASE("operator precedence") {
  auto r = parse_expr("a || b && !c < 1 + 2 * -d");
  REQUIRE(r.ok());
  const auto& top = std::get<BinaryExpr>((*r.value)->node);
  CHECK(top.op == BinaryOp::logical_or);
  const auto& conj = std::get<BinaryExpr>(top.rhs->node);
  CHECK(conj.op == BinaryOp::logical_and);
  const auto& neg = std::get<UnaryExpr>(conj.rhs->node);
  CHECK(neg.op == UnaryOp::logical_not);
  const auto& cmp = std::get<BinaryExpr>(neg.operand->node);
  CHECK(cmp.op == BinaryOp::lt);
  const auto& sum = std::get<BinaryExpr>(cmp.rhs->node);
  CHECK(sum.op == BinaryOp::add);
  CHECK(std::get<BinaryExpr>(sum.rhs->node).op == BinaryOp::mul);

  CHECK(print_expr(**parse_expr("(a - b) - c").value) == "a - b - c");
  CHECK(print_expr(**parse_expr("a - (b - c)").value) == "a - (b - c)");
  CHECK(print_expr(**parse_expr("not (x > 1) and y").value) == "!(x > 1) && y");
  CHECK(print_expr(**parse_expr("x = 1 or y != 2").value) == "x == 1 || y != 2");
  CHECK_FALSE(parse_expr("x <> 2").ok());
}

TEST_CASE("literal spellings") {
  CHECK(std::get<LiteralExpr>((*parse_expr("7").value)->node).flexible);
  CHECK(std::get<LiteralExpr>((*parse_expr("7u").value)->node).value == Value::uint32(7));
  CHECK(std::get<LiteralExpr>((*parse_expr("7.0").value)->node).value == Value::real(7.0));
  CHECK(std::get<LiteralExpr>((*parse_expr("1e3").value)->node).value == Value::real(1000.0));
  CHECK(std::get<LiteralExpr>((*parse_expr("true").value)->node).value == Value::boolean(true));
  CHECK_FALSE(parse_expr("99999999999").ok());
}

// Oracle: printing then reparsing an accepted diagram gives back the same
// structure, and printing is a fixed point.
TEST_CASE("print/parse round trip over generated diagrams") {
  test::DiagramGen gen(11);
  gen.nonnegative_literals = true;
  for (int i = 0; i < 1000; ++i) {
    Diagram d = gen.diagram();
    const std::string text = print_diagram(d);
    CAPTURE(text);
    auto r = load_model(text);
    REQUIRE(r.ok());
    CHECK(structurally_equal(d, *r.value));
    CHECK(print_diagram(*r.value) == text);
  }
}

TEST_CASE("printed expressions evaluate like the originals") {
  test::DiagramGen gen(12);
  for (int i = 0; i < 300; ++i) {
    Diagram d = gen.diagram();
    auto r = load_model(print_diagram(d));
    REQUIRE(r.ok());
    for (int k = 0; k < 10; ++k) {
      auto s = gen.random_state(d);
      for (std::size_t a = 0; a < d.arcs.size(); ++a) {
        std::optional<Value> x;
        std::optional<Value> y;
        try {
          x = evaluate(*d.arcs[a].guard, s.valuation);
        } catch (const EvalTrap&) {
        }
        try {
          y = evaluate(*r.value->arcs[a].guard, s.valuation);
        } catch (const EvalTrap&) {
        }
        CHECK(x == y);
      }
    }
  }
}

TEST_CASE("json interchange round trip") {
  for (const auto& name : test::corpus_names()) {
    auto d = test::load_corpus(name);
    auto back = diagram_from_json(diagram_to_json(d));
    REQUIRE(back.ok());
    auto accepted = accept_diagram(*back.value);
    REQUIRE(accepted.ok());
    CHECK(structurally_equal(d, *accepted.value));
  }
  CHECK_FALSE(diagram_from_json(nlohmann::json{{"name", 3}}).ok());
}

// Hostile input: random bytes and mutations of real models never crash and
// always yield either a diagram or a located diagnostic.
TEST_CASE("parser fuzz") {
  std::mt19937_64 rng(99);
  const std::string base = test::slurp(test::models_dir() / "flags.emuc");
  const std::string alphabet = "abc{}[]();:,=<>!&|+-*/.#\n 0123456789_u\"'$\\";
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    if (i % 3 == 0) {
      std::size_t n = rng() % 200;
      for (std::size_t k = 0; k < n; ++k) s += alphabet[rng() % alphabet.size()];
    } else {
      s = base;
      std::size_t edits = 1 + rng() % 5;
      for (std::size_t k = 0; k < edits; ++k) {
        std::size_t at = rng() % s.size();
        switch (rng() % 3) {
          case 0: s.erase(at, 1 + rng() % 10); break;
          case 1: s.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
          default: s[at] = static_cast<char>(rng() % 256); break;
        }
        if (s.empty()) s = "x";
      }
    }
    auto r = parse_diagram(s);
    if (!r.ok()) {
      REQUIRE_FALSE(r.diagnostics.empty());
      for (const auto& d : r.diagnostics) {
        CHECK(d.begin.line >= 1);
        CHECK(d.begin.column >= 1);
      }
    }
    auto full = load_model(s);
    CHECK((full.ok() || has_errors(full.diagnostics)));
  }
}
