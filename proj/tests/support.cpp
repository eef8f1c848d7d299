#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "emuc/difftest.hpp"

namespace emuc::test {

Diagram load_corpus(const std::string& name) {
  auto r = load_model(slurp(models_dir() / (name + ".emuc")));
  if (!r.ok()) throw std::runtime_error("corpus model " + name + " rejected");
  return *r.value;
}

std::vector<std::string> corpus_names() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(models_dir())) {
    if (e.path().extension() == ".emuc") out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool have_cc() {
  try {
    find_compiler();
    return true;
  } catch (const EnvironmentError&) {
    return false;
  }
}

std::vector<double> probe_generated(const Diagram& d, const std::string& var,
                                    const std::vector<std::string>& prelude,
                                    const std::vector<ProbeCall>& calls) {
  auto bundle = emit_bundle(d, default_config(d));
  std::ostringstream c;
  c << "#include <stdio.h>\n#include \"" << bundle.base_name << ".h\"\n\nint main(void) {\n    state st;\n";
  char buf[64];
  for (const auto& call : calls) {
    c << "    init(&st);\n";
    for (const auto& t : prelude) c << "    if (per_" << t << "(&st)) { (void)" << t << "(&st); }\n";
    std::snprintf(buf, sizeof buf, "%.17g", call.from);
    c << "    st." << var << " = " << buf << (std::string(buf).find_first_of(".e") == std::string::npos ? ".0" : "")
      << ";\n";
    c << "    if (per_" << call.trigger << "(&st)) { (void)" << call.trigger << "(&st); }\n";
    c << "    printf(\"%.17g\\n\", st." << var << ");\n";
  }
  c << "    return 0;\n}\n";
  bundle.test_driver = c.str();
  TempDir dir;
  auto built = build(bundle, dir.path());
  auto out = run_driver(built.driver, {}, dir.path(), "probe");
  if (out.exit_status != 0) throw std::runtime_error("probe exited with status " + std::to_string(out.exit_status));
  std::vector<double> values;
  for (const auto& line : out.lines) values.push_back(std::strtod(line.c_str(), nullptr));
  return values;
}

std::uint64_t DiagramGen::below(std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = rng_();
  while (x >= limit) x = rng_();
  return x % n;
}

bool DiagramGen::chance(double p) { return static_cast<double>(below(1000000)) < p * 1000000.0; }

Value DiagramGen::value(NumericType t) {
  switch (t) {
    case NumericType::real64: {
      static const double picks[] = {0.0, 0.1, 0.5, 1.0, 2.5, 10.0, 100.0, -0.1, -3.0, 1e-5, 1e10, 0.3};
      if (chance(0.7)) {
        double v = picks[below(std::size(picks))];
        return Value::real(nonnegative_literals ? std::fabs(v) : v);
      }
      double v = static_cast<double>(below(20001)) / 100.0 - (nonnegative_literals ? 0.0 : 100.0);
      return Value::real(v);
    }
    case NumericType::int32: {
      if (chance(0.05)) {
        return Value::int32(nonnegative_literals || chance(0.5) ? std::numeric_limits<std::int32_t>::max()
                                                               : std::numeric_limits<std::int32_t>::min());
      }
      auto v = static_cast<std::int32_t>(below(41));
      return Value::int32(nonnegative_literals ? v : v - 20);
    }
    case NumericType::uint32:
      if (chance(0.05)) return Value::uint32(std::numeric_limits<std::uint32_t>::max() - static_cast<std::uint32_t>(below(3)));
      return Value::uint32(static_cast<std::uint32_t>(below(41)));
    case NumericType::bool8: return Value::boolean(chance(0.5));
  }
  return Value::zero(t);
}

namespace {

std::vector<std::string> vars_of(const Diagram& d, NumericType t) {
  std::vector<std::string> out;
  for (const auto& v : d.variables) {
    if (v.type == t) out.push_back(v.name);
  }
  return out;
}

const NumericType kAll[] = {NumericType::real64, NumericType::int32, NumericType::uint32, NumericType::bool8};

}  // namespace

ExprPtr DiagramGen::expr(const Diagram& d, NumericType t, int depth) {
  auto vars = vars_of(d, t);
  const bool leaf = depth <= 0 || chance(0.3);
  if (leaf) {
    if (!vars.empty() && chance(0.6)) return Expr::var(vars[below(vars.size())]);
    return Expr::literal(value(t));
  }
  if (t == NumericType::bool8) {
    switch (below(4)) {
      case 0: {
        NumericType nt = kAll[below(4)];
        static const BinaryOp ordered[] = {BinaryOp::lt, BinaryOp::le, BinaryOp::gt, BinaryOp::ge, BinaryOp::eq, BinaryOp::ne};
        BinaryOp op = nt == NumericType::bool8 ? (chance(0.5) ? BinaryOp::eq : BinaryOp::ne) : ordered[below(6)];
        return Expr::binary(op, expr(d, nt, depth - 1), expr(d, nt, depth - 1));
      }
      case 1: return Expr::unary(UnaryOp::logical_not, expr(d, t, depth - 1));
      case 2: return Expr::binary(BinaryOp::logical_and, expr(d, t, depth - 1), expr(d, t, depth - 1));
      default: return Expr::binary(BinaryOp::logical_or, expr(d, t, depth - 1), expr(d, t, depth - 1));
    }
  }
  if (t != NumericType::uint32 && chance(0.15)) return Expr::unary(UnaryOp::negate, expr(d, t, depth - 1));
  static const BinaryOp arith[] = {BinaryOp::add, BinaryOp::sub, BinaryOp::mul, BinaryOp::div};
  return Expr::binary(arith[below(4)], expr(d, t, depth - 1), expr(d, t, depth - 1));
}

Diagram DiagramGen::diagram() {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Diagram d;
    d.name = "gen";
    const std::size_t nodes = 1 + below(4);
    for (std::size_t i = 0; i < nodes; ++i) d.nodes.push_back("n" + std::to_string(i));
    d.initial = d.nodes[0];
    const std::size_t vars = below(5);
    for (std::size_t i = 0; i < vars; ++i) {
      NumericType t = kAll[below(4)];
      d.variables.push_back({"v" + std::to_string(i), t, value(t), {}});
    }
    const std::size_t triggers = 1 + below(3);
    auto trigger = [&] { return "t" + std::to_string(below(triggers)); };
    auto make_arc = [&](const std::string& src, const std::string& dst) {
      Arc a;
      a.source = src;
      a.target = dst;
      a.trigger = trigger();
      if (chance(0.7)) a.guard = expr(d, NumericType::bool8, 3);
      std::vector<std::size_t> order(d.variables.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[below(i)]);
      const std::size_t n = order.empty() ? 0 : below(order.size() + 1);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& v = d.variables[order[i]];
        a.action.push_back({v.name, expr(d, v.type, 3)});
      }
      return a;
    };
    for (std::size_t i = 1; i < nodes; ++i) {
      d.arcs.push_back(make_arc(d.nodes[below(i)], d.nodes[i]));
    }
    const std::size_t extra = 1 + below(6);
    for (std::size_t i = 0; i < extra; ++i) {
      d.arcs.push_back(make_arc(d.nodes[below(nodes)], d.nodes[below(nodes)]));
    }
    auto r = accept_diagram(d);
    if (r.ok()) return *r.value;
  }
  throw std::runtime_error("could not generate an accepted diagram");
}

MachineState DiagramGen::random_state(const Diagram& d) {
  MachineState s;
  s.curr = d.nodes[below(d.nodes.size())];
  s.prev = d.nodes[below(d.nodes.size())];
  for (const auto& v : d.variables) s.valuation[v.name] = value(v.type);
  return s;
}

}  // namespace emuc::test
