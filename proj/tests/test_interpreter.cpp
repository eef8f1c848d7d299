#include <limits>
#include <optional>
#include <set>
#include <string>

#include "doctest.h"
#include "emuc/batch.hpp"
#include "emuc/interpreter.hpp"
#include "emuc/parser.hpp"
#include "support.hpp"

using namespace emuc;

namespace {

MachineState at_display(const Diagram& d, double v) {
  auto s = init(d);
  s = step(d, s, "click_on_off");
  s.valuation["display"] = Value::real(v);
  return s;
}

double display_after(const Diagram& d, double from, const std::string& t) {
  return step(d, at_display(d, from), t).valuation.at("display").as_real();
}

// Independent reference step: scan all arcs in declaration order.
// nullopt means some evaluation trapped.
std::optional<MachineState> oracle_step(const Diagram& d, const MachineState& s, const std::string& t) {
  try {
    for (const auto& a : d.arcs) {
      if (a.source != s.curr || a.trigger != t) continue;
      if (!evaluate(*a.guard, s.valuation).as_bool()) continue;
      MachineState n = s;
      for (const auto& as : a.action) n.valuation[as.target] = evaluate(*as.rhs, s.valuation);
      n.prev = s.curr;
      n.curr = a.target;
      return n;
    }
    return s;
  } catch (const EvalTrap&) {
    return std::nullopt;
  }
}

// Alaris rules written against integer decades rather than the arc table.
double floor10(double v) {
  int k = 0;
  while (10.0 * (k + 1) <= v) ++k;
  return 10.0 * k;
}
double ceil10(double v) {
  int k = 0;
  while (10.0 * k < v) ++k;
  return 10.0 * k;
}

double alaris_oracle(double v, const std::string& t) {
  if (t == "click_alaris_up") {
    if (v < 100) return v + 0.1;
    if (v < 1000) return v + 1;
    if (v <= 1190) return v + 10;
    if (v < 1200) return 1200.0;
    return v;
  }
  if (t == "click_alaris_dn") {
    if (v > 1000) return v - 10;
    if (v > 100) return v - 1;
    if (v >= 0.1) return v - 0.1;
    if (v > 0) return 0.0;
    return v;
  }
  if (t == "click_alaris_UP") {
    if (v < 0) return v;
    if (v < 100) return floor10(v) + 10;
    if (v < 1000) return floor10(v) + 100;
    if (v < 1100) return 1100.0;
    if (v < 1200) return 1200.0;
    return v;
  }
  if (t == "click_alaris_DN") {
    if (v <= 0) return v;
    if (v <= 100) return ceil10(v) - 10;
    if (v <= 200) return 100.0;
    if (v <= 1000) return ceil10(v) - 100;
    if (v <= 1100) return 1000.0;
    if (v <= 1200) return 1100.0;
    return v;
  }
  return v;
}

}  // namespace

TEST_CASE("Alaris double chevron values") {
  auto d = test::load_corpus("alaris");
  CHECK(display_after(d, 9.1, "click_alaris_UP") == 10.0);
  CHECK(display_after(d, 310, "click_alaris_UP") == 410.0);
  CHECK(display_after(d, 315, "click_alaris_UP") == 410.0);
  CHECK(display_after(d, 1010, "click_alaris_UP") == 1100.0);
  CHECK(display_after(d, 1080, "click_alaris_UP") == 1100.0);
}

TEST_CASE("MiniMed click_UP adds 0.1 below 10 and holds at 10") {
  auto d = test::load_corpus("minimed");
  CHECK(display_after(d, 5.0, "click_UP") == 5.0 + 0.1);
  CHECK(display_after(d, 0.0, "click_UP") == 0.1);
  CHECK(display_after(d, 9.95, "click_UP") == 9.95 + 0.1);
  CHECK(display_after(d, 10.0, "click_UP") == 10.0);
  CHECK(display_after(d, 10.0, "click_DN") == 10.0 - 0.1);
  auto s = step(d, at_display(d, 10.0), "click_UP");
  CHECK(s.curr == "on");
  CHECK(s.prev == "on");
}

TEST_CASE("Alaris matches the decade oracle on random walks") {
  auto d = test::load_corpus("alaris");
  Interpreter interp(d);
  test::DiagramGen gen(5);
  const auto& triggers = interp.triggers();
  std::size_t checked = 0;
  for (int walk = 0; walk < 200; ++walk) {
    auto s = interp.step(interp.init(), "click_on_off");
    for (int i = 0; i < 200; ++i) {
      const std::string& t = triggers[gen.below(triggers.size())];
      if (t == "click_on_off") continue;
      const double before = s.valuation.at("display").as_real();
      s = interp.step(s, t);
      const double after = s.valuation.at("display").as_real();
      CAPTURE(before);
      CAPTURE(t);
      REQUIRE(after == alaris_oracle(before, t));
      REQUIRE(after >= 0.0);
      REQUIRE(after <= 1200.0);
      ++checked;
    }
  }
  // Every decade boundary for the double chevrons.
  for (int k = 0; k <= 120; ++k) {
    for (double off : {0.0, 0.5, 9.9}) {
      const double v = 10.0 * k + off;
      if (v > 1200) continue;
      CAPTURE(v);
      CHECK(display_after(d, v, "click_alaris_UP") == alaris_oracle(v, "click_alaris_UP"));
      CHECK(display_after(d, v, "click_alaris_DN") == alaris_oracle(v, "click_alaris_DN"));
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("permission and unknown names") {
  auto d = test::load_corpus("minimed");
  Interpreter interp(d);
  auto q0 = interp.init();
  CHECK(q0.curr == "off");
  CHECK(q0.prev == "off");
  CHECK(q0.valuation.at("display") == Value::real(0.0));
  CHECK_FALSE(interp.permitted(q0, "click_UP"));
  CHECK(interp.permitted(q0, "click_on_off"));
  CHECK(interp.step_detailed(q0, "click_UP").kind == StepCase::not_permitted);
  CHECK_THROWS_AS(interp.permitted(q0, "click_sideways"), DomainError);
  CHECK_THROWS_AS(interp.step(q0, "click_sideways"), DomainError);
  MachineState bogus = q0;
  bogus.curr = "standby";
  CHECK_THROWS_AS(interp.step(bogus, "click_UP"), DomainError);
}

TEST_CASE("arithmetic traps") {
  Valuation v{{"i", Value::int32(std::numeric_limits<std::int32_t>::max())},
              {"m", Value::int32(std::numeric_limits<std::int32_t>::min())},
              {"u", Value::uint32(0)},
              {"r", Value::real(1.0)},
              {"z", Value::real(0.0)},
              {"zi", Value::int32(0)}};
  auto eval = [&](const char* text) {
    auto p = parse_expr(text);
    REQUIRE(p.ok());
    return evaluate(**p.value, v);
  };
  CHECK_THROWS_AS(eval("i + 1"), EvalTrap);
  CHECK_THROWS_AS(eval("m - 1"), EvalTrap);
  CHECK_THROWS_AS(eval("-m"), EvalTrap);
  CHECK_THROWS_AS(eval("m / -1"), EvalTrap);
  CHECK_THROWS_AS(eval("i * 2"), EvalTrap);
  CHECK_THROWS_AS(eval("i / zi"), EvalTrap);
  CHECK_THROWS_AS(eval("r / z"), EvalTrap);
  CHECK_THROWS_AS(eval("u - 1u"), EvalTrap);
  CHECK(eval("zi != 0 && i / zi > 1") == Value::boolean(false));
  CHECK(eval("zi == 0 || i / zi > 1") == Value::boolean(true));
  CHECK(eval("-7 / 2") == Value::int32(-3));
  CHECK(eval("r / 4.0") == Value::real(0.25));

  auto d = test::load_corpus("overflow");
  Interpreter interp(d);
  auto s = interp.init();
  for (int i = 0; i < 30; ++i) s = interp.step(s, "dbl");
  CHECK(s.valuation.at("acc") == Value::int32(1 << 30));
  try {
    interp.step(s, "dbl");
    FAIL("expected a trap");
  } catch (const TrapError& e) {
    CHECK(e.arc_index() == 0);
    CHECK(e.expression() == "acc * 2");
  }
  std::vector<std::string> events(40, "dbl");
  auto out = run_checked(interp, events);
  REQUIRE(out.trap.has_value());
  CHECK(out.states.size() == 31);
  CHECK_THROWS_AS(run(d, events), TrapError);
}

TEST_CASE("actions read the pre-state") {
  auto d = test::load_corpus("swap");
  auto s = step(d, init(d), "rotate");
  CHECK(s.valuation.at("x") == Value::int32(2));
  CHECK(s.valuation.at("y") == Value::int32(1));
  s = step(d, init(d), "shift");
  CHECK(s.valuation.at("x") == Value::int32(2));
  CHECK(s.valuation.at("y") == Value::int32(2));
  CHECK(s.valuation.at("z") == Value::real(1.0));
  s = step(d, init(d), "chain");
  CHECK(s.valuation.at("x") == Value::int32(2));
  CHECK(s.valuation.at("y") == Value::int32(3));
  CHECK(s.valuation.at("z") == Value::real(1.5));
}

TEST_CASE("first satisfied arc wins") {
  auto d = test::load_corpus("counter");
  auto s = step(d, init(d), "start");
  for (int i = 0; i < 5; ++i) s = step(d, s, "inc");
  CHECK(s.valuation.at("x") == Value::int32(5));
  s = step(d, s, "inc");
  CHECK(s.valuation.at("x") == Value::int32(7));
  CHECK(s.valuation.at("total") == Value::int32(7));
}

TEST_CASE("coverage counters") {
  auto d = test::load_corpus("minimed");
  Interpreter interp(d);
  auto out = run_checked(interp, {"click_UP", "click_on_off", "click_UP", "click_DN", "click_DN", "click_DN"});
  CHECK_FALSE(out.trap);
  CHECK(out.coverage.not_permitted == 1);
  CHECK(out.coverage.fired == 5);
  CHECK(out.coverage.guard_unsatisfied == 0);
  CHECK(out.coverage.arc_fired[0] == 1);
  CHECK(out.coverage.arc_fired[2] == 1);
  CHECK(out.coverage.arc_fired[4] == 1);
  CHECK(out.coverage.arc_fired[5] == 2);
  CHECK(case_name(StepCase::guard_unsatisfied) == "guard_unsatisfied");

  auto ne = test::load_corpus("nonexhaustive");
  Interpreter ni(ne);
  auto r = ni.step_detailed(ni.step(ni.init(), "power"), "cool");
  CHECK(r.kind == StepCase::fired);
  auto warm = ni.step(ni.init(), "power");
  for (int i = 0; i < 10; ++i) warm = ni.step(warm, "warm");
  auto idle = ni.step_detailed(warm, "warm");
  CHECK(idle.kind == StepCase::guard_unsatisfied);
  CHECK(idle.state == warm);
  CHECK_FALSE(idle.arc.has_value());
}

// Properties over generated diagrams and states: idle soundness, frame,
// pre-state evaluation and first match, all against oracle_step.
TEST_CASE("step properties over generated diagrams") {
  test::DiagramGen gen(2025);
  std::size_t cases = 0;
  std::size_t idles = 0;
  std::size_t fires = 0;
  for (int i = 0; i < 1500; ++i) {
    Diagram d = gen.diagram();
    Interpreter interp(d);
    for (int k = 0; k < 4; ++k) {
      MachineState s = gen.random_state(d);
      for (const auto& t : interp.triggers()) {
        ++cases;
        auto expected = oracle_step(d, s, t);
        if (!expected) {
          CHECK_THROWS_AS(interp.step_detailed(s, t), TrapError);
          continue;
        }
        auto r = interp.step_detailed(s, t);
        REQUIRE(r.state == *expected);
        if (!interp.permitted(s, t)) {
          REQUIRE(r.kind == StepCase::not_permitted);
          REQUIRE(r.state == s);
          ++idles;
          continue;
        }
        if (r.kind != StepCase::fired) {
          REQUIRE(r.state == s);
          ++idles;
          continue;
        }
        ++fires;
        REQUIRE(r.arc.has_value());
        const Arc& a = d.arcs[*r.arc];
        REQUIRE(r.state.curr == a.target);
        REQUIRE(r.state.prev == s.curr);
        std::set<std::string> written;
        for (const auto& as : a.action) {
          written.insert(as.target);
          REQUIRE(r.state.valuation.at(as.target) == evaluate(*as.rhs, s.valuation));
        }
        for (const auto& [name, value] : s.valuation) {
          if (written.count(name) == 0) REQUIRE(r.state.valuation.at(name) == value);
        }
        for (auto idx : interp.arcs_from(s.curr, t)) {
          if (idx == *r.arc) break;
          REQUIRE_FALSE(evaluate(*d.arcs[idx].guard, s.valuation).as_bool());
        }
      }
    }
  }
  CHECK(cases >= 10000);
  CHECK(idles > 0);
  CHECK(fires > 0);
}

TEST_CASE("run is deterministic and batch equals serial") {
  test::DiagramGen gen(77);
  std::size_t cases = 0;
  for (int i = 0; i < 200; ++i) {
    Diagram d = gen.diagram();
    Interpreter interp(d);
    std::vector<EventSequence> seqs(50);
    for (auto& seq : seqs) {
      const std::size_t len = gen.below(30);
      for (std::size_t k = 0; k < len; ++k) seq.push_back(interp.triggers()[gen.below(interp.triggers().size())]);
    }
    for (const auto& seq : seqs) {
      auto a = run_checked(interp, seq);
      auto b = run_checked(Interpreter(d), seq);
      REQUIRE(a.states == b.states);
      REQUIRE(a.trap == b.trap);
      ++cases;
    }
    auto par = run_batch(d, seqs);
    auto ser = run_batch_serial(d, seqs);
    REQUIRE(par.outcomes.size() == ser.outcomes.size());
    for (std::size_t k = 0; k < seqs.size(); ++k) {
      REQUIRE(par.outcomes[k].states == ser.outcomes[k].states);
      REQUIRE(par.outcomes[k].trap == ser.outcomes[k].trap);
    }
    CHECK(par.coverage.fired == ser.coverage.fired);
    CHECK(par.coverage.not_permitted == ser.coverage.not_permitted);
    CHECK(par.coverage.guard_unsatisfied == ser.coverage.guard_unsatisfied);
    CHECK(par.coverage.arc_fired == ser.coverage.arc_fired);
  }
  CHECK(cases >= 10000);
}

TEST_CASE("run returns one state per event plus the initial one") {
  auto d = test::load_corpus("traffic_light");
  auto states = run(d, {"tick", "tick", "tick", "tick", "fault", "repair"});
  REQUIRE(states.size() == 7);
  CHECK(states[4].curr == "green");
  CHECK(states[5].curr == "flashing");
  CHECK(states[5].prev == "green");
  CHECK(states[6].curr == "red");
  CHECK(run(d, {}).size() == 1);
}
