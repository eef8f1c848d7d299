#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "emuc/batch.hpp"
#include "emuc/codegen.hpp"
#include "emuc/difftest.hpp"
#include "emuc/interpreter.hpp"
#include "emuc/lint.hpp"
#include "listing.hpp"
#include "support.hpp"

using namespace emuc;

namespace {

struct Failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failed(what);
}

MachineState at_display(const Diagram& d, double v) {
  auto s = step(d, init(d), "click_on_off");
  s.valuation["display"] = Value::real(v);
  return s;
}

double display_after(const Diagram& d, double from, const std::string& t) {
  return step(d, at_display(d, from), t).valuation.at("display").as_real();
}

void golden_listings() {
  auto d = test::load_corpus("minimed");
  const std::string impl = emit_impl(d, default_config(d));
  const std::string golden = test::slurp(test::golden_dir() / "minimed_listing.c");
  expect(!golden.empty(), "golden listing missing");
  for (const char* fn : {"per_click_UP", "click_UP"}) {
    const std::string ours = test::extract_function(impl, fn);
    const std::string theirs = test::extract_function(golden, fn);
    expect(!ours.empty() && !theirs.empty(), std::string(fn) + " not found");
    expect(test::normalize_listing(ours) == test::normalize_listing(theirs), std::string(fn) + " differs from golden");
  }
}

void header_grammar() {
  const auto names = test::corpus_names();
  expect(names.size() >= 12, "corpus has fewer than 12 models");
  for (const auto& n : names) {
    auto d = test::load_corpus(n);
    auto ds = check_header_grammar(emit_header(d, default_config(d)));
    expect(ds.empty(), n + ": " + (ds.empty() ? "" : ds.front().message));
  }
}

void equivalence() {
  for (const char* name : {"minimed", "alaris"}) {
    auto d = test::load_corpus(name);
    auto rep = difftest_bundle(d, emit_bundle(d, default_config(d)), gen_sequences(d, 1000, 200, 42));
    std::ostringstream o;
    o << name << ": " << rep.sequences_run << " sequences, " << rep.divergences.size()
      << " divergences, not_permitted=" << rep.coverage.not_permitted
      << " guard_unsatisfied=" << rep.coverage.guard_unsatisfied << " fired=" << rep.coverage.fired;
    expect(rep.sequences_run == 1000 && rep.ok(), o.str());
    expect(rep.coverage.not_permitted >= 100 && rep.coverage.guard_unsatisfied >= 100 && rep.coverage.fired >= 100,
           o.str());
    std::cout << "  " << o.str() << "\n";
  }
}

void scenario_values() {
  auto alaris = test::load_corpus("alaris");
  auto minimed = test::load_corpus("minimed");
  const std::vector<std::pair<double, double>> up = {{9.1, 10.0}, {310, 410}, {315, 410}, {1010, 1100}, {1080, 1100}};
  std::vector<test::ProbeCall> calls;
  for (const auto& [from, to] : up) {
    expect(display_after(alaris, from, "click_alaris_UP") == to, "interpreter Alaris value");
    calls.push_back({from, "click_alaris_UP"});
  }
  expect(display_after(minimed, 5.0, "click_UP") == 5.0 + 0.1, "interpreter MiniMed below 10");
  expect(display_after(minimed, 0.0, "click_UP") == 0.0 + 0.1, "interpreter MiniMed at 0");
  expect(display_after(minimed, 10.0, "click_UP") == 10.0, "interpreter MiniMed at 10");

  auto got = test::probe_generated(alaris, "display", {"click_on_off"}, calls);
  for (std::size_t i = 0; i < up.size(); ++i) expect(got.at(i) == up[i].second, "generated Alaris value");
  auto m = test::probe_generated(minimed, "display", {"click_on_off"},
                                 {{5.0, "click_UP"}, {0.0, "click_UP"}, {10.0, "click_UP"}});
  expect(m == std::vector<double>{5.0 + 0.1, 0.0 + 0.1, 10.0}, "generated MiniMed values");
}

void semantics_properties() {
  test::DiagramGen gen(4242);
  std::size_t cases = 0;
  for (int i = 0; i < 2000; ++i) {
    Diagram d = gen.diagram();
    Interpreter interp(d);
    for (int k = 0; k < 4; ++k) {
      MachineState s = gen.random_state(d);
      for (const auto& t : interp.triggers()) {
        StepResult r;
        try {
          r = interp.step_detailed(s, t);
        } catch (const TrapError&) {
          continue;
        }
        ++cases;
        StepResult again = interp.step_detailed(s, t);
        expect(again.state == r.state, "step is not deterministic");
        if (!interp.permitted(s, t) || r.kind != StepCase::fired) {
          expect(r.state == s, "idle step changed the state");
          continue;
        }
        const Arc& a = d.arcs.at(*r.arc);
        std::set<std::string> written;
        for (const auto& as : a.action) {
          written.insert(as.target);
          expect(r.state.valuation.at(as.target) == evaluate(*as.rhs, s.valuation), "action did not read pre-state");
        }
        for (const auto& [name, value] : s.valuation) {
          if (written.count(name) == 0) expect(r.state.valuation.at(name) == value, "frame violated for " + name);
        }
      }
    }
    std::vector<EventSequence> seqs(8);
    for (auto& seq : seqs) {
      for (int n = 0; n < 20; ++n) seq.push_back(interp.triggers()[gen.below(interp.triggers().size())]);
    }
    auto p = run_batch(d, seqs);
    auto q = run_batch(d, seqs);
    for (std::size_t n = 0; n < seqs.size(); ++n) {
      expect(p.outcomes[n].states == q.outcomes[n].states && p.outcomes[n].trap == q.outcomes[n].trap,
             "run is not deterministic");
    }
  }
  expect(cases >= 10000, "fewer than 10^4 cases");

  auto swap = test::load_corpus("swap");
  auto s = step(swap, init(swap), "rotate");
  expect(s.valuation.at("x") == Value::int32(2) && s.valuation.at("y") == Value::int32(1), "swap test");
  std::cout << "  " << cases << " step cases\n";
}

void lint_closure() {
  for (const auto& n : test::corpus_names()) {
    auto d = test::load_corpus(n);
    auto b = emit_bundle(d, default_config(d));
    expect(!has_errors(check_rules(b.impl, b.header)), n + ": impl has lint errors");
    expect(!has_errors(check_rules(b.header)), n + ": header has lint errors");
    expect(!has_errors(check_rules(b.test_driver, b.header)), n + ": driver has lint errors");
  }
  auto d = test::load_corpus("minimed");
  auto b = emit_bundle(d, default_config(d));
  std::string with_goto = b.impl;
  with_goto.insert(with_goto.find("    return *st;\n}"), "    goto done;\n");
  auto g = check_rules(with_goto, b.header);
  expect(g.size() == 1 && g[0].message == "R1: goto is not allowed", "goto injection");
  auto x = check_rules(b.impl + "\ndouble stray;\n", b.header);
  expect(x.size() == 1 && x[0].message.rfind("R3: bare type 'double'", 0) == 0, "double injection");
}

void mutation_sensitivity() {
  auto d = test::load_corpus("counter");
  auto seqs = gen_sequences(d, 1000, 200, 42);
  for (Mutation m : {Mutation::swap_arc_order, Mutation::drop_leave, Mutation::off_by_one_literal}) {
    auto cfg = default_config(d);
    cfg.mutation = m;
    auto rep = difftest_bundle(d, emit_bundle(d, cfg), seqs);
    expect(!rep.ok(), "mutation " + std::to_string(static_cast<int>(m)) + " not caught");
    std::cout << "  mutation " << static_cast<int>(m) << ": " << rep.divergences.size() << " diverging sequences\n";
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double bound;  // seconds; 0 means unbounded
    std::function<void()> body;
  };
  const std::vector<Criterion> all = {
      {1, "golden listings", 1, golden_listings},
      {2, "header grammar conformance", 5, header_grammar},
      {3, "interpreter and generated C agree", 120, equivalence},
      {4, "scenario values", 1, scenario_values},
      {5, "semantics properties", 60, semantics_properties},
      {6, "lint closure", 5, lint_closure},
      {7, "mutation sensitivity", 0, mutation_sensitivity},
  };
  int failures = 0;
  for (const auto& c : all) {
    std::string why;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body();
    } catch (const std::exception& e) {
      why = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (why.empty() && c.bound > 0 && secs >= c.bound) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "took longer than %.0f s", c.bound);
      why = buf;
    }
    char line[160];
    std::snprintf(line, sizeof line, "criterion %d: %s (%s, %.3f s)", c.id, why.empty() ? "PASS" : "FAIL", c.name,
                  secs);
    std::cout << line;
    if (!why.empty()) std::cout << ": " << why;
    std::cout << std::endl;
    failures += why.empty() ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
