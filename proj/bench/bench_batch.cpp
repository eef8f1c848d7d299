#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "emuc/analyzer.hpp"
#include "emuc/batch.hpp"
#include "emuc/difftest.hpp"

using namespace emuc;

namespace {

Diagram load(const std::string& name) {
  std::ifstream f(std::string(EMUC_MODELS_DIR) + "/" + name + ".emuc");
  std::ostringstream s;
  s << f.rdbuf();
  auto r = load_model(s.str());
  if (!r.ok()) throw std::runtime_error("cannot load " + name);
  return std::move(*r.value);
}

const Diagram& alaris() {
  static const Diagram d = load("alaris");
  return d;
}

void BM_RunBatch(benchmark::State& state) {
  auto seqs = gen_sequences(alaris(), static_cast<std::size_t>(state.range(0)), 200, 42);
  for (auto _ : state) benchmark::DoNotOptimize(run_batch(alaris(), seqs));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}

void BM_RunBatchSerial(benchmark::State& state) {
  auto seqs = gen_sequences(alaris(), static_cast<std::size_t>(state.range(0)), 200, 42);
  for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(alaris(), seqs));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}

struct Driver {
  TempDir dir;
  BuildResult built;
  Driver() { built = build(emit_bundle(alaris(), default_config(alaris())), dir.path() / "bundle"); }
};

const Driver& driver() {
  static const Driver d;
  return d;
}

void BM_Difftest(benchmark::State& state) {
  auto seqs = gen_sequences(alaris(), static_cast<std::size_t>(state.range(0)), 200, 42);
  for (auto _ : state) benchmark::DoNotOptimize(difftest(alaris(), driver().built.driver, seqs));
}

void BM_DifftestSerial(benchmark::State& state) {
  auto seqs = gen_sequences(alaris(), static_cast<std::size_t>(state.range(0)), 200, 42);
  for (auto _ : state) benchmark::DoNotOptimize(difftest_serial(alaris(), driver().built.driver, seqs));
}

}  // namespace

BENCHMARK(BM_RunBatch)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunBatchSerial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Difftest)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DifftestSerial)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
