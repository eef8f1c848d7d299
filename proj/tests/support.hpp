#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "emuc/analyzer.hpp"
#include "emuc/model.hpp"

namespace emuc::test {

inline std::filesystem::path models_dir() { return EMUC_MODELS_DIR; }
inline std::filesystem::path golden_dir() { return EMUC_GOLDEN_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

/// Loads a shipped model; throws if the analyzer rejects it.
Diagram load_corpus(const std::string& name);

/// Every `.emuc` file under models/, sorted by name.
std::vector<std::string> corpus_names();

/// True if a C compiler can be resolved.
bool have_cc();

struct ProbeCall {
  double from;
  std::string trigger;
};

/// Compiles the generated module for `d` against a small C harness and
/// returns the value of real64 variable `var` after each call. Each call
/// starts from init, fires `prelude`, sets `var` to `from`, then fires the
/// call's trigger if permitted.
std::vector<double> probe_generated(const Diagram& d, const std::string& var,
                                    const std::vector<std::string>& prelude,
                                    const std::vector<ProbeCall>& calls);

/// Seeded generator of small, well-typed, analyzer-accepted diagrams.
class DiagramGen {
 public:
  explicit DiagramGen(std::uint64_t seed) : rng_(seed) {}

  Diagram diagram();
  ExprPtr expr(const Diagram& d, NumericType t, int depth);
  Value value(NumericType t);
  MachineState random_state(const Diagram& d);

  std::uint64_t below(std::uint64_t n);
  bool chance(double p);
  std::mt19937_64& rng() { return rng_; }

  /// Literals are non-negative so printed models reparse to the same tree.
  bool nonnegative_literals = false;

 private:
  std::mt19937_64 rng_;
};

}  // namespace emuc::test
