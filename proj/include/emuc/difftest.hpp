#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "emuc/batch.hpp"
#include "emuc/codegen.hpp"
#include "json.hpp"

namespace emuc {

/// No usable C compiler.
class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CompileError : public std::runtime_error {
 public:
  CompileError(const std::string& what, std::string log) : std::runtime_error(what), log_(std::move(log)) {}
  const std::string& log() const { return log_; }

 private:
  std::string log_;
};

/// Resolves the compiler command: `requested` if non-empty, else $EMUC_CC,
/// else `cc` found on PATH. The command may carry arguments ("gcc -m64").
std::string find_compiler(const std::string& requested = {});

struct BuildResult {
  std::filesystem::path driver;
  std::string log;
};

/// Writes the bundle into `workdir` and compiles `<base>_driver` with
/// kStrictCFlags. Throws EnvironmentError or CompileError.
BuildResult build(const GeneratedBundle& bundle, const std::filesystem::path& workdir,
                  const std::string& cc = {});

/// `n` sequences of `len` triggers drawn uniformly from trigger_set(d) with a
/// seeded 64-bit Mersenne twister. Throws DomainError if there are no
/// triggers and n > 0.
std::vector<EventSequence> gen_sequences(const Diagram& d, std::size_t n, std::size_t len, std::uint64_t seed);

struct Divergence {
  std::size_t sequence = 0;
  std::size_t step = 0;  // trace line index; 0 is the initial state
  std::string interpreter_line;
  std::string driver_line;
};

struct DiffOptions {
  /// Absolute tolerance for real fields; 0 means byte-exact comparison.
  double tolerance = 0.0;
  /// Scratch directory for driver input and output files; a fresh temporary
  /// directory if unset.
  std::optional<std::filesystem::path> scratch;
};

struct DiffReport {
  std::size_t sequences_run = 0;
  std::vector<Divergence> divergences;  // at most one per sequence, by sequence index
  std::string compiler_log;
  Coverage coverage;  // interpreter counters over all sequences
  std::size_t interpreter_traps = 0;

  bool ok() const { return divergences.empty(); }
};

/// Runs every sequence through the interpreter and through `driver`, in
/// parallel over sequences, and compares the traces line by line. A trap
/// after k events agrees with a driver that prints the same k+1 lines and
/// then exits nonzero.
DiffReport difftest(const Diagram& d, const std::filesystem::path& driver,
                    const std::vector<EventSequence>& sequences, const DiffOptions& opts = {});

/// Single-threaded reference for difftest.
DiffReport difftest_serial(const Diagram& d, const std::filesystem::path& driver,
                           const std::vector<EventSequence>& sequences, const DiffOptions& opts = {});

/// Builds the bundle in a temporary directory, then runs difftest. The
/// report carries the compiler log.
DiffReport difftest_bundle(const Diagram& d, const GeneratedBundle& bundle,
                           const std::vector<EventSequence>& sequences, const std::string& cc = {},
                           const DiffOptions& opts = {});

nlohmann::json report_to_json(const Diagram& d, const DiffReport& r);

/// Output of one driver run, split into lines.
struct DriverRun {
  std::vector<std::string> lines;
  int exit_status = 0;  // negative: killed by that signal
};

DriverRun run_driver(const std::filesystem::path& driver, const EventSequence& events,
                     const std::filesystem::path& scratch, const std::string& tag);

/// Scoped temporary directory, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace emuc
