#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "emuc/analyzer.hpp"
#include "emuc/model.hpp"

namespace emuc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deliberate generator faults, used to check that the differential harness
/// and the property suite notice a wrong translation.
enum class Mutation {
  none,
  swap_arc_order,     // swap the first two arcs of the first multi-arc (node, trigger)
  drop_leave,         // omit leave() in transition bodies
  off_by_one_literal  // add one to the first numeric literal found in a guard
};

struct CodegenConfig {
  std::string base_name;
  bool emit_asserts = true;
  /// C typedef name per numeric type; the underlying C type is fixed by the
  /// kind (double, int, unsigned int, unsigned char).
  std::map<NumericType, std::string> word_size_map = {
      {NumericType::bool8, "UC_8"},
      {NumericType::int32, "I_32"},
      {NumericType::uint32, "UI_32"},
      {NumericType::real64, "D_64"},
  };
  /// Bounds for the reachable-state sweep that decides which guard
  /// disjunctions are asserted.
  ExploreLimits explore;
  Mutation mutation = Mutation::none;
};

CodegenConfig default_config(const Diagram& d);

struct GeneratedBundle {
  std::string base_name;
  std::string header;
  std::string impl;
  std::string makefile;
  std::string test_driver;
  std::string doc;
};

/// C spelling of a literal: `10.0`, `7`, `7U`, `true`.
std::string render_literal(const Value& v);

/// C rendering of a guard or right-hand side over `st->` fields, with
/// checked-arithmetic helpers where the operation can trap.
std::string c_expression(const Diagram& d, const Expr& e);

std::string emit_header(const Diagram& d, const CodegenConfig& cfg);
std::string emit_impl(const Diagram& d, const CodegenConfig& cfg);
std::string emit_makefile(const Diagram& d, const CodegenConfig& cfg);
std::string emit_test_driver(const Diagram& d, const CodegenConfig& cfg);
std::string emit_docs(const Diagram& d, const CodegenConfig& cfg);

GeneratedBundle emit_bundle(const Diagram& d, const CodegenConfig& cfg);

/// Writes `<base>.h`, `<base>.c`, `Makefile`, `<base>_driver.c`, `<base>.md`.
void write_bundle(const GeneratedBundle& b, const std::filesystem::path& dir);

/// Compiler flags used by the generated Makefile and by the diff harness.
inline constexpr const char* kStrictCFlags =
    "-std=c99 -O2 -Wall -Wextra -Wpedantic -Werror -ffp-contract=off";

}  // namespace emuc
