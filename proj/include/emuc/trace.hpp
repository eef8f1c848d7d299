#pragma once

#include <string>
#include <vector>

#include "emuc/model.hpp"

namespace emuc {

// Trace line format shared with the generated test driver:
//
//   curr;prev;var1=value1;var2=value2
//
// Variables appear in declaration order. Reals use the shortest fixed
// notation that round-trips (exponent notation outside [1e-4, 1e15)), always
// with a '.' or an exponent; integers are decimal; bool8 prints 0 or 1.
// The generated driver implements the same algorithm over the same libc.

std::string format_real(double v);
std::string format_value(const Value& v);
std::string format_state(const Diagram& d, const MachineState& s);

}  // namespace emuc
