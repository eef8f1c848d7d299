#include "emuc/trace.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace emuc {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  std::array<char, 64> buf{};
  double mag = std::fabs(v);
  bool done = false;
  if (mag == 0.0 || (mag >= 1e-4 && mag < 1e15)) {
    for (int decimals = 0; decimals <= 24 && !done; ++decimals) {
      std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
      done = std::strtod(buf.data(), nullptr) == v;
    }
  }
  for (int digits = 1; digits <= 17 && !done; ++digits) {
    std::snprintf(buf.data(), buf.size(), "%.*e", digits - 1, v);
    done = std::strtod(buf.data(), nullptr) == v;
  }
  std::string s(buf.data());
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string format_value(const Value& v) {
  switch (v.type()) {
    case NumericType::real64: return format_real(v.as_real());
    case NumericType::int32: return std::to_string(v.as_int32());
    case NumericType::uint32: return std::to_string(v.as_uint32());
    case NumericType::bool8: return v.as_bool() ? "1" : "0";
  }
  return {};
}

std::string format_state(const Diagram& d, const MachineState& s) {
  std::string line = s.curr + ";" + s.prev;
  for (const auto& var : d.variables) {
    line += ';';
    line += var.name;
    line += '=';
    auto it = s.valuation.find(var.name);
    if (it != s.valuation.end()) line += format_value(it->second);
  }
  return line;
}

}  // namespace emuc
