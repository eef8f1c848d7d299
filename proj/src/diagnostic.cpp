#include "emuc/diagnostic.hpp"

#include <algorithm>

namespace emuc {

Diagnostic make_error(std::string message, SourceLocation at) {
  return Diagnostic{Severity::error, std::move(message), at, at};
}

Diagnostic make_warning(std::string message, SourceLocation at) {
  return Diagnostic{Severity::warning, std::move(message), at, at};
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::string render(const Diagnostic& d, std::string_view file) {
  std::string out(file);
  out += ':' + std::to_string(d.begin.line) + ':' + std::to_string(d.begin.column) + ": ";
  out += d.severity == Severity::error ? "error: " : "warning: ";
  out += d.message;
  return out;
}

}  // namespace emuc
