#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emuc/model.hpp"

namespace emuc {

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string message;
  SourceLocation begin;
  SourceLocation end;
};

Diagnostic make_error(std::string message, SourceLocation at);
Diagnostic make_warning(std::string message, SourceLocation at);

bool has_errors(const std::vector<Diagnostic>& diags);

/// `file:line:col: severity: message`
std::string render(const Diagnostic& d, std::string_view file);

/// Either a value or the diagnostics explaining why there is none. Warnings
/// may accompany a value.
template <typename T>
struct Parsed {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return value.has_value(); }
};

}  // namespace emuc
