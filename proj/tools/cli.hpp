#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace emuc {

inline constexpr const char* kVersion = "0.1.0";

/// The `emuc` command line. `args` excludes the program name. Exit codes:
/// 0 success, 1 diagnostics or divergence, 2 usage error.
int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace emuc
