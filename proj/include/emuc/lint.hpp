#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "emuc/diagnostic.hpp"

namespace emuc {

enum class CTokenKind { identifier, number, string, character, punct, directive };

struct CToken {
  CTokenKind kind;
  std::string text;  // a directive holds its whole logical line
  SourceLocation at;
};

/// Lexes C text. Comments are dropped; a preprocessor line (with backslash
/// continuations) becomes one directive token.
std::vector<CToken> lex_c(std::string_view source);

/// Checks the section order of a generated header: directives, optional
/// constant definitions, typedefs, the node_label enum, the state struct,
/// enter/leave, init, permission prototypes, transition prototypes, and a
/// closing #endif. Permission and transition prototypes must pair up.
std::vector<Diagnostic> check_header_grammar(std::string_view header);

/// Lexical MISRA subset:
///   R1  no `goto`;
///   R2  integer literals next to an unsigned-typed operand carry `U`;
///   R3  built-in arithmetic types appear only inside typedef statements
///       (`int main` excepted).
/// `context` is extra text (typically the module header) scanned only for
/// typedefs and declarations, so that R2 knows which fields are unsigned.
std::vector<Diagnostic> check_rules(std::string_view source, std::string_view context = {});

}  // namespace emuc
