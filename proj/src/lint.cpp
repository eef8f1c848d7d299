#include "emuc/lint.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <tuple>

namespace emuc {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class CLexer {
 public:
  explicit CLexer(std::string_view s) : s_(s) {}

  std::vector<CToken> run() {
    std::vector<CToken> out;
    bool line_start = true;
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\n') {
        advance();
        line_start = true;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        advance();
        continue;
      }
      if (c == '/' && peek(1) == '/') {
        while (i_ < s_.size() && s_[i_] != '\n') advance();
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        advance(2);
        while (i_ < s_.size() && !(s_[i_] == '*' && peek(1) == '/')) advance();
        if (i_ < s_.size()) advance(2);
        continue;
      }
      SourceLocation at{line_, col_};
      if (c == '#' && line_start) {
        std::string text;
        while (i_ < s_.size() && s_[i_] != '\n') {
          if (s_[i_] == '\\' && peek(1) == '\n') {
            advance(2);
            text += ' ';
            continue;
          }
          if (s_[i_] == '/' && peek(1) == '*') {
            advance(2);
            while (i_ < s_.size() && !(s_[i_] == '*' && peek(1) == '/')) advance();
            if (i_ < s_.size()) advance(2);
            text += ' ';
            continue;
          }
          if (s_[i_] == '/' && peek(1) == '/') break;
          text += s_[i_];
          advance();
        }
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())) != 0) text.pop_back();
        out.push_back({CTokenKind::directive, text, at});
        continue;
      }
      line_start = false;
      if (ident_start(c)) {
        std::size_t b = i_;
        while (i_ < s_.size() && ident_char(s_[i_])) advance();
        out.push_back({CTokenKind::identifier, std::string(s_.substr(b, i_ - b)), at});
      } else if (digit(c) || (c == '.' && digit(peek(1)))) {
        std::size_t b = i_;
        while (i_ < s_.size()) {
          char d = s_[i_];
          if ((d == '+' || d == '-') && (s_[i_ - 1] == 'e' || s_[i_ - 1] == 'E') &&
              !(s_.substr(b, 2) == "0x" || s_.substr(b, 2) == "0X")) {
            advance();
          } else if (ident_char(d) || d == '.') {
            advance();
          } else {
            break;
          }
        }
        out.push_back({CTokenKind::number, std::string(s_.substr(b, i_ - b)), at});
      } else if (c == '"' || c == '\'') {
        std::size_t b = i_;
        advance();
        while (i_ < s_.size() && s_[i_] != c && s_[i_] != '\n') {
          if (s_[i_] == '\\') advance();
          advance();
        }
        if (i_ < s_.size() && s_[i_] == c) advance();
        out.push_back({c == '"' ? CTokenKind::string : CTokenKind::character,
                       std::string(s_.substr(b, i_ - b)), at});
      } else {
        static const std::array<std::string_view, 22> multi = {
            "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==",
            "!=",  "&&",  "||",  "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="};
        std::string text(1, c);
        for (auto m : multi) {
          if (s_.substr(i_, m.size()) == m) {
            text = std::string(m);
            break;
          }
        }
        advance(text.size());
        out.push_back({CTokenKind::punct, text, at});
      }
    }
    return out;
  }

 private:
  char peek(std::size_t k) const { return i_ + k < s_.size() ? s_[i_ + k] : '\0'; }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i_ < s_.size(); ++k) {
      if (s_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++i_;
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---- header grammar ------------------------------------------------------

enum class Section {
  preprocessor,
  constants,
  typedefs,
  node_enum,
  state_struct,
  utility,
  init,
  permission,
  transition,
  endif,
};

const char* section_name(Section s) {
  switch (s) {
    case Section::preprocessor: return "preprocessor directives";
    case Section::constants: return "constant definitions";
    case Section::typedefs: return "typedef definitions";
    case Section::node_enum: return "node label enum";
    case Section::state_struct: return "state structure";
    case Section::utility: return "utility function prototypes";
    case Section::init: return "init prototype";
    case Section::permission: return "permission function prototypes";
    case Section::transition: return "transition function prototypes";
    case Section::endif: return "closing #endif";
  }
  return "?";
}

struct Item {
  Section section;
  SourceLocation at;
  std::string name;  // function or typedef name where relevant
};

std::string first_word(const std::string& directive, std::string* rest) {
  std::size_t p = 1;
  while (p < directive.size() && std::isspace(static_cast<unsigned char>(directive[p])) != 0) ++p;
  std::size_t b = p;
  while (p < directive.size() && ident_char(directive[p])) ++p;
  std::string word = directive.substr(b, p - b);
  while (p < directive.size() && std::isspace(static_cast<unsigned char>(directive[p])) != 0) ++p;
  if (rest != nullptr) *rest = directive.substr(p);
  return word;
}

std::optional<Item> classify_statement(const std::vector<CToken>& st, std::vector<Diagnostic>& diags) {
  const CToken& head = st.front();
  if (head.text == "typedef") {
    std::string name;
    for (auto it = st.rbegin(); it != st.rend(); ++it) {
      if (it->kind == CTokenKind::identifier) {
        name = it->text;
        break;
      }
    }
    if (st.size() > 1 && st[1].text == "enum") {
      if (name != "node_label") {
        diags.push_back(make_error("enum typedef must be named node_label, found '" + name + "'", head.at));
      }
      return Item{Section::node_enum, head.at, name};
    }
    if (st.size() > 1 && st[1].text == "struct") {
      if (name != "state") {
        diags.push_back(make_error("struct typedef must be named state, found '" + name + "'", head.at));
      }
      return Item{Section::state_struct, head.at, name};
    }
    return Item{Section::typedefs, head.at, name};
  }
  auto paren = std::find_if(st.begin(), st.end(), [](const CToken& t) { return t.text == "("; });
  if (paren == st.begin() || paren == st.end() || std::prev(paren)->kind != CTokenKind::identifier) {
    diags.push_back(make_error("declaration does not belong to any header section", head.at));
    return std::nullopt;
  }
  const std::string& name = std::prev(paren)->text;
  if (name == "enter" || name == "leave") return Item{Section::utility, head.at, name};
  if (name == "init") return Item{Section::init, head.at, name};
  if (name.rfind("per_", 0) == 0) return Item{Section::permission, head.at, name.substr(4)};
  if (head.text == "state") return Item{Section::transition, head.at, name};
  diags.push_back(make_error("prototype '" + name + "' does not belong to any header section", head.at));
  return std::nullopt;
}

// ---- rules ---------------------------------------------------------------

const std::set<std::string> kBuiltinTypes = {"char",  "short",  "int",    "long",
                                             "float", "double", "signed", "unsigned"};

// Binary operators by C binding strength (higher binds tighter).
const std::map<std::string, int> kBinaryOps = {
    {"*", 11}, {"/", 11}, {"%", 11}, {"+", 10}, {"-", 10}, {"<", 8},   {"<=", 8},  {">", 8},
    {">=", 8}, {"==", 7}, {"!=", 7}, {"&", 6},  {"^", 5},  {"|", 4},   {"?", 2},   {":", 2},
    {"=", 1},  {"+=", 1}, {"-=", 1}, {"*=", 1}, {"/=", 1}, {"%=", 1},  {"&=", 1},  {"|=", 1},
    {"^=", 1}};

int binding(const std::vector<CToken>& toks, std::ptrdiff_t i) {
  if (i < 0 || i >= static_cast<std::ptrdiff_t>(toks.size())) return 0;
  auto it = kBinaryOps.find(toks[static_cast<std::size_t>(i)].text);
  return it == kBinaryOps.end() ? 0 : it->second;
}

bool is_integer_literal(const std::string& t) {
  if (t.empty() || !digit(t[0])) return false;
  bool hex = t.size() > 1 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X');
  if (t.find('.') != std::string::npos) return false;
  if (!hex && (t.find('e') != std::string::npos || t.find('E') != std::string::npos)) return false;
  return true;
}

bool has_unsigned_suffix(const std::string& t) {
  return t.find('u') != std::string::npos || t.find('U') != std::string::npos;
}

bool unsigned_by_convention(const std::string& name) {
  static const std::regex sized(R"(U[A-Z]*_[0-9]+)");
  return name == "size_t" || std::regex_match(name, sized);
}

// Typedef names that denote unsigned types, by spelling or by convention.
std::set<std::string> unsigned_typedefs(const std::vector<CToken>& toks, std::set<std::string> known) {
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].text != "typedef") continue;
    std::size_t j = i + 1;
    int depth = 0;
    bool is_unsigned = false;
    for (; j < toks.size(); ++j) {
      const auto& t = toks[j].text;
      if (t == "{") ++depth;
      if (t == "}") --depth;
      if (depth == 0 && t == ";") break;
      if (depth == 0 && (t == "unsigned" || known.count(t) != 0 || unsigned_by_convention(t))) {
        is_unsigned = true;
      }
    }
    if (is_unsigned && j < toks.size() && toks[j - 1].kind == CTokenKind::identifier) {
      known.insert(toks[j - 1].text);
    }
  }
  return known;
}

// Block-scoped record of names declared with an unsigned type. Struct
// members are global, since they are reached through any object.
class UnsignedScopes {
 public:
  explicit UnsignedScopes(std::set<std::string> types, std::set<std::string> globals = {})
      : types_(std::move(types)) {
    scopes_.push_back({std::move(globals), false});
  }

  // Feeds token i; call once per token, in order.
  void feed(const std::vector<CToken>& toks, std::size_t i) {
    const auto& t = toks[i].text;
    if (t == "(") ++parens_;
    if (t == ")") --parens_;
    if (t == "{") {
      bool aggregate = (i >= 1 && (toks[i - 1].text == "struct" || toks[i - 1].text == "union")) ||
                       (i >= 2 && (toks[i - 2].text == "struct" || toks[i - 2].text == "union"));
      scopes_.push_back({std::move(pending_), aggregate});
      pending_.clear();
    } else if (t == "}") {
      if (scopes_.size() > 1) scopes_.pop_back();
    } else if (t == ";" && parens_ == 0) {
      pending_.clear();
    }
    if (toks[i].kind == CTokenKind::identifier && is_type(t)) declare(toks, i);
  }

  bool is_unsigned(const std::string& name) const {
    return std::any_of(scopes_.begin(), scopes_.end(), [&](const Scope& s) { return s.names.count(name) != 0; });
  }

  const std::set<std::string>& globals() const { return scopes_.front().names; }

 private:
  struct Scope {
    std::set<std::string> names;
    bool aggregate;
  };

  bool is_type(const std::string& t) const {
    return t == "unsigned" || types_.count(t) != 0 || unsigned_by_convention(t);
  }

  void declare(const std::vector<CToken>& toks, std::size_t i) {
    static const std::set<std::string> skippable = {"const", "volatile", "*", "int", "char",
                                                    "long", "short", "static", "unsigned"};
    if (i >= 1 && toks[i - 1].text == "typedef") return;
    std::size_t j = i + 1;
    while (j < toks.size() && skippable.count(toks[j].text) != 0) ++j;
    if (j + 1 >= toks.size() || toks[j].kind != CTokenKind::identifier) return;
    const auto& next = toks[j + 1].text;
    if (next != ";" && next != "," && next != "=" && next != ")" && next != "[") return;
    const std::string& name = toks[j].text;
    if (parens_ > 0) {
      pending_.insert(name);
    } else if (scopes_.back().aggregate) {
      scopes_.front().names.insert(name);
    } else {
      scopes_.back().names.insert(name);
    }
  }

  std::set<std::string> types_;
  std::vector<Scope> scopes_;
  std::set<std::string> pending_;  // parameters, scoped to the next block
  int parens_ = 0;
};

// Name of the operand that ends at index `j` (the member name for `a->b`).
std::optional<std::string> operand_ending_at(const std::vector<CToken>& toks, std::ptrdiff_t j) {
  if (j < 0) return std::nullopt;
  const auto& t = toks[static_cast<std::size_t>(j)];
  if (t.kind == CTokenKind::identifier) return t.text;
  if (t.text == "]") {
    int depth = 0;
    for (std::ptrdiff_t k = j; k >= 0; --k) {
      const auto& s = toks[static_cast<std::size_t>(k)].text;
      if (s == "]") ++depth;
      if (s == "[" && --depth == 0) return operand_ending_at(toks, k - 1);
    }
  }
  return std::nullopt;
}

// Name of the operand that starts at index `j`, following member access.
std::optional<std::string> operand_starting_at(const std::vector<CToken>& toks, std::size_t j) {
  if (j >= toks.size() || toks[j].kind != CTokenKind::identifier) return std::nullopt;
  std::string name = toks[j].text;
  while (j + 2 < toks.size() && (toks[j + 1].text == "->" || toks[j + 1].text == ".") &&
         toks[j + 2].kind == CTokenKind::identifier) {
    j += 2;
    name = toks[j].text;
  }
  if (j + 1 < toks.size() && toks[j + 1].text == "(") return std::nullopt;
  return name;
}

}  // namespace

std::vector<CToken> lex_c(std::string_view source) { return CLexer(source).run(); }

std::vector<Diagnostic> check_header_grammar(std::string_view header) {
  std::vector<Diagnostic> diags;
  auto toks = lex_c(header);
  std::vector<Item> items;

  // Only a directive that ends the file counts as the closing #endif.
  const std::size_t last_directive =
      !toks.empty() && toks.back().kind == CTokenKind::directive ? toks.size() - 1 : toks.size();

  std::vector<CToken> stmt;
  int depth = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.kind == CTokenKind::directive) {
      if (!stmt.empty()) {
        diags.push_back(make_error("preprocessor directive inside a declaration", t.at));
        continue;
      }
      std::string rest;
      std::string word = first_word(t.text, &rest);
      if (word == "endif" && i == last_directive) {
        items.push_back({Section::endif, t.at, {}});
      } else if (word == "define") {
        std::size_t p = 0;
        while (p < rest.size() && ident_char(rest[p])) ++p;
        bool has_value = rest.find_first_not_of(" \t", p) != std::string::npos;
        items.push_back({has_value ? Section::constants : Section::preprocessor, t.at, rest.substr(0, p)});
      } else {
        items.push_back({Section::preprocessor, t.at, word});
      }
      continue;
    }
    stmt.push_back(t);
    if (t.text == "{") ++depth;
    if (t.text == "}") --depth;
    if (depth == 0 && t.text == ";") {
      if (auto item = classify_statement(stmt, diags)) items.push_back(*item);
      stmt.clear();
    }
  }
  if (!stmt.empty()) diags.push_back(make_error("unterminated declaration", stmt.front().at));

  std::optional<Item> furthest;
  for (const auto& it : items) {
    if (furthest && it.section < furthest->section) {
      diags.push_back(make_error(std::string(section_name(it.section)) + " must come before " +
                                     section_name(furthest->section),
                                 it.at));
    } else {
      furthest = it;
    }
  }

  auto count = [&](Section s) {
    return std::count_if(items.begin(), items.end(), [&](const Item& i) { return i.section == s; });
  };
  auto has_named = [&](Section s, const std::string& n) {
    return std::any_of(items.begin(), items.end(),
                       [&](const Item& i) { return i.section == s && i.name == n; });
  };
  SourceLocation end_at = toks.empty() ? SourceLocation{1, 1} : toks.back().at;
  for (Section s : {Section::preprocessor, Section::typedefs, Section::node_enum, Section::state_struct}) {
    if (count(s) == 0) diags.push_back(make_error(std::string("missing ") + section_name(s), end_at));
  }
  for (Section s : {Section::node_enum, Section::state_struct, Section::init}) {
    if (count(s) > 1) diags.push_back(make_error(std::string("more than one ") + section_name(s), end_at));
  }
  for (const char* n : {"enter", "leave"}) {
    if (!has_named(Section::utility, n)) {
      diags.push_back(make_error(std::string("missing prototype for ") + n, end_at));
    }
  }
  if (count(Section::init) == 0) diags.push_back(make_error("missing init prototype", end_at));
  bool opened = std::any_of(items.begin(), items.end(), [](const Item& i) {
    return i.section == Section::preprocessor && (i.name == "ifndef" || i.name == "if" || i.name == "ifdef");
  });
  if (opened && count(Section::endif) == 0) diags.push_back(make_error("missing closing #endif", end_at));

  for (const auto& it : items) {
    if (it.section == Section::permission && !has_named(Section::transition, it.name)) {
      diags.push_back(make_error("permission function per_" + it.name + " has no transition function", it.at));
    }
    if (it.section == Section::transition && !has_named(Section::permission, it.name)) {
      diags.push_back(make_error("transition function " + it.name + " has no permission function", it.at));
    }
  }
  std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.begin.line, a.begin.column) < std::tie(b.begin.line, b.begin.column);
  });
  return diags;
}

std::vector<Diagnostic> check_rules(std::string_view source, std::string_view context) {
  std::vector<Diagnostic> diags;
  auto toks = lex_c(source);
  auto context_toks = lex_c(context);
  auto types = unsigned_typedefs(toks, unsigned_typedefs(context_toks, {}));
  UnsignedScopes from_context(types);
  for (std::size_t i = 0; i < context_toks.size(); ++i) from_context.feed(context_toks, i);
  UnsignedScopes scopes(types, from_context.globals());

  int depth = 0;
  int typedef_depth = -1;  // brace depth of the open typedef statement
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.kind == CTokenKind::directive) continue;
    scopes.feed(toks, i);
    if (t.text == "{") ++depth;
    if (t.text == "}") --depth;
    if (t.text == "typedef" && typedef_depth < 0) typedef_depth = depth;
    if (t.text == ";" && typedef_depth == depth) typedef_depth = -1;

    if (t.kind == CTokenKind::identifier && t.text == "goto") {
      diags.push_back(make_error("R1: goto is not allowed", t.at));
    }
    if (t.kind == CTokenKind::identifier && kBuiltinTypes.count(t.text) != 0 && typedef_depth < 0) {
      bool main_decl = t.text == "int" && i + 1 < toks.size() && toks[i + 1].text == "main";
      if (!main_decl) {
        diags.push_back(make_error("R3: bare type '" + t.text + "' outside a typedef; use a sized typedef", t.at));
      }
    }
    if (t.kind == CTokenKind::number && is_integer_literal(t.text) && !has_unsigned_suffix(t.text)) {
      // The literal is an operand of whichever neighbouring operator binds
      // tighter; ties go left.
      const auto at = static_cast<std::ptrdiff_t>(i);
      const int left = binding(toks, at - 1);
      const int right = binding(toks, at + 1);
      std::optional<std::string> other;
      if (left > 0 && left >= right) {
        other = operand_ending_at(toks, at - 2);
      } else if (right > 0) {
        other = operand_starting_at(toks, i + 2);
      }
      if (other && !scopes.is_unsigned(*other)) other.reset();
      if (other) {
        diags.push_back(make_error("R2: integer literal '" + t.text + "' next to unsigned operand '" + *other +
                                       "' needs a U suffix",
                                   t.at));
      }
    }
  }
  return diags;
}

}  // namespace emuc
