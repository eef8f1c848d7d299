#include "emuc/parser.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>

#include "emuc/trace.hpp"

namespace emuc {
namespace {

enum class Tok {
  ident,
  number,
  arrow,     // ->
  assign,    // :=
  colon,
  lbracket,
  rbracket,
  lbrace,
  rbrace,
  lparen,
  rparen,
  comma,
  semicolon,
  plus,
  minus,
  star,
  slash,
  lt,
  le,
  gt,
  ge,
  eq,
  ne,
  bang,
  and_,
  or_,
  end,
  invalid,
};

struct Token {
  Tok kind;
  std::string text;
  SourceLocation loc;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      SourceLocation at{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::end, "", end_location()});
        return out;
      }
      char c = src_[pos_];
      if (is_ident_start(c)) {
        std::size_t b = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        out.push_back({Tok::ident, std::string(src_.substr(b, pos_ - b)), at});
      } else if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
        out.push_back({Tok::number, lex_number(), at});
      } else {
        out.push_back(lex_punct(at));
      }
    }
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  SourceLocation end_location() const {
    // Point at the last character so the location stays inside the text.
    if (src_.empty()) return {1, 1};
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i + 1 < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#' || (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  std::string lex_number() {
    std::size_t b = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      int save_col = col_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && is_digit(src_[pos_])) {
        while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
      } else {
        pos_ = save;
        col_ = save_col;
      }
    }
    if (pos_ < src_.size() && (src_[pos_] == 'u' || src_[pos_] == 'U')) advance();
    return std::string(src_.substr(b, pos_ - b));
  }

  Token lex_punct(SourceLocation at) {
    auto two = [&](char a, char b) {
      return src_[pos_] == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    auto emit = [&](Tok k, int len) {
      std::string text(src_.substr(pos_, static_cast<std::size_t>(len)));
      for (int i = 0; i < len; ++i) advance();
      return Token{k, text, at};
    };
    if (two('-', '>')) return emit(Tok::arrow, 2);
    if (two(':', '=')) return emit(Tok::assign, 2);
    if (two('<', '=')) return emit(Tok::le, 2);
    if (two('>', '=')) return emit(Tok::ge, 2);
    if (two('=', '=')) return emit(Tok::eq, 2);
    if (two('!', '=')) return emit(Tok::ne, 2);
    if (two('&', '&')) return emit(Tok::and_, 2);
    if (two('|', '|')) return emit(Tok::or_, 2);
    switch (src_[pos_]) {
      case ':': return emit(Tok::colon, 1);
      case '[': return emit(Tok::lbracket, 1);
      case ']': return emit(Tok::rbracket, 1);
      case '{': return emit(Tok::lbrace, 1);
      case '}': return emit(Tok::rbrace, 1);
      case '(': return emit(Tok::lparen, 1);
      case ')': return emit(Tok::rparen, 1);
      case ',': return emit(Tok::comma, 1);
      case ';': return emit(Tok::semicolon, 1);
      case '+': return emit(Tok::plus, 1);
      case '-': return emit(Tok::minus, 1);
      case '*': return emit(Tok::star, 1);
      case '/': return emit(Tok::slash, 1);
      case '<': return emit(Tok::lt, 1);
      case '>': return emit(Tok::gt, 1);
      case '=': return emit(Tok::eq, 1);
      case '!': return emit(Tok::bang, 1);
      default: return emit(Tok::invalid, 1);
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct SyntaxError {
  Diagnostic diag;
};

// Identifiers that can never denote a context variable inside an expression.
const std::set<std::string, std::less<>> kNodeStateWords = {"curr", "prev", "curr_node",
                                                            "prev_node"};

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::set<std::string, std::less<>>* node_labels)
      : toks_(std::move(toks)), node_labels_(node_labels) {}

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::ident) && peek().text == w; }

  Token take() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& msg, SourceLocation at) const {
    throw SyntaxError{make_error(msg, at)};
  }
  [[noreturn]] void fail_here(const std::string& msg) const {
    const auto& t = peek();
    std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    fail(msg + ", found " + found, t.loc);
  }

  Token expect(Tok k, std::string_view what) {
    if (!at(k)) fail_here("expected " + std::string(what));
    return take();
  }
  Token expect_ident(std::string_view what) { return expect(Tok::ident, what); }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail_here("expected '" + std::string(w) + "'");
    take();
  }

  ExprPtr expr() { return or_expr(); }

  // Bounds recursion so hostile input fails with a diagnostic instead of
  // exhausting the stack.
  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) p.fail_here("expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
  };
  static constexpr int kMaxDepth = 200;

  ExprPtr or_expr() {
    auto lhs = and_expr();
    while (at(Tok::or_) || at_word("or")) {
      take();
      lhs = Expr::binary(BinaryOp::logical_or, lhs, and_expr());
    }
    return lhs;
  }

  ExprPtr and_expr() {
    auto lhs = not_expr();
    while (at(Tok::and_) || at_word("and")) {
      take();
      lhs = Expr::binary(BinaryOp::logical_and, lhs, not_expr());
    }
    return lhs;
  }

  ExprPtr not_expr() {
    DepthGuard guard(*this);
    if (at(Tok::bang) || at_word("not")) {
      take();
      return Expr::unary(UnaryOp::logical_not, not_expr());
    }
    return cmp_expr();
  }

  ExprPtr cmp_expr() {
    auto lhs = add_expr();
    for (;;) {
      BinaryOp op;
      switch (peek().kind) {
        case Tok::lt: op = BinaryOp::lt; break;
        case Tok::le: op = BinaryOp::le; break;
        case Tok::gt: op = BinaryOp::gt; break;
        case Tok::ge: op = BinaryOp::ge; break;
        case Tok::eq: op = BinaryOp::eq; break;
        case Tok::ne: op = BinaryOp::ne; break;
        default: return lhs;
      }
      take();
      lhs = Expr::binary(op, lhs, add_expr());
    }
  }

  ExprPtr add_expr() {
    auto lhs = mul_expr();
    while (at(Tok::plus) || at(Tok::minus)) {
      auto op = take().kind == Tok::plus ? BinaryOp::add : BinaryOp::sub;
      lhs = Expr::binary(op, lhs, mul_expr());
    }
    return lhs;
  }

  ExprPtr mul_expr() {
    auto lhs = unary_expr();
    while (at(Tok::star) || at(Tok::slash)) {
      auto op = take().kind == Tok::star ? BinaryOp::mul : BinaryOp::div;
      lhs = Expr::binary(op, lhs, unary_expr());
    }
    return lhs;
  }

  ExprPtr unary_expr() {
    DepthGuard guard(*this);
    if (at(Tok::minus)) {
      take();
      return Expr::unary(UnaryOp::negate, unary_expr());
    }
    return primary();
  }

  ExprPtr primary() {
    if (at(Tok::lparen)) {
      take();
      auto e = expr();
      expect(Tok::rparen, "')'");
      return e;
    }
    if (at(Tok::number)) {
      auto t = take();
      return Expr::literal(number_value(t), is_flexible_number(t.text));
    }
    if (at(Tok::ident)) {
      const auto& t = peek();
      if (t.text == "true" || t.text == "false") {
        take();
        return Expr::literal(Value::boolean(t.text == "true"));
      }
      if (kNodeStateWords.count(t.text) != 0 ||
          (node_labels_ != nullptr && node_labels_->count(t.text) != 0)) {
        fail("node labels and node state are not expression operands ('" + t.text +
                 "'); constrain the node with the arc source instead",
             t.loc);
      }
      if (is_keyword(t.text)) fail_here("expected an expression");
      return Expr::var(take().text);
    }
    fail_here("expected an expression");
  }

  static bool is_keyword(std::string_view w) {
    return w == "and" || w == "or" || w == "not";
  }

  static bool is_flexible_number(std::string_view text) {
    return text.find_first_of(".eEuU") == std::string_view::npos;
  }

  Value number_value(const Token& t) const {
    std::string text = t.text;
    bool unsigned_suffix = !text.empty() && (text.back() == 'u' || text.back() == 'U');
    if (unsigned_suffix) text.pop_back();
    bool integral = text.find_first_of(".eE") == std::string::npos;
    if (integral) {
      errno = 0;
      unsigned long long v = std::strtoull(text.c_str(), nullptr, 10);
      if (errno == ERANGE || v > std::numeric_limits<std::uint32_t>::max()) {
        fail("integer literal '" + t.text + "' is out of range", t.loc);
      }
      if (unsigned_suffix) return Value::uint32(static_cast<std::uint32_t>(v));
      if (v <= static_cast<unsigned long long>(std::numeric_limits<std::int32_t>::max())) {
        return Value::int32(static_cast<std::int32_t>(v));
      }
      return Value::uint32(static_cast<std::uint32_t>(v));
    }
    if (unsigned_suffix) fail("suffix 'u' applies to integer literals only", t.loc);
    double d = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(d)) fail("real literal '" + t.text + "' is out of range", t.loc);
    return Value::real(d);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  const std::set<std::string, std::less<>>* node_labels_;
};

Diagnostic duplicate(const std::string& what, const std::string& name, SourceLocation at) {
  return make_error("duplicate " + what + " '" + name + "'", at);
}

struct DiagramReader {
  Parser p;
  Diagram d;
  std::vector<Diagnostic> diags;
  std::set<std::string, std::less<>> labels;
  SourceLocation initial_loc;
  bool have_nodes = false;
  bool have_initial = false;
  bool have_variables = false;
  bool have_arcs = false;

  explicit DiagramReader(std::vector<Token> toks) : p(std::move(toks), &labels) {}

  void read() {
    if (!p.at_word("diagram")) {
      diags.push_back(make_error("expected diagram header ('diagram <name> { ... }')", p.peek().loc));
      return;
    }
    p.take();
    d.name = p.expect_ident("diagram name").text;
    p.expect(Tok::lbrace, "'{'");
    while (!p.at(Tok::rbrace)) {
      auto t = p.peek();
      if (t.kind != Tok::ident) p.fail_here("expected a section (nodes, initial, variables, arcs)");
      if (t.text == "nodes") {
        once(have_nodes, t);
        nodes();
      } else if (t.text == "initial") {
        once(have_initial, t);
        p.take();
        initial_loc = p.peek().loc;
        d.initial = p.expect_ident("initial node label").text;
        if (p.at(Tok::semicolon)) p.take();
      } else if (t.text == "variables") {
        once(have_variables, t);
        variables();
      } else if (t.text == "arcs") {
        once(have_arcs, t);
        // Node labels must be known before expressions are read.
        if (!have_nodes) p.fail("section 'nodes' must precede 'arcs'", t.loc);
        arcs();
      } else {
        p.fail_here("expected a section (nodes, initial, variables, arcs)");
      }
    }
    p.take();
    if (!p.at(Tok::end)) p.fail_here("expected end of input after diagram");

    if (!have_nodes || d.nodes.empty()) {
      diags.push_back(make_error("diagram declares no nodes", p.peek().loc));
    }
    if (!have_initial) {
      diags.push_back(make_error("missing 'initial' node", p.peek().loc));
    } else if (!d.has_node(d.initial)) {
      diags.push_back(make_error("unknown initial node '" + d.initial + "'", initial_loc));
    }
  }

  void once(bool& flag, const Token& t) {
    if (flag) p.fail("duplicate section '" + t.text + "'", t.loc);
    flag = true;
  }

  void nodes() {
    p.take();
    p.expect(Tok::lbrace, "'{'");
    while (!p.at(Tok::rbrace)) {
      auto t = p.expect_ident("node label");
      if (labels.count(t.text) != 0) {
        diags.push_back(duplicate("node", t.text, t.loc));
      } else {
        labels.insert(t.text);
        d.nodes.push_back(t.text);
      }
      if (!p.at(Tok::rbrace)) p.expect(Tok::comma, "',' or '}'");
    }
    p.take();
  }

  void variables() {
    p.take();
    p.expect(Tok::lbrace, "'{'");
    while (!p.at(Tok::rbrace)) {
      auto name = p.expect_ident("variable name");
      p.expect(Tok::colon, "':'");
      auto type_tok = p.expect_ident("type name");
      auto type = parse_type_name(type_tok.text);
      if (!type) p.fail("unknown type '" + type_tok.text + "'", type_tok.loc);
      p.expect(Tok::eq, "'='");
      auto init_loc = p.peek().loc;
      bool negative = false;
      if (p.at(Tok::minus)) {
        p.take();
        negative = true;
      }
      Value init;
      if (p.at_word("true") || p.at_word("false")) {
        if (negative) p.fail("cannot negate a boolean initial value", init_loc);
        init = Value::boolean(p.take().text == "true");
      } else {
        init = p.number_value(p.expect(Tok::number, "initial value"));
        if (negative) {
          auto as_real = Value::real(-static_cast<double>(init.widened()));
          if (init.type() == NumericType::real64) {
            init = as_real;
          } else if (init.type() == NumericType::int32) {
            init = Value::int32(-init.as_int32());
          } else if (init.as_uint32() == 2147483648u) {
            init = Value::int32(std::numeric_limits<std::int32_t>::min());
          } else {
            p.fail("integer literal out of range", init_loc);
          }
        }
      }
      auto typed = convert_exact(init, *type);
      if (!typed) {
        diags.push_back(make_error("initial value of '" + name.text + "' is not representable as " +
                                       std::string(type_name(*type)),
                                   init_loc));
        typed = Value::zero(*type);
      }
      if (d.find_variable(name.text) != nullptr) {
        diags.push_back(duplicate("variable", name.text, name.loc));
      } else {
        d.variables.push_back(ContextVariable{name.text, *type, *typed, name.loc});
      }
      if (p.at(Tok::semicolon) || p.at(Tok::comma)) p.take();
    }
    p.take();
  }

  void arcs() {
    p.take();
    p.expect(Tok::lbrace, "'{'");
    while (!p.at(Tok::rbrace)) {
      Arc a;
      auto src = p.expect_ident("arc source node");
      a.location = src.loc;
      a.source = src.text;
      p.expect(Tok::arrow, "'->'");
      auto dst = p.expect_ident("arc target node");
      a.target = dst.text;
      p.expect(Tok::colon, "':'");
      a.trigger = p.expect_ident("trigger name").text;
      if (labels.count(a.source) == 0) {
        diags.push_back(make_error("arc source '" + a.source + "' is not a declared node", src.loc));
      }
      if (labels.count(a.target) == 0) {
        diags.push_back(make_error("arc target '" + a.target + "' is not a declared node", dst.loc));
      }
      if (p.at(Tok::lbracket)) {
        p.take();
        a.guard = p.expr();
        p.expect(Tok::rbracket, "']'");
      }
      if (p.at(Tok::lbrace)) {
        p.take();
        while (!p.at(Tok::rbrace)) {
          auto target = p.expect_ident("assignment target");
          p.expect(Tok::assign, "':='");
          a.action.push_back(Assignment{target.text, p.expr()});
          if (!p.at(Tok::rbrace)) p.expect(Tok::semicolon, "';' or '}'");
        }
        p.take();
      }
      if (p.at(Tok::semicolon)) p.take();
      d.arcs.push_back(std::move(a));
    }
    p.take();
  }
};

bool has_lexical_errors(const std::vector<Token>& toks, std::vector<Diagnostic>& diags) {
  for (const auto& t : toks) {
    if (t.kind == Tok::invalid) {
      diags.push_back(make_error("unexpected character '" + t.text + "'", t.loc));
      return true;
    }
  }
  return false;
}

// Precedence levels for printing, loosest first.
constexpr int kOr = 1;
constexpr int kAnd = 2;
constexpr int kNot = 3;
constexpr int kCmp = 4;
constexpr int kAdd = 5;
constexpr int kMul = 6;
constexpr int kUnary = 7;
constexpr int kAtom = 8;

int precedence(BinaryOp op) {
  if (op == BinaryOp::logical_or) return kOr;
  if (op == BinaryOp::logical_and) return kAnd;
  if (is_comparison(op)) return kCmp;
  if (op == BinaryOp::add || op == BinaryOp::sub) return kAdd;
  return kMul;
}

std::string print_at(const Expr& e, int min_prec) {
  std::string s;
  int prec = kAtom;
  if (const auto* lit = std::get_if<LiteralExpr>(&e.node)) {
    if (lit->value == Value::int32(std::numeric_limits<std::int32_t>::min())) {
      // 2147483648 has no int32 reading, so spell the minimum as a difference.
      s = "-2147483647 - 1";
      prec = kAdd;
    } else {
      s = print_literal(lit->value);
      if (s.front() == '-') prec = kUnary;
    }
  } else if (const auto* v = std::get_if<VarExpr>(&e.node)) {
    s = v->name;
  } else if (const auto* u = std::get_if<UnaryExpr>(&e.node)) {
    if (u->op == UnaryOp::negate) {
      prec = kUnary;
      s = "-" + print_at(*u->operand, kUnary);
    } else {
      prec = kNot;
      s = "!" + print_at(*u->operand, kUnary);
    }
  } else {
    const auto& b = std::get<BinaryExpr>(e.node);
    prec = precedence(b.op);
    s = print_at(*b.lhs, prec) + " " + std::string(op_symbol(b.op)) + " " +
        print_at(*b.rhs, prec + 1);
  }
  return prec < min_prec ? "(" + s + ")" : s;
}

}  // namespace

Parsed<ExprPtr> parse_expr(std::string_view source) {
  Parsed<ExprPtr> out;
  Lexer lex(source);
  auto toks = lex.run();
  if (has_lexical_errors(toks, out.diagnostics)) return out;
  Parser p(std::move(toks), nullptr);
  try {
    auto e = p.expr();
    if (!p.at(Tok::end)) p.fail_here("unexpected trailing input");
    out.value = e;
  } catch (const SyntaxError& err) {
    out.diagnostics.push_back(err.diag);
  }
  return out;
}

Parsed<Diagram> parse_diagram(std::string_view source) {
  Parsed<Diagram> out;
  Lexer lex(source);
  auto toks = lex.run();
  if (has_lexical_errors(toks, out.diagnostics)) return out;
  DiagramReader reader(std::move(toks));
  try {
    reader.read();
  } catch (const SyntaxError& err) {
    reader.diags.push_back(err.diag);
  }
  out.diagnostics = std::move(reader.diags);
  if (!has_errors(out.diagnostics)) out.value = std::move(reader.d);
  return out;
}

std::string print_literal(const Value& v) {
  switch (v.type()) {
    case NumericType::real64: return format_real(v.as_real());
    case NumericType::int32: return std::to_string(v.as_int32());
    case NumericType::uint32: return std::to_string(v.as_uint32()) + "u";
    case NumericType::bool8: return v.as_bool() ? "true" : "false";
  }
  return {};
}

std::string print_expr(const Expr& e) { return print_at(e, 0); }

std::string print_diagram(const Diagram& d) {
  std::string out = "diagram " + d.name + " {\n  nodes { ";
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    if (i != 0) out += ", ";
    out += d.nodes[i];
  }
  out += " }\n  initial " + d.initial + "\n";
  if (!d.variables.empty()) {
    out += "  variables {\n";
    for (const auto& v : d.variables) {
      out += "    " + v.name + " : " + std::string(type_name(v.type)) + " = " +
             print_literal(v.initial) + ";\n";
    }
    out += "  }\n";
  }
  out += "  arcs {\n";
  for (const auto& a : d.arcs) {
    out += "    " + a.source + " -> " + a.target + " : " + a.trigger;
    if (!a.guard->is_true_literal()) out += " [" + print_expr(*a.guard) + "]";
    if (!a.action.empty()) {
      out += " {";
      for (std::size_t i = 0; i < a.action.size(); ++i) {
        out += (i == 0 ? " " : "; ") + a.action[i].target + " := " + print_expr(*a.action[i].rhs);
      }
      out += " }";
    }
    out += "\n";
  }
  out += "  }\n}\n";
  return out;
}

nlohmann::json diagram_to_json(const Diagram& d) {
  nlohmann::json j;
  j["name"] = d.name;
  j["nodes"] = d.nodes;
  j["initial"] = d.initial;
  j["variables"] = nlohmann::json::array();
  for (const auto& v : d.variables) {
    j["variables"].push_back(
        {{"name", v.name}, {"type", type_name(v.type)}, {"initial", print_literal(v.initial)}});
  }
  j["arcs"] = nlohmann::json::array();
  for (const auto& a : d.arcs) {
    nlohmann::json arc{{"source", a.source},
                       {"target", a.target},
                       {"trigger", a.trigger},
                       {"guard", print_expr(*a.guard)},
                       {"action", nlohmann::json::array()}};
    for (const auto& as : a.action) {
      arc["action"].push_back({{"target", as.target}, {"rhs", print_expr(*as.rhs)}});
    }
    j["arcs"].push_back(std::move(arc));
  }
  return j;
}

Parsed<Diagram> diagram_from_json(const nlohmann::json& j) {
  // Re-render as model text so both forms share one set of checks.
  Parsed<Diagram> out;
  try {
    std::string text = "diagram " + j.at("name").get<std::string>() + " {\n  nodes { ";
    const auto& nodes = j.at("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i != 0) text += ", ";
      text += nodes[i].get<std::string>();
    }
    text += " }\n  initial " + j.at("initial").get<std::string>() + "\n  variables {\n";
    for (const auto& v : j.value("variables", nlohmann::json::array())) {
      std::string init = v.at("initial").is_string() ? v.at("initial").get<std::string>()
                                                     : v.at("initial").dump();
      text += "    " + v.at("name").get<std::string>() + " : " + v.at("type").get<std::string>() +
              " = " + init + ";\n";
    }
    text += "  }\n  arcs {\n";
    for (const auto& a : j.value("arcs", nlohmann::json::array())) {
      text += "    " + a.at("source").get<std::string>() + " -> " +
              a.at("target").get<std::string>() + " : " + a.at("trigger").get<std::string>();
      if (a.contains("guard")) text += " [" + a.at("guard").get<std::string>() + "]";
      text += " {";
      for (const auto& as : a.value("action", nlohmann::json::array())) {
        text += " " + as.at("target").get<std::string>() + " := " + as.at("rhs").get<std::string>() +
                ";";
      }
      text += " }\n";
    }
    text += "  }\n}\n";
    return parse_diagram(text);
  } catch (const nlohmann::json::exception& e) {
    out.diagnostics.push_back(make_error(std::string("malformed diagram JSON: ") + e.what(), {1, 1}));
  }
  return out;
}

}  // namespace emuc
