// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/verilog.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <unordered_map>

namespace hlps::verilog {

ParseError::ParseError(int line, int col, const std::string& what)
    : Error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what),
      line_(line),
      col_(col) {}

namespace {

// ---------------------------------------------------------------------------
// lexer

enum class Tok { ident, system, number, string, symbol, macro, eof };

struct Token {
  Tok kind;
  std::string_view text;
  size_t begin;
  size_t end;
};

const std::set<std::string_view>& keywords() {
  static const std::set<std::string_view> k = {
      "module", "macromodule", "endmodule", "input", "output", "inout", "wire", "reg", "logic",
      "tri", "tri0", "tri1", "wand", "wor", "triand", "trior", "supply0", "supply1", "uwire",
      "var", "signed", "unsigned", "integer", "real", "realtime", "time", "genvar", "parameter",
      "localparam", "defparam", "specparam", "assign", "deassign", "force", "release", "always",
      "always_ff", "always_comb", "always_latch", "initial", "final", "begin", "end", "fork",
      "join", "join_any", "join_none", "if", "else", "case", "casez", "casex", "endcase",
      "default", "for", "while", "repeat", "forever", "do", "generate", "endgenerate",
      "function", "endfunction", "task", "endtask", "automatic", "posedge", "negedge", "or",
      "and", "not", "nand", "nor", "xor", "xnor", "buf", "bufif0", "bufif1", "notif0",
      "notif1", "wait", "disable", "return", "break", "continue", "int", "bit", "byte",
      "shortint", "longint", "unique", "priority", "void", "const", "static", "typedef", "enum",
      "struct", "packed", "string", "event", "specify", "endspecify", "primitive",
      "endprimitive", "table", "endtable", "edge"};
  return k;
}

bool is_keyword(std::string_view s) { return keywords().count(s) != 0; }

const std::set<std::string_view>& skipped_directives() {
  static const std::set<std::string_view> d = {
      "timescale", "define", "include", "ifdef", "ifndef", "elsif", "else", "endif", "undef",
      "default_nettype", "resetall", "celldefine", "endcelldefine", "pragma", "line",
      "unconnected_drive", "nounconnected_drive", "begin_keywords", "end_keywords"};
  return d;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

class LineMap {
 public:
  explicit LineMap(std::string_view text, int line_base = 1) : base_(line_base) {
    starts_.push_back(0);
    for (size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\n') starts_.push_back(i + 1);
    }
  }
  int line(size_t off) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), off);
    return static_cast<int>(it - starts_.begin()) - 1 + base_;
  }
  int col(size_t off) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), off);
    return static_cast<int>(off - *(it - 1)) + 1;
  }

 private:
  std::vector<size_t> starts_;
  int base_;
};

struct Lexed {
  std::vector<Token> tokens;
  std::vector<Comment> comments;
};

Lexed lex(std::string_view s, const LineMap& lines) {
  Lexed out;
  size_t i = 0;
  const size_t n = s.size();
  auto fail = [&](size_t at, const std::string& what) {
    throw ParseError(lines.line(at), lines.col(at), what);
  };
  auto push = [&](Tok kind, size_t b, size_t e) {
    out.tokens.push_back({kind, s.substr(b, e - b), b, e});
  };
  static const char* const kSymbols[] = {"<<<", ">>>", "===", "!==", "**", "<<", ">>", "<=",
                                         ">=",  "==",  "!=",  "&&",  "||", "~&", "~|", "~^",
                                         "^~",  "+:",  "-:",  "->",  "::"};
  while (i < n) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && s[i + 1] == '/') {
      // line comment; a trailing backslash continues it onto the next line
      const size_t b = i;
      std::string text;
      size_t p = i + 2;
      while (true) {
        size_t eol = s.find('\n', p);
        if (eol == std::string_view::npos) eol = n;
        std::string_view body = s.substr(p, eol - p);
        while (!body.empty() && (body.back() == '\r' || body.back() == ' ' || body.back() == '\t')) {
          body.remove_suffix(1);
        }
        if (!body.empty() && body.back() == '\\' && eol < n) {
          body.remove_suffix(1);
          text += std::string(body);
          text += ' ';
          p = eol + 1;
          size_t q = p;
          while (q < n && (s[q] == ' ' || s[q] == '\t')) ++q;
          if (q + 1 < n && s[q] == '/' && s[q + 1] == '/') p = q + 2;
          continue;
        }
        text += std::string(body);
        i = eol;
        break;
      }
      out.comments.push_back({text, {b, i}, lines.line(b)});
      continue;
    }
    if (c == '/' && i + 1 < n && s[i + 1] == '*') {
      size_t e = s.find("*/", i + 2);
      if (e == std::string_view::npos) fail(i, "unterminated block comment");
      out.comments.push_back({std::string(s.substr(i + 2, e - i - 2)), {i, e + 2}, lines.line(i)});
      i = e + 2;
      continue;
    }
    if (c == '(' && i + 1 < n && s[i + 1] == '*' && !(i + 2 < n && s[i + 2] == ')')) {
      size_t e = s.find("*)", i + 2);
      if (e == std::string_view::npos) fail(i, "unterminated attribute");
      i = e + 2;
      continue;
    }
    if (c == '`') {
      size_t e = i + 1;
      while (e < n && ident_char(s[e])) ++e;
      std::string_view name = s.substr(i + 1, e - i - 1);
      if (name.empty()) fail(i, "stray '`'");
      if (skipped_directives().count(name)) {
        // skip to end of line, honouring backslash continuation
        size_t p = e;
        while (p < n) {
          size_t eol = s.find('\n', p);
          if (eol == std::string_view::npos) {
            p = n;
            break;
          }
          size_t q = eol;
          while (q > p && (s[q - 1] == '\r' || s[q - 1] == ' ' || s[q - 1] == '\t')) --q;
          if (q > p && s[q - 1] == '\\') {
            p = eol + 1;
            continue;
          }
          p = eol;
          break;
        }
        i = p;
        continue;
      }
      push(Tok::macro, i, e);
      i = e;
      continue;
    }
    if (ident_start(c)) {
      size_t e = i + 1;
      while (e < n && ident_char(s[e])) ++e;
      push(Tok::ident, i, e);
      i = e;
      continue;
    }
    if (c == '\\') {
      size_t e = i + 1;
      while (e < n && !std::isspace(static_cast<unsigned char>(s[e]))) ++e;
      push(Tok::ident, i, e);
      i = e;
      continue;
    }
    if (c == '$') {
      size_t e = i + 1;
      while (e < n && ident_char(s[e])) ++e;
      push(Tok::system, i, e);
      i = e;
      continue;
    }
    if (c == '"') {
      size_t e = i + 1;
      while (e < n && s[e] != '"') {
        if (s[e] == '\\') ++e;
        if (e < n && s[e] == '\n') fail(i, "unterminated string");
        ++e;
      }
      if (e >= n) fail(i, "unterminated string");
      push(Tok::string, i, e + 1);
      i = e + 1;
      continue;
    }
    auto based_value = [&](size_t p) -> size_t {
      // p points at the quote; returns the end of the literal or 0
      size_t q = p + 1;
      if (q < n && (s[q] == 's' || s[q] == 'S')) ++q;
      if (q < n && std::string_view("bodhBODH").find(s[q]) != std::string_view::npos) {
        ++q;
        while (q < n && (s[q] == ' ' || s[q] == '\t')) ++q;
        size_t v = q;
        while (q < n && (std::isxdigit(static_cast<unsigned char>(s[q])) ||
                         std::string_view("xXzZ?_").find(s[q]) != std::string_view::npos)) {
          ++q;
        }
        return q > v ? q : 0;
      }
      return 0;
    };
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t e = i;
      while (e < n && (std::isdigit(static_cast<unsigned char>(s[e])) || s[e] == '_')) ++e;
      if (e + 1 < n && s[e] == '.' && std::isdigit(static_cast<unsigned char>(s[e + 1]))) {
        ++e;
        while (e < n && (std::isdigit(static_cast<unsigned char>(s[e])) || s[e] == '_')) ++e;
      }
      if (e < n && (s[e] == 'e' || s[e] == 'E')) {
        size_t q = e + 1;
        if (q < n && (s[q] == '+' || s[q] == '-')) ++q;
        if (q < n && std::isdigit(static_cast<unsigned char>(s[q]))) {
          e = q;
          while (e < n && std::isdigit(static_cast<unsigned char>(s[e]))) ++e;
        }
      }
      size_t q = e;
      while (q < n && (s[q] == ' ' || s[q] == '\t')) ++q;
      if (q < n && s[q] == '\'') {
        if (size_t v = based_value(q)) e = v;
      }
      push(Tok::number, i, e);
      i = e;
      continue;
    }
    if (c == '\'') {
      if (size_t v = based_value(i)) {
        push(Tok::number, i, v);
        i = v;
        continue;
      }
      if (i + 1 < n && std::string_view("01xXzZ").find(s[i + 1]) != std::string_view::npos) {
        push(Tok::number, i, i + 2);
        i += 2;
        continue;
      }
      push(Tok::symbol, i, i + 1);
      ++i;
      continue;
    }
    bool matched = false;
    for (const char* sym : kSymbols) {
      std::string_view sv(sym);
      if (s.substr(i, sv.size()) == sv) {
        push(Tok::symbol, i, i + sv.size());
        i += sv.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    push(Tok::symbol, i, i + 1);
    ++i;
  }
  out.tokens.push_back({Tok::eof, std::string_view(), n, n});
  return out;
}

// ---------------------------------------------------------------------------
// constant expressions

struct Unresolved {
  std::string name;
};

class ConstEval {
 public:
  ConstEval(const std::vector<Token>& toks, size_t b, size_t e,
            const std::map<std::string, long long>& params)
      : t_(toks), i_(b), end_(e), params_(params) {}

  long long run() {
    long long v = ternary();
    if (i_ != end_) throw Error("unexpected '" + std::string(t_[i_].text) + "' in constant expression");
    return v;
  }

 private:
  bool at(std::string_view sym) const {
    return i_ < end_ && t_[i_].kind == Tok::symbol && t_[i_].text == sym;
  }
  bool eat(std::string_view sym) {
    if (!at(sym)) return false;
    ++i_;
    return true;
  }
  void expect(std::string_view sym) {
    if (!eat(sym)) throw Error("expected '" + std::string(sym) + "' in constant expression");
  }

  long long ternary() {
    long long c = binary(0);
    if (eat("?")) {
      long long a = ternary();
      expect(":");
      long long b = ternary();
      return c ? a : b;
    }
    return c;
  }

  static int precedence(std::string_view op) {
    static const std::pair<std::string_view, int> table[] = {
        {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"~^", 4}, {"^~", 4}, {"&", 5},
        {"==", 6}, {"!=", 6}, {"===", 6}, {"!==", 6}, {"<", 7}, {"<=", 7}, {">", 7},
        {">=", 7}, {"<<", 8}, {">>", 8}, {"<<<", 8}, {">>>", 8}, {"+", 9}, {"-", 9},
        {"*", 10}, {"/", 10}, {"%", 10}, {"**", 11}};
    for (const auto& [sym, p] : table) {
      if (sym == op) return p;
    }
    return -1;
  }

  long long binary(int min_prec) {
    long long lhs = unary();
    while (i_ < end_ && t_[i_].kind == Tok::symbol) {
      std::string_view op = t_[i_].text;
      int p = precedence(op);
      if (p < min_prec) break;
      ++i_;
      long long rhs = binary(op == "**" ? p : p + 1);
      lhs = apply(op, lhs, rhs);
    }
    return lhs;
  }

  static long long apply(std::string_view op, long long a, long long b) {
    if (op == "||") return (a || b) ? 1 : 0;
    if (op == "&&") return (a && b) ? 1 : 0;
    if (op == "|") return a | b;
    if (op == "^") return a ^ b;
    if (op == "~^" || op == "^~") return ~(a ^ b);
    if (op == "&") return a & b;
    if (op == "==" || op == "===") return a == b;
    if (op == "!=" || op == "!==") return a != b;
    if (op == "<") return a < b;
    if (op == "<=") return a <= b;
    if (op == ">") return a > b;
    if (op == ">=") return a >= b;
    if (op == "<<" || op == "<<<") return b >= 63 ? 0 : a << b;
    if (op == ">>" || op == ">>>") return b >= 63 ? 0 : a >> b;
    if (op == "+") return a + b;
    if (op == "-") return a - b;
    if (op == "*") return a * b;
    if (op == "/" || op == "%") {
      if (b == 0) throw Error("division by zero in constant expression");
      return op == "/" ? a / b : a % b;
    }
    if (op == "**") {
      if (b < 0) return 0;
      long long r = 1;
      for (long long k = 0; k < b && k < 64; ++k) r *= a;
      return r;
    }
    throw Error("unsupported operator '" + std::string(op) + "'");
  }

  long long unary() {
    if (eat("-")) return -unary();
    if (eat("+")) return unary();
    if (eat("!")) return !unary();
    if (eat("~")) return ~unary();
    return primary();
  }

  long long primary() {
    if (i_ >= end_) throw Error("incomplete constant expression");
    const Token& t = t_[i_];
    if (eat("(")) {
      long long v = ternary();
      expect(")");
      return v;
    }
    if (t.kind == Tok::number) {
      ++i_;
      return number(t.text);
    }
    if (t.kind == Tok::ident && !is_keyword(t.text)) {
      ++i_;
      auto it = params_.find(std::string(t.text));
      if (it == params_.end()) throw Unresolved{std::string(t.text)};
      return it->second;
    }
    if (t.kind == Tok::system && t.text == "$clog2") {
      ++i_;
      expect("(");
      long long v = ternary();
      expect(")");
      long long r = 0;
      while ((1LL << r) < v && r < 62) ++r;
      return r;
    }
    if (t.kind == Tok::macro) throw Unresolved{std::string(t.text)};
    throw Error("unsupported token '" + std::string(t.text) + "' in constant expression");
  }

  static long long number(std::string_view text) {
    std::string s;
    for (char c : text) {
      if (c != '_' && c != ' ' && c != '\t') s += c;
    }
    size_t q = s.find('\'');
    if (q == std::string::npos) {
      if (s.find_first_of(".eE") != std::string::npos) throw Error("real literal in constant expression");
      return std::stoll(s);
    }
    size_t p = q + 1;
    if (p < s.size() && (s[p] == 's' || s[p] == 'S')) ++p;
    if (p >= s.size()) throw Error("malformed literal '" + std::string(text) + "'");
    int base = 10;
    switch (std::tolower(static_cast<unsigned char>(s[p]))) {
      case 'b': base = 2; break;
      case 'o': base = 8; break;
      case 'd': base = 10; break;
      case 'h': base = 16; break;
      case '0': return 0;
      case '1': return 1;
      default: throw Error("literal '" + std::string(text) + "' has no constant value");
    }
    std::string digits = s.substr(p + 1);
    if (digits.find_first_of("xXzZ?") != std::string::npos) {
      throw Error("literal '" + std::string(text) + "' has no constant value");
    }
    return std::stoll(digits, nullptr, base);
  }

  const std::vector<Token>& t_;
  size_t i_;
  size_t end_;
  const std::map<std::string, long long>& params_;
};

// ---------------------------------------------------------------------------
// parser

struct StatementRange {
  Statement::Kind kind;
  size_t b;  // token indices scanned for identifiers, [b, e)
  size_t e;
  std::optional<Span> whole;  // statement span when it differs from [b, e)
};

class UnitParser {
 public:
  UnitParser(std::string_view text, int line_base)
      : text_(text), lines_(text, line_base), lexed_(lex(text, lines_)), t_(lexed_.tokens) {}

  ParsedModule parse() {
    out_.text = std::string(text_);
    size_t i = 0;
    while (t_[i].kind != Tok::eof && !is_kw(i, "module") && !is_kw(i, "macromodule")) ++i;
    if (t_[i].kind == Tok::eof) fail(t_[i].begin, "no module declaration found");
    parse_header(i);
    parse_body();
    finalize();
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(size_t off, const std::string& what) const {
    throw ParseError(lines_.line(off), lines_.col(off), what);
  }
  bool is_kw(size_t i, std::string_view kw) const {
    return t_[i].kind == Tok::ident && t_[i].text == kw;
  }
  bool is_sym(size_t i, std::string_view sym) const {
    return t_[i].kind == Tok::symbol && t_[i].text == sym;
  }
  bool is_name(size_t i) const { return t_[i].kind == Tok::ident && !is_keyword(t_[i].text); }
  void expect_sym(size_t& i, std::string_view sym) {
    if (!is_sym(i, sym)) {
      fail(t_[i].begin, "expected '" + std::string(sym) + "' but found '" +
                            std::string(t_[i].kind == Tok::eof ? "end of input" : t_[i].text) + "'");
    }
    ++i;
  }
  std::string expect_name(size_t& i, const char* what) {
    if (!is_name(i)) {
      fail(t_[i].begin, std::string("expected ") + what + " but found '" +
                            std::string(t_[i].kind == Tok::eof ? "end of input" : t_[i].text) + "'");
    }
    return std::string(t_[i++].text);
  }
  // Index just past the bracket group opened at `i`.
  size_t skip_group(size_t i) const {
    const std::string_view open = t_[i].text;
    const std::string_view close = open == "(" ? ")" : open == "[" ? "]" : "}";
    int depth = 0;
    for (size_t k = i; t_[k].kind != Tok::eof; ++k) {
      if (is_sym(k, open)) ++depth;
      if (is_sym(k, close) && --depth == 0) return k + 1;
    }
    fail(t_[i].begin, "unbalanced '" + std::string(open) + "'");
  }
  // Next index at paren depth 0 whose token is one of `stops`.
  size_t find_at_depth0(size_t i, std::initializer_list<std::string_view> stops) const {
    int depth = 0;
    for (size_t k = i; t_[k].kind != Tok::eof; ++k) {
      if (t_[k].kind == Tok::symbol) {
        std::string_view s = t_[k].text;
        if (depth == 0) {
          for (auto stop : stops) {
            if (s == stop) return k;
          }
        }
        if (s == "(" || s == "[" || s == "{") ++depth;
        if (s == ")" || s == "]" || s == "}") --depth;
        if (depth < 0) return k;
      }
    }
    return t_.size() - 1;
  }
  Span span(size_t b, size_t e) const { return {t_[b].begin, t_[e - 1].end}; }

  long long eval(size_t b, size_t e, const std::string& context) {
    try {
      return ConstEval(t_, b, e, out_.parameters).run();
    } catch (const Unresolved& u) {
      auto it = unresolved_.find(u.name);
      fail(t_[b].begin, "unresolved parameter '" + u.name + "' in " + context +
                            (it != unresolved_.end() ? " (" + it->second + ")" : ""));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(t_[b].begin, std::string(e.what()) + " in " + context);
    }
  }

  // Packed dimensions starting at `i`; returns the total width.
  int dims(size_t& i, const std::string& context) {
    long long width = 1;
    while (is_sym(i, "[")) {
      size_t close = skip_group(i) - 1;
      size_t colon = i + 1;
      int depth = 0, pending_q = 0;
      size_t split = 0;
      for (; colon < close; ++colon) {
        if (t_[colon].kind != Tok::symbol) continue;
        std::string_view s = t_[colon].text;
        if (s == "(" || s == "[" || s == "{") ++depth;
        if (s == ")" || s == "]" || s == "}") --depth;
        if (depth == 0 && s == "?") ++pending_q;
        if (depth == 0 && s == ":") {
          if (pending_q > 0) {
            --pending_q;
          } else {
            split = colon;
            break;
          }
        }
      }
      if (split == 0) fail(t_[i].begin, "expected [msb:lsb] range in " + context);
      long long msb = eval(i + 1, split, context);
      long long lsb = eval(split + 1, close, context);
      long long w = (msb > lsb ? msb - lsb : lsb - msb) + 1;
      width *= w;
      if (width > (1LL << 24)) fail(t_[i].begin, "width too large in " + context);
      i = close + 1;
    }
    return static_cast<int>(width);
  }

  // `parameter [type] [range] A = expr, B = expr` up to (not including) a
  // terminator: ';' in bodies, ')' in header lists.
  void parameter_list(size_t& i, bool header) {
    while (true) {
      if (is_kw(i, "parameter") || is_kw(i, "localparam")) ++i;
      while (is_kw(i, "integer") || is_kw(i, "signed") || is_kw(i, "unsigned") ||
             is_kw(i, "int") || is_kw(i, "logic") || is_kw(i, "bit") || is_kw(i, "real") ||
             is_kw(i, "string") || is_kw(i, "time") || is_kw(i, "reg")) {
        ++i;
      }
      if (is_sym(i, "[")) i = skip_group(i);
      std::string name = expect_name(i, "parameter name");
      non_signals_.insert(name);
      size_t stop;
      if (is_sym(i, "=")) {
        ++i;
        stop = header ? find_at_depth0(i, {",", ")"}) : find_at_depth0(i, {",", ";"});
        if (stop == i) fail(t_[i].begin, "missing value for parameter '" + name + "'");
        try {
          out_.parameters[name] = ConstEval(t_, i, stop, out_.parameters).run();
        } catch (const Unresolved& u) {
          unresolved_[name] = "depends on '" + u.name + "'";
        } catch (const Error& e) {
          unresolved_[name] = e.what();
        }
      } else {
        stop = i;
        unresolved_[name] = "no default value";
      }
      i = stop;
      if (is_sym(i, ",")) {
        ++i;
        // `parameter A = 1, parameter B = 2` or `A = 1, B = 2`
        if (!header && !is_name(i)) break;
        continue;
      }
      break;
    }
  }

  void parse_header(size_t i) {
    const size_t start = i;
    out_.header_line = lines_.line(t_[i].begin);
    ++i;  // module
    while (is_kw(i, "automatic") || is_kw(i, "static")) ++i;
    out_.name_span = {t_[i].begin, t_[i].end};
    out_.name = expect_name(i, "module name");
    if (is_sym(i, "#")) {
      ++i;
      expect_sym(i, "(");
      if (!is_sym(i, ")")) parameter_list(i, true);
      expect_sym(i, ")");
    }
    if (is_sym(i, "(")) {
      out_.port_list_open = t_[i].begin;
      ++i;
      if (is_sym(i, ")")) {
        out_.ansi = true;
      } else if (is_kw(i, "input") || is_kw(i, "output") || is_kw(i, "inout")) {
        out_.ansi = true;
        ansi_ports(i);
      } else {
        out_.ansi = false;
        while (true) {
          size_t at = i;
          std::string name = expect_name(i, "port name");
          if (is_sym(i, "[")) fail(t_[at].begin, "port expressions are not supported");
          header_names_.push_back({name, t_[at].begin});
          if (is_sym(i, ",")) {
            ++i;
            continue;
          }
          break;
        }
      }
      if (!is_sym(i, ")")) fail(t_[i].begin, "expected ')' closing the port list");
      if (i > 0 && t_[i - 1].begin >= out_.port_list_open + 1 && !is_sym(i - 1, "(")) {
        out_.port_list_last = t_[i - 1].end;
      }
      out_.port_list_close = t_[i].begin;
      ++i;
    }
    if (!is_sym(i, ";")) fail(t_[i].begin, "expected ';' after module header");
    ++i;
    out_.header = span(start, i);
    segments_.push_back({SegmentKind::header, out_.header});
    i_ = i;
  }

  void ansi_ports(size_t& i) {
    std::optional<Direction> dir;
    int width = 1;
    while (true) {
      if (is_kw(i, "input") || is_kw(i, "output") || is_kw(i, "inout")) {
        dir = direction_from_string(t_[i].text);
        ++i;
        width = 1;
        bool integer = false;
        while (is_kw(i, "wire") || is_kw(i, "reg") || is_kw(i, "logic") || is_kw(i, "tri") ||
               is_kw(i, "var") || is_kw(i, "signed") || is_kw(i, "unsigned") ||
               is_kw(i, "integer") || is_kw(i, "uwire") || is_kw(i, "bit")) {
          if (is_kw(i, "integer")) integer = true;
          ++i;
        }
        width = integer ? 32 : 1;
        if (is_sym(i, "[")) width = dims(i, "port declaration");
      } else if (!dir) {
        fail(t_[i].begin, "expected port direction");
      }
      size_t at = i;
      if (is_name(i) && is_name(i + 1)) fail(t_[i].begin, "unsupported port type '" + std::string(t_[i].text) + "'");
      if (is_name(i) && is_sym(i + 1, ".")) fail(t_[i].begin, "interface ports are not supported");
      std::string name = expect_name(i, "port name");
      if (is_sym(i, "[")) fail(t_[i].begin, "unpacked array port '" + name + "' is not supported");
      if (is_sym(i, "=")) i = find_at_depth0(i + 1, {",", ")"});
      add_port(Port{name, *dir, width}, t_[at].begin);
      if (is_sym(i, ",")) {
        ++i;
        continue;
      }
      break;
    }
  }

  void add_port(Port p, size_t at) {
    if (out_.find_port(p.name)) fail(at, "duplicate port '" + p.name + "'");
    out_.ports.push_back(std::move(p));
  }

  void parse_body() {
    size_t i = i_;
    while (true) {
      if (t_[i].kind == Tok::eof) fail(t_[i].begin, "missing 'endmodule' for module '" + out_.name + "'");
      const size_t b = i;
      if (is_kw(i, "endmodule")) {
        out_.endmodule = t_[i].begin;
        ++i;
        if (is_sym(i, ":")) i += 2;  // endmodule : name
        segments_.push_back({SegmentKind::end, span(b, i)});
        i_ = i;
        break;
      }
      if (is_kw(i, "module") || is_kw(i, "macromodule")) fail(t_[i].begin, "nested module declaration");
      if (is_sym(i, ";")) {
        ++i;
        continue;
      }
      if (is_kw(i, "input") || is_kw(i, "output") || is_kw(i, "inout")) {
        i = port_decl(i);
        segments_.push_back({SegmentKind::port_decl, span(b, i)});
        continue;
      }
      if (is_net_kw(i)) {
        bool logic = false;
        i = net_decl(i, logic);
        if (logic) {
          stmts_.push_back({Statement::Kind::declaration, b, i, std::nullopt});
        } else {
          segments_.push_back({SegmentKind::wire_decl, span(b, i)});
        }
        continue;
      }
      if (is_kw(i, "parameter") || is_kw(i, "localparam")) {
        ++i;
        parameter_list(i, false);
        i = skip_to_semicolon(i);
        continue;
      }
      if (is_kw(i, "genvar")) {
        for (size_t k = i + 1; !is_sym(k, ";") && t_[k].kind != Tok::eof; ++k) {
          if (is_name(k)) non_signals_.insert(std::string(t_[k].text));
        }
        i = skip_to_semicolon(i);
        continue;
      }
      if (is_kw(i, "integer") || is_kw(i, "real") || is_kw(i, "realtime") || is_kw(i, "time") ||
          is_kw(i, "event") || is_kw(i, "int") || is_kw(i, "typedef")) {
        size_t e = skip_to_semicolon(i);
        if (find_at_depth0(i, {"="}) < e) stmts_.push_back({Statement::Kind::declaration, b, e, std::nullopt});
        i = e;
        continue;
      }
      if (is_kw(i, "function") || is_kw(i, "task")) {
        const bool fn = is_kw(i, "function");
        size_t k = i + 1;
        while (is_kw(k, "automatic") || is_kw(k, "static") || is_kw(k, "signed") ||
               is_kw(k, "unsigned") || is_kw(k, "integer") || is_kw(k, "reg") ||
               is_kw(k, "logic") || is_kw(k, "void") || is_kw(k, "int") || is_kw(k, "bit")) {
          ++k;
        }
        if (is_sym(k, "[")) k = skip_group(k);
        if (is_name(k)) non_signals_.insert(std::string(t_[k].text));
        i = skip_until_kw(i, fn ? "endfunction" : "endtask");
        continue;
      }
      if (is_kw(i, "assign")) {
        size_t e = skip_to_semicolon(i);
        stmts_.push_back({Statement::Kind::assign, b, e, std::nullopt});
        i = e;
        continue;
      }
      if (is_kw(i, "always") || is_kw(i, "always_ff") || is_kw(i, "always_comb") ||
          is_kw(i, "always_latch") || is_kw(i, "initial") || is_kw(i, "final")) {
        size_t e = skip_statement(i + 1);
        stmts_.push_back({Statement::Kind::block, b, e, std::nullopt});
        i = e;
        continue;
      }
      if (is_kw(i, "generate")) {
        size_t e = skip_until_kw(i, "endgenerate");
        stmts_.push_back({Statement::Kind::block, b, e, std::nullopt});
        i = e;
        continue;
      }
      if (is_kw(i, "if") || is_kw(i, "for") || is_kw(i, "case") || is_kw(i, "casez") ||
          is_kw(i, "casex") || is_kw(i, "begin")) {
        size_t e = skip_statement(i);
        stmts_.push_back({Statement::Kind::block, b, e, std::nullopt});
        i = e;
        continue;
      }
      if (is_kw(i, "specify")) {
        i = skip_until_kw(i, "endspecify");
        continue;
      }
      if (is_name(i)) {
        if (auto e = instantiation(i)) {
          i = *e;
          continue;
        }
      }
      size_t e = skip_to_semicolon(i);
      stmts_.push_back({Statement::Kind::other, b, e, std::nullopt});
      i = e;
    }
  }

  bool is_net_kw(size_t i) const {
    static const std::set<std::string_view> nets = {"wire",  "reg",     "logic",   "tri",
                                                    "tri0",  "tri1",    "wand",    "wor",
                                                    "triand", "trior",  "supply0", "supply1",
                                                    "uwire", "var"};
    return t_[i].kind == Tok::ident && nets.count(t_[i].text);
  }

  size_t skip_to_semicolon(size_t i) const {
    size_t k = find_at_depth0(i, {";"});
    if (!is_sym(k, ";")) fail(t_[i].begin, "expected ';'");
    return k + 1;
  }

  size_t skip_until_kw(size_t i, std::string_view kw) const {
    for (size_t k = i + 1; t_[k].kind != Tok::eof; ++k) {
      if (is_kw(k, kw)) {
        ++k;
        if (is_sym(k, ":")) k += 2;
        return k;
      }
      if (is_kw(k, "endmodule")) break;
    }
    fail(t_[i].begin, "missing '" + std::string(kw) + "'");
  }

  size_t skip_block(size_t i, std::string_view open, std::initializer_list<std::string_view> close) const {
    int depth = 0;
    for (size_t k = i; t_[k].kind != Tok::eof; ++k) {
      if (is_kw(k, open)) ++depth;
      for (auto c : close) {
        if (is_kw(k, c)) {
          if (--depth == 0) {
            ++k;
            if (is_sym(k, ":")) k += 2;
            return k;
          }
          break;
        }
      }
      if (is_kw(k, "endmodule")) break;
    }
    fail(t_[i].begin, "missing block end for '" + std::string(t_[i].text) + "'");
  }

  size_t skip_statement(size_t i) const {
    if (t_[i].kind == Tok::eof) fail(t_[i].begin, "unexpected end of input");
    if (is_kw(i, "begin")) return skip_block(i, "begin", {"end"});
    if (is_kw(i, "fork")) return skip_block(i, "fork", {"join", "join_any", "join_none"});
    if (is_kw(i, "case") || is_kw(i, "casez") || is_kw(i, "casex")) {
      int depth = 0;
      for (size_t k = i; t_[k].kind != Tok::eof; ++k) {
        if (is_kw(k, "case") || is_kw(k, "casez") || is_kw(k, "casex")) ++depth;
        if (is_kw(k, "endcase") && --depth == 0) return k + 1;
        if (is_kw(k, "endmodule")) break;
      }
      fail(t_[i].begin, "missing 'endcase'");
    }
    if (is_kw(i, "unique") || is_kw(i, "priority")) return skip_statement(i + 1);
    if (is_kw(i, "if")) {
      size_t k = i + 1;
      if (!is_sym(k, "(")) fail(t_[k].begin, "expected '(' after 'if'");
      k = skip_statement(skip_group(k));
      if (is_kw(k, "else")) k = skip_statement(k + 1);
      return k;
    }
    if (is_kw(i, "for") || is_kw(i, "while") || is_kw(i, "repeat")) {
      size_t k = i + 1;
      if (!is_sym(k, "(")) fail(t_[k].begin, "expected '('");
      return skip_statement(skip_group(k));
    }
    if (is_kw(i, "forever")) return skip_statement(i + 1);
    if (is_sym(i, "@")) {
      size_t k = i + 1;
      if (is_sym(k, "(")) {
        k = skip_group(k);
      } else {
        ++k;  // @* or @name
      }
      return skip_statement(k);
    }
    if (is_sym(i, "#")) {
      size_t k = i + 1;
      k = is_sym(k, "(") ? skip_group(k) : k + 1;
      return skip_statement(k);
    }
    if (is_sym(i, ";")) return i + 1;
    return skip_to_semicolon(i);
  }

  size_t port_decl(size_t i) {
    Direction dir = direction_from_string(t_[i].text);
    ++i;
    bool integer = false;
    while (is_net_kw(i) || is_kw(i, "signed") || is_kw(i, "unsigned") || is_kw(i, "integer")) {
      if (is_kw(i, "integer")) integer = true;
      ++i;
    }
    int width = integer ? 32 : 1;
    if (is_sym(i, "[")) width = dims(i, "port declaration");
    while (true) {
      size_t at = t_[i].begin;
      std::string name = expect_name(i, "port name");
      if (out_.ansi && !header_names_.empty()) fail(at, "mixed ANSI and non-ANSI port declarations");
      if (out_.ansi) fail(at, "port '" + name + "' is not in the module port list");
      auto it = std::find_if(header_names_.begin(), header_names_.end(),
                             [&](const auto& h) { return h.first == name; });
      if (it == header_names_.end()) fail(at, "port '" + name + "' is not in the module port list");
      if (declared_.count(name)) fail(at, "duplicate declaration of port '" + name + "'");
      declared_[name] = Port{name, dir, width};
      if (is_sym(i, "[")) fail(t_[i].begin, "unpacked array port '" + name + "' is not supported");
      if (is_sym(i, ",")) {
        ++i;
        continue;
      }
      break;
    }
    if (!is_sym(i, ";")) fail(t_[i].begin, "expected ';' after port declaration");
    return i + 1;
  }

  size_t net_decl(size_t i, bool& logic) {
    ++i;
    while (is_net_kw(i) || is_kw(i, "signed") || is_kw(i, "unsigned")) ++i;
    if (is_sym(i, "#")) {  // delay
      ++i;
      i = is_sym(i, "(") ? skip_group(i) : i + 1;
    }
    int width = 1;
    if (is_sym(i, "[")) width = dims(i, "net declaration");
    while (true) {
      std::string name = expect_name(i, "net name");
      if (is_sym(i, "[")) {
        while (is_sym(i, "[")) i = skip_group(i);
        logic = true;  // memories are logic, not plain nets
      }
      if (is_sym(i, "=")) {
        logic = true;
        i = find_at_depth0(i + 1, {",", ";"});
      }
      if (!out_.find_port(name) &&
          std::none_of(out_.nets.begin(), out_.nets.end(), [&](const NetDecl& d) { return d.name == name; })) {
        out_.nets.push_back({name, width});
      }
      if (is_sym(i, ",")) {
        ++i;
        continue;
      }
      break;
    }
    if (!is_sym(i, ";")) fail(t_[i].begin, "expected ';' after net declaration");
    return i + 1;
  }

  std::optional<size_t> instantiation(size_t i) {
    const size_t b = i;
    size_t k = i + 1;
    std::string params;
    if (is_sym(k, "#")) {
      if (!is_sym(k + 1, "(")) return std::nullopt;
      size_t e = skip_group(k + 1);
      params = std::string(text_.substr(t_[k].begin, t_[e - 1].end - t_[k].begin));
      k = e;
    }
    if (!is_name(k)) return std::nullopt;
    const size_t name_at = k;
    ++k;
    if (is_sym(k, "[")) {  // instance array: opaque
      size_t e = skip_to_semicolon(b);
      stmts_.push_back({Statement::Kind::other, b, e, std::nullopt});
      return e;
    }
    if (!is_sym(k, "(")) return std::nullopt;
    const size_t close = skip_group(k) - 1;
    if (!is_sym(close + 1, ";")) {
      // several instances in one statement
      size_t e = skip_to_semicolon(b);
      stmts_.push_back({Statement::Kind::instantiation, b, e, std::nullopt});
      return e;
    }
    Instantiation inst;
    inst.module_name = std::string(t_[b].text);
    inst.instance_name = std::string(t_[name_at].text);
    inst.parameters = params;
    inst.line = lines_.line(t_[b].begin);
    size_t p = k + 1;
    if (p < close) {
      if (is_sym(p, ".")) {
        while (p < close) {
          if (!is_sym(p, ".")) fail(t_[p].begin, "mixed named and positional connections");
          ++p;
          if (is_sym(p, "*")) fail(t_[p].begin, "'.*' connections are not supported");
          NamedConnection c;
          const size_t port_at = p;
          c.port = expect_name(p, "port name");
          if (is_sym(p, "(")) {
            size_t e = skip_group(p) - 1;
            if (e > p + 1) {
              c.expr_span = {t_[p + 1].begin, t_[e - 1].end};
              c.expr = std::string(text_.substr(c.expr_span.begin, c.expr_span.size()));
            } else {
              c.expr_span = {t_[p].end, t_[p].end};
            }
            p = e + 1;
          } else {
            c.implicit = true;
            c.expr = c.port;
            c.expr_span = {t_[port_at].end, t_[port_at].end};
          }
          if (inst.find(c.port)) fail(t_[port_at].begin, "port '" + c.port + "' connected twice");
          inst.connections.push_back(std::move(c));
          if (is_sym(p, ",")) {
            ++p;
            continue;
          }
          if (p != close) fail(t_[p].begin, "expected ',' or ')' in port connections");
        }
      } else {
        inst.positional = true;
        while (p < close) {
          size_t e = find_at_depth0(p, {",", ")"});
          NamedConnection c;
          if (e > p) {
            c.expr_span = {t_[p].begin, t_[e - 1].end};
            c.expr = std::string(text_.substr(c.expr_span.begin, c.expr_span.size()));
          }
          inst.connections.push_back(std::move(c));
          p = is_sym(e, ",") ? e + 1 : e;
        }
      }
    }
    const size_t e = close + 2;
    inst.span = span(b, e);
    if (out_.find_instance(inst.instance_name)) {
      fail(t_[name_at].begin, "duplicate instance name '" + inst.instance_name + "'");
    }
    out_.instantiations.push_back(std::move(inst));
    segments_.push_back({SegmentKind::instantiation, span(b, e)});
    stmts_.push_back({Statement::Kind::instantiation, k + 1, close, span(b, e)});
    return e;
  }

  std::vector<std::string> identifiers(size_t b, size_t e) const {
    std::vector<std::string> out;
    std::set<std::string_view> seen;
    for (size_t k = b; k < e; ++k) {
      if (!is_name(k)) continue;
      if (k > 0 && is_sym(k - 1, ".")) continue;
      if (k > 1 && is_sym(k - 1, ":") && (is_kw(k - 2, "begin") || is_kw(k - 2, "end"))) continue;
      if (non_signals_.count(std::string(t_[k].text))) continue;
      if (seen.insert(t_[k].text).second) out.emplace_back(t_[k].text);
    }
    return out;
  }

  void finalize() {
    if (!out_.ansi) {
      for (const auto& [name, at] : header_names_) {
        auto it = declared_.find(name);
        if (it == declared_.end()) fail(at, "port '" + name + "' has no direction declaration");
        add_port(it->second, at);
      }
    }
    std::erase_if(out_.nets, [&](const NetDecl& d) { return out_.find_port(d.name) != nullptr; });

    for (const auto& r : stmts_) {
      Statement s;
      s.kind = r.kind;
      s.span = r.whole ? *r.whole : span(r.b, r.e);
      s.identifiers = identifiers(r.b, r.e);
      if (r.kind == Statement::Kind::assign && r.e - r.b == 5 && is_name(r.b + 1) &&
          is_sym(r.b + 2, "=") && is_name(r.b + 3) && is_sym(r.b + 4, ";") &&
          !non_signals_.count(std::string(t_[r.b + 1].text)) &&
          !non_signals_.count(std::string(t_[r.b + 3].text))) {
        s.lhs = std::string(t_[r.b + 1].text);
        s.rhs = std::string(t_[r.b + 3].text);
      }
      out_.statements.push_back(std::move(s));
    }
    std::set<std::string> ids;
    for (const auto& t : t_) {
      if (t.kind == Tok::ident && !is_keyword(t.text)) ids.insert(std::string(t.text));
    }
    out_.identifiers.assign(ids.begin(), ids.end());

    // residual segments fill every gap between consumed spans
    std::sort(segments_.begin(), segments_.end(),
              [](const Segment& a, const Segment& b) { return a.span.begin < b.span.begin; });
    std::vector<Segment> full;
    size_t pos = 0;
    auto residual = [&](size_t b, size_t e) {
      if (e <= b) return;
      if (!full.empty() && full.back().kind == SegmentKind::residual && full.back().span.end == b) {
        full.back().span.end = e;
      } else {
        full.push_back({SegmentKind::residual, {b, e}});
      }
    };
    for (const auto& seg : segments_) {
      residual(pos, seg.span.begin);
      full.push_back(seg);
      pos = seg.span.end;
    }
    residual(pos, text_.size());
    out_.segments = std::move(full);
  }

  std::string_view text_;
  LineMap lines_;
  Lexed lexed_;
  const std::vector<Token>& t_;
  size_t i_ = 0;
  ParsedModule out_;
  std::vector<Segment> segments_;
  std::vector<StatementRange> stmts_;
  std::vector<std::pair<std::string, size_t>> header_names_;
  std::map<std::string, Port> declared_;
  std::set<std::string> non_signals_;
  std::map<std::string, std::string> unresolved_;
};

}  // namespace

// ---------------------------------------------------------------------------

const NamedConnection* Instantiation::find(std::string_view port) const {
  for (const auto& c : connections) {
    if (c.port == port) return &c;
  }
  return nullptr;
}

const Port* ParsedModule::find_port(std::string_view port) const {
  for (const auto& p : ports) {
    if (p.name == port) return &p;
  }
  return nullptr;
}

const Instantiation* ParsedModule::find_instance(std::string_view inst) const {
  for (const auto& i : instantiations) {
    if (i.instance_name == inst) return &i;
  }
  return nullptr;
}

std::string ParsedModule::residual_text() const {
  std::string out;
  for (const auto& s : segments) {
    if (s.kind == SegmentKind::residual) out += text.substr(s.span.begin, s.span.size());
  }
  return out;
}

namespace {

ParsedModule parse_unit(std::string_view unit, int line_base) {
  return UnitParser(unit, line_base).parse();
}

}  // namespace

std::vector<ParsedModule> parse_source(std::string_view source) {
  LineMap lines(source);
  Lexed lexed = lex(source, lines);
  std::vector<size_t> cuts;  // end offsets of each unit
  bool open = false;
  for (size_t k = 0; k < lexed.tokens.size(); ++k) {
    const Token& t = lexed.tokens[k];
    if (t.kind != Tok::ident) continue;
    if (t.text == "module" || t.text == "macromodule") {
      if (open) throw ParseError(lines.line(t.begin), lines.col(t.begin), "nested module declaration");
      open = true;
    } else if (t.text == "endmodule") {
      if (!open) throw ParseError(lines.line(t.begin), lines.col(t.begin), "'endmodule' without 'module'");
      open = false;
      size_t end = t.end;
      if (lexed.tokens[k + 1].kind == Tok::symbol && lexed.tokens[k + 1].text == ":") {
        end = lexed.tokens[k + 2].end;
      }
      cuts.push_back(end);
    }
  }
  if (open) {
    throw ParseError(lines.line(source.size()), lines.col(source.size()), "missing 'endmodule'");
  }
  if (cuts.empty()) throw ParseError(1, 1, "no module declaration found");
  cuts.back() = source.size();
  std::vector<ParsedModule> out;
  size_t begin = 0;
  for (size_t end : cuts) {
    out.push_back(parse_unit(source.substr(begin, end - begin), lines.line(begin)));
    begin = end;
  }
  return out;
}

ParsedModule parse_module(std::string_view unit) {
  auto all = parse_source(unit);
  if (all.size() != 1) {
    throw Error("expected exactly one module, found " + std::to_string(all.size()));
  }
  return std::move(all.front());
}

std::vector<Comment> comments(std::string_view source) {
  LineMap lines(source);
  return lex(source, lines).comments;
}

std::vector<Module> import_leaf(std::string_view source) {
  std::vector<Module> out;
  std::set<std::string> names;
  for (auto& p : parse_source(source)) {
    if (!names.insert(p.name).second) {
      throw ParseError(p.header_line, 1, "duplicate module '" + p.name + "'");
    }
    Module m;
    m.name = p.name;
    m.kind = ModuleKind::leaf;
    m.ports = p.ports;
    m.source = p.text;
    m.format = SourceFormat::verilog;
    out.push_back(std::move(m));
  }
  return out;
}

ParsedModule extract_instantiations(const Module& leaf) {
  if (!leaf.is_leaf()) throw Error("module '" + leaf.name + "' is not a leaf");
  if (leaf.format != SourceFormat::verilog) {
    throw Error("module '" + leaf.name + "': opaque leaf, cannot parse");
  }
  // parsed sources are cached; leaves are reparsed often by reachability and
  // provenance queries
  static std::mutex mu;
  static std::unordered_map<std::string, std::shared_ptr<const ParsedModule>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(leaf.source);
    if (it != cache.end()) return *it->second;
  }
  auto parsed = std::make_shared<const ParsedModule>(parse_module(leaf.source));
  std::lock_guard<std::mutex> lock(mu);
  if (cache.size() > 4096) cache.clear();
  cache.emplace(leaf.source, parsed);
  return *parsed;
}

Module lift_structural(const Module& leaf) {
  ParsedModule p = extract_instantiations(leaf);
  for (const auto& s : p.statements) {
    if (s.kind != Statement::Kind::instantiation) {
      throw Error("module '" + leaf.name + "' is not purely structural");
    }
  }
  Module g;
  g.name = leaf.name;
  g.kind = ModuleKind::grouped;
  g.ports = p.ports;
  g.interfaces = leaf.interfaces;
  g.metadata = leaf.metadata;
  for (const auto& n : p.nets) g.wires.push_back({n.name, n.width});
  for (const auto& inst : p.instantiations) {
    if (inst.positional) {
      throw Error("module '" + leaf.name + "': positional connections on '" + inst.instance_name + "'");
    }
    if (!inst.parameters.empty()) {
      throw Error("module '" + leaf.name + "': parameter overrides on '" + inst.instance_name + "'");
    }
    Instance i;
    i.instance_name = inst.instance_name;
    i.module_name = inst.module_name;
    for (const auto& c : inst.connections) {
      if (c.expr.empty()) continue;
      if (!is_identifier(c.expr) && !is_sized_constant(c.expr)) {
        throw Error("module '" + leaf.name + "': connection ." + c.port + "(" + c.expr +
                    ") is not an identifier or sized constant");
      }
      i.connections[c.port] = c.expr;
    }
    g.submodules.push_back(std::move(i));
  }
  return g;
}

long long eval_constant(std::string_view expr, const std::map<std::string, long long>& params) {
  LineMap lines(expr);
  Lexed lexed = lex(expr, lines);
  try {
    return ConstEval(lexed.tokens, 0, lexed.tokens.size() - 1, params).run();
  } catch (const Unresolved& u) {
    throw Error("unresolved parameter '" + u.name + "'");
  }
}

// ---------------------------------------------------------------------------
// rewriting

std::string range(int width) {
  return width == 1 ? std::string() : "[" + std::to_string(width - 1) + ":0] ";
}

std::string declaration(const Port& port) {
  std::string dir = port.direction == Direction::in    ? "input"
                    : port.direction == Direction::out ? "output"
                                                       : "inout";
  return dir + " wire " + range(port.width) + port.name;
}

Rewriter::Rewriter(const ParsedModule& parsed) : parsed_(parsed) {}

void Rewriter::edit(size_t begin, size_t end, std::string text) {
  for (const auto& e : edits_) {
    if (begin < e.end && e.begin < end) throw Error("overlapping edits in module '" + parsed_.name + "'");
  }
  edits_.push_back({begin, end, std::move(text), order_++});
}

void Rewriter::rename_module(const std::string& new_name) {
  if (!new_name_.empty()) throw Error("module renamed twice");
  new_name_ = new_name;
  edit(parsed_.name_span.begin, parsed_.name_span.end, new_name);
}

namespace {

bool used_name(const ParsedModule& p, const std::vector<std::string>& taken, const std::string& n) {
  return std::binary_search(p.identifiers.begin(), p.identifiers.end(), n) ||
         std::find(taken.begin(), taken.end(), n) != taken.end() || is_keyword(n);
}

}  // namespace

void Rewriter::add_ports(const std::vector<Port>& ports) {
  for (const auto& p : ports) {
    if (!is_identifier(p.name)) throw Error("invalid port name '" + p.name + "'");
    // names handed out by fresh() are reserved for the caller
    const bool reserved = std::find(taken_.begin(), taken_.end(), p.name) != taken_.end();
    const bool added = std::find(new_port_names_.begin(), new_port_names_.end(), p.name) !=
                       new_port_names_.end();
    if (added || used_name(parsed_, {}, p.name) || (!reserved && used_name(parsed_, taken_, p.name))) {
      throw Error("name collision: '" + p.name + "' already used in module '" + parsed_.name + "'");
    }
    if (p.width < 1) throw Error("port '" + p.name + "' has non-positive width");
    if (!reserved) taken_.push_back(p.name);
    new_port_decls_.push_back(declaration(p));
    new_port_names_.push_back(p.name);
  }
}

void Rewriter::add_wire(const std::string& name, int width) {
  if (used_name(parsed_, taken_, name) &&
      std::find(taken_.begin(), taken_.end(), name) == taken_.end()) {
    throw Error("name collision: '" + name + "' already used in module '" + parsed_.name + "'");
  }
  if (std::find(taken_.begin(), taken_.end(), name) == taken_.end()) taken_.push_back(name);
  new_wires_.push_back("wire " + range(width) + name + ";");
}

void Rewriter::add_assign(const std::string& lhs, const std::string& rhs) {
  new_assigns_.push_back("assign " + lhs + " = " + rhs + ";");
}

void Rewriter::remove_instance(const std::string& instance_name) {
  const Instantiation* inst = parsed_.find_instance(instance_name);
  if (!inst) throw Error("no instance '" + instance_name + "' in module '" + parsed_.name + "'");
  const std::string& s = parsed_.text;
  size_t b = inst->span.begin;
  size_t e = inst->span.end;
  size_t lb = b;
  while (lb > 0 && (s[lb - 1] == ' ' || s[lb - 1] == '\t')) --lb;
  size_t le = e;
  while (le < s.size() && (s[le] == ' ' || s[le] == '\t' || s[le] == '\r')) ++le;
  if ((lb == 0 || s[lb - 1] == '\n') && (le == s.size() || s[le] == '\n')) {
    b = lb;
    e = le < s.size() ? le + 1 : le;
  }
  edit(b, e, "");
}

void Rewriter::replace_connection(const std::string& instance_name, const std::string& port,
                                  const std::string& new_expr) {
  const Instantiation* inst = parsed_.find_instance(instance_name);
  if (!inst) throw Error("no instance '" + instance_name + "' in module '" + parsed_.name + "'");
  const NamedConnection* c = inst->find(port);
  if (!c) {
    throw Error("instance '" + instance_name + "' has no named connection for port '" + port + "'");
  }
  if (c->implicit) {
    edit(c->expr_span.begin, c->expr_span.end, "(" + new_expr + ")");
  } else {
    edit(c->expr_span.begin, c->expr_span.end, new_expr);
  }
}

std::string Rewriter::fresh(const std::string& base) {
  std::string name = base;
  for (int n = 1; used_name(parsed_, taken_, name); ++n) name = base + "_" + std::to_string(n);
  taken_.push_back(name);
  return name;
}

std::string Rewriter::str() const {
  std::vector<Edit> all = edits_;
  int order = order_;
  const std::string& s = parsed_.text;
  if (!new_port_decls_.empty()) {
    if (parsed_.ansi) {
      std::string list;
      for (size_t k = 0; k < new_port_decls_.size(); ++k) {
        list += (k ? ",\n  " : "") + new_port_decls_[k];
      }
      if (parsed_.port_list_open == ParsedModule::npos) {
        // `module m;` gains a port list before the ';'
        size_t semi = parsed_.header.end - 1;
        all.push_back({semi, semi, " (\n  " + list + "\n)", order++});
      } else if (parsed_.port_list_last == ParsedModule::npos) {
        all.push_back({parsed_.port_list_close, parsed_.port_list_close, "\n  " + list + "\n", order++});
      } else {
        all.push_back({parsed_.port_list_last, parsed_.port_list_last, ",\n  " + list, order++});
      }
    } else {
      std::string names;
      for (const auto& n : new_port_names_) names += ", " + n;
      all.push_back({parsed_.port_list_last, parsed_.port_list_last, names, order++});
    }
  }
  std::string after_header;
  if (!parsed_.ansi) {
    for (const auto& d : new_port_decls_) after_header += "\n  " + d + ";";
  }
  for (const auto& w : new_wires_) after_header += "\n  " + w;
  if (!after_header.empty()) all.push_back({parsed_.header.end, parsed_.header.end, after_header, order++});
  if (!new_assigns_.empty()) {
    std::string text;
    size_t at = parsed_.endmodule;
    if (at > 0 && s[at - 1] != '\n') text += "\n";
    for (const auto& a : new_assigns_) text += "  " + a + "\n";
    all.push_back({at, at, text, order++});
  }
  std::sort(all.begin(), all.end(), [](const Edit& a, const Edit& b) {
    if (a.begin != b.begin) return a.begin > b.begin;
    if (a.end != b.end) return a.end > b.end;
    return a.order > b.order;
  });
  std::string out = s;
  for (const auto& e : all) out.replace(e.begin, e.end - e.begin, e.text);
  return out;
}

std::string rewrite_add_ports(const ParsedModule& parsed, const std::vector<Port>& new_ports) {
  Rewriter r(parsed);
  r.add_ports(new_ports);
  return r.str();
}

std::string rewrite_route_to_port(const ParsedModule& parsed, const std::string& expr,
                                  const Port& port) {
  if (port.direction == Direction::inout) throw Error("cannot route to inout port '" + port.name + "'");
  Rewriter r(parsed);
  r.add_ports({port});
  if (port.direction == Direction::out) {
    r.add_assign(port.name, expr);
  } else {
    r.add_assign(expr, port.name);
  }
  return r.str();
}

std::string rewrite_externalize_connection(const ParsedModule& parsed,
                                           const std::string& instance_name,
                                           const std::string& instance_port,
                                           const Port& new_port) {
  const Instantiation* inst = parsed.find_instance(instance_name);
  if (!inst) throw Error("no instance '" + instance_name + "' in module '" + parsed.name + "'");
  const NamedConnection* c = inst->find(instance_port);
  if (!c) throw Error("instance '" + instance_name + "' has no connection for '" + instance_port + "'");
  if (is_sized_constant(c->expr)) return parsed.text;
  if (new_port.direction == Direction::inout) {
    throw Error("cannot externalize through inout port '" + new_port.name + "'");
  }
  Rewriter r(parsed);
  r.add_ports({new_port});
  std::string wire = r.fresh("w_" + new_port.name);
  r.add_wire(wire, new_port.width);
  r.replace_connection(instance_name, instance_port, wire);
  if (new_port.direction == Direction::out) {
    r.add_assign(new_port.name, wire);
  } else {
    r.add_assign(wire, new_port.name);
  }
  return r.str();
}

}  // namespace hlps::verilog
