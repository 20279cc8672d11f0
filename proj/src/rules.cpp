// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/rules.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <regex>
#include <set>
#include <sstream>

#include "hlps/verilog.hpp"

namespace hlps {

namespace {

std::string regex_escape(std::string_view s) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

bool valid_regex(const std::string& re, std::string* why) {
  try {
    std::regex r(re);
    return true;
  } catch (const std::regex_error& e) {
    if (why) *why = e.what();
    return false;
  }
}

// Returns an error message, or empty when the rule is well-formed.
std::string validate(const InterfaceRule& r) {
  std::string why;
  if (!valid_regex(r.module_pattern, &why)) return "bad module pattern: " + why;
  if (r.port_pattern.empty()) return "missing pattern";
  if (!r.polarity.empty() && r.polarity != "high" && r.polarity != "low") {
    return "active must be 'high' or 'low'";
  }
  const bool bundled = r.kind == InterfaceType::handshake || r.kind == InterfaceType::feedforward;
  if (bundled) {
    if (r.port_pattern.find("{bundle}") == std::string::npos || r.port_pattern.find("{role}") == std::string::npos) {
      return "pattern must contain {bundle} and {role}";
    }
    if (r.kind == InterfaceType::handshake && (!r.role_map.count("valid") || !r.role_map.count("ready"))) {
      return "handshake rules need role.valid and role.ready";
    }
    if (!r.role_map.count("data")) return "missing role.data";
    for (const auto& [role, re] : r.role_map) {
      if (role != "valid" && role != "ready" && role != "data" && role != "clk") {
        return "unknown role '" + role + "'";
      }
      if (r.kind == InterfaceType::feedforward && (role == "valid" || role == "ready")) {
        return "feedforward rules have no " + role + " role";
      }
      if (!valid_regex(re, &why)) return "bad regex for role." + role + ": " + why;
    }
  } else {
    if (!r.role_map.empty()) return "roles are only meaningful for handshake and feedforward rules";
    if (!valid_regex(r.port_pattern, &why)) return "bad port pattern: " + why;
  }
  return {};
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\''))) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> template_splits(std::string_view tpl,
                                                                 std::string_view name) {
  // pieces: literal text, or one of the two placeholders
  struct Piece {
    int kind;  // 0 literal, 1 bundle, 2 role
    std::string text;
  };
  std::vector<Piece> pieces;
  size_t i = 0;
  while (i < tpl.size()) {
    if (tpl.substr(i, 8) == "{bundle}") {
      pieces.push_back({1, ""});
      i += 8;
    } else if (tpl.substr(i, 6) == "{role}") {
      pieces.push_back({2, ""});
      i += 6;
    } else {
      if (pieces.empty() || pieces.back().kind != 0) pieces.push_back({0, ""});
      pieces.back().text += tpl[i++];
    }
  }
  std::vector<std::pair<std::string, std::string>> out;
  std::string bundle, role;
  std::function<void(size_t, size_t)> rec = [&](size_t p, size_t at) {
    if (p == pieces.size()) {
      if (at == name.size()) out.emplace_back(bundle, role);
      return;
    }
    const Piece& piece = pieces[p];
    if (piece.kind == 0) {
      if (name.substr(at, piece.text.size()) == piece.text) rec(p + 1, at + piece.text.size());
      return;
    }
    std::string& slot = piece.kind == 1 ? bundle : role;
    for (size_t len = 1; at + len <= name.size(); ++len) {
      slot = std::string(name.substr(at, len));
      rec(p + 1, at + len);
    }
    slot.clear();
  };
  rec(0, 0);
  return out;
}

// ---------------------------------------------------------------------------
// pragmas

std::vector<InterfaceRule> parse_pragmas(std::string_view source, std::vector<Diagnostic>* diags) {
  std::vector<InterfaceRule> out;
  auto units = verilog::parse_source(source);
  std::vector<std::pair<size_t, std::string>> unit_ends;  // end offset -> module
  size_t offset = 0;
  for (const auto& u : units) {
    offset += u.text.size();
    unit_ends.emplace_back(offset, u.name);
  }
  auto report = [&](int line, const std::string& module, Severity s, const std::string& msg) {
    if (diags) diags->push_back({module + ":" + std::to_string(line), "pragma", s, msg});
  };
  for (const auto& c : verilog::comments(source)) {
    std::istringstream words(c.text);
    std::string first;
    words >> first;
    if (first != "pragma") continue;
    std::string module;
    for (const auto& [end, name] : unit_ends) {
      if (c.span.begin < end) {
        module = name;
        break;
      }
    }
    std::string kind;
    words >> kind;
    InterfaceRule rule;
    try {
      rule.kind = interface_type_from_string(kind);
    } catch (const Error&) {
      report(c.line, module, Severity::info, "ignoring pragma '" + kind + "'");
      continue;
    }
    rule.module_pattern = regex_escape(module);
    rule.origin = "pragma";
    rule.line = c.line;
    std::string word, error;
    while (words >> word) {
      size_t eq = word.find('=');
      if (eq == std::string::npos || eq == 0) {
        error = "expected key=value, found '" + word + "'";
        break;
      }
      std::string key = word.substr(0, eq);
      std::string value = unquote(word.substr(eq + 1));
      if (key == "pattern") {
        rule.port_pattern = value;
      } else if (key.rfind("role.", 0) == 0 && key.size() > 5) {
        rule.role_map[key.substr(5)] = value;
      } else if (key == "active") {
        rule.polarity = value;
      } else {
        error = "unknown pragma field '" + key + "'";
        break;
      }
    }
    if (error.empty()) error = validate(rule);
    if (!error.empty()) {
      report(c.line, module, Severity::error, "malformed pragma: " + error);
      continue;
    }
    out.push_back(std::move(rule));
  }
  return out;
}

// ---------------------------------------------------------------------------
// rule files

namespace {

class RuleFileParser {
 public:
  RuleFileParser(std::string_view text, std::string origin) : s_(text), origin_(std::move(origin)) {}

  std::vector<InterfaceRule> parse() {
    std::vector<InterfaceRule> out;
    while (true) {
      skip();
      if (i_ >= s_.size()) break;
      const int line = line_;
      std::string call = ident();
      expect('(');
      std::map<std::string, std::string> args;
      std::map<std::string, std::string> roles;
      skip();
      while (peek() != ')') {
        std::string key = ident();
        expect('=');
        skip();
        if (peek() == '{') {
          if (key != "role") fail("only 'role' takes a mapping");
          roles = mapping();
        } else {
          if (args.count(key)) fail("duplicate argument '" + key + "'");
          args[key] = value();
        }
        skip();
        if (peek() == ',') {
          ++i_;
          skip();
        } else if (peek() != ')') {
          fail("expected ',' or ')'");
        }
      }
      ++i_;
      InterfaceRule rule;
      rule.origin = origin_;
      rule.line = line;
      auto take = [&](const char* k) -> std::string {
        auto it = args.find(k);
        if (it == args.end()) return {};
        std::string v = it->second;
        args.erase(it);
        return v;
      };
      rule.module_pattern = take("module");
      if (rule.module_pattern.empty()) rule.module_pattern = ".*";
      if (call == "add_handshake" || call == "add_feedforward") {
        rule.kind = call == "add_handshake" ? InterfaceType::handshake : InterfaceType::feedforward;
        rule.port_pattern = take("pattern");
        rule.role_map = roles;
      } else if (call == "add_reset" || call == "add_clock" || call == "add_false_path") {
        rule.kind = call == "add_reset"   ? InterfaceType::reset
                    : call == "add_clock" ? InterfaceType::clock
                                          : InterfaceType::false_path;
        rule.port_pattern = take("port");
        if (!roles.empty()) fail(call + " takes no roles");
      } else {
        fail("unknown rule '" + call + "'", line);
      }
      rule.polarity = take("active");
      if (!args.empty()) fail("unknown argument '" + args.begin()->first + "'", line);
      std::string err = validate(rule);
      if (!err.empty()) fail(err, line);
      out.push_back(std::move(rule));
      skip();
      if (peek() == ';') ++i_;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what, int line = 0) const {
    throw Error(origin_ + ":" + std::to_string(line ? line : line_) + ": " + what);
  }
  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
  void skip() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\n') {
        ++line_;
        ++i_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }
  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  std::string ident() {
    skip();
    size_t b = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    if (b == i_) fail("expected a name");
    return std::string(s_.substr(b, i_ - b));
  }
  std::string value() {
    skip();
    char q = peek();
    if (q == '"' || q == '\'') {
      ++i_;
      std::string out;
      while (i_ < s_.size() && s_[i_] != q) {
        if (s_[i_] == '\n') fail("unterminated string");
        if (s_[i_] == '\\' && i_ + 1 < s_.size() && (s_[i_ + 1] == q || s_[i_ + 1] == '\\')) ++i_;
        out += s_[i_++];
      }
      if (i_ >= s_.size()) fail("unterminated string");
      ++i_;
      return out;
    }
    // bare identifier: a literal name
    return regex_escape(ident());
  }
  std::map<std::string, std::string> mapping() {
    std::map<std::string, std::string> out;
    expect('{');
    skip();
    while (peek() != '}') {
      skip();
      std::string key;
      if (peek() == '"' || peek() == '\'') {
        key = value();
      } else {
        key = ident();
      }
      expect(':');
      out[key] = value();
      skip();
      if (peek() == ',') {
        ++i_;
        skip();
      } else if (peek() != '}') {
        fail("expected ',' or '}'");
      }
    }
    ++i_;
    return out;
  }

  std::string_view s_;
  std::string origin_;
  size_t i_ = 0;
  int line_ = 1;
};

}  // namespace

std::vector<InterfaceRule> parse_rule_file(std::string_view text, const std::string& origin) {
  return RuleFileParser(text, origin).parse();
}

// ---------------------------------------------------------------------------
// application

namespace {

class RuleApplier {
 public:
  RuleApplier(Module& m, std::vector<Diagnostic>* diags) : m_(m), diags_(diags) {
    for (const auto& iface : m.interfaces) {
      for (const auto& p : iface.members()) claimed_.insert(p);
    }
  }

  void apply(const InterfaceRule& r) {
    const std::regex re(r.module_pattern);
    if (!std::regex_match(m_.name, re)) return;
    switch (r.kind) {
      case InterfaceType::handshake: handshake(r); break;
      case InterfaceType::feedforward: feedforward(r); break;
      default: single(r); break;
    }
  }

 private:
  void warn(const std::string& msg) {
    if (diags_) diags_->push_back({m_.name, "rule", Severity::warning, msg});
  }

  std::vector<const Port*> available() const {
    std::vector<const Port*> out;
    for (const auto& p : m_.ports) {
      if (p.direction != Direction::inout && !claimed_.count(p.name)) out.push_back(&p);
    }
    return out;
  }

  std::string clk_port(const InterfaceRule& r) const {
    auto it = r.role_map.find("clk");
    if (it == r.role_map.end()) return {};
    const std::regex re(it->second);
    for (const auto& p : m_.ports) {
      if (p.direction == Direction::in && std::regex_match(p.name, re)) return p.name;
    }
    return {};
  }

  // Longest role suffix matching `re` wins.
  static std::optional<std::pair<std::string, std::string>> anchor(
      const std::vector<std::pair<std::string, std::string>>& splits, const std::regex& re) {
    std::optional<std::pair<std::string, std::string>> best;
    for (const auto& s : splits) {
      if (!std::regex_match(s.second, re)) continue;
      if (!best || s.second.size() > best->second.size()) best = s;
    }
    return best;
  }

  void handshake(const InterfaceRule& r) {
    const std::regex valid_re(r.role_map.at("valid"));
    const std::regex ready_re(r.role_map.at("ready"));
    const std::regex data_re(r.role_map.at("data"));
    struct Bundle {
      std::vector<const Port*> valid, ready, data;
      size_t first = 0;
    };
    std::map<std::string, Bundle> bundles;
    std::set<std::string> anchors;
    auto ports = available();
    for (size_t k = 0; k < ports.size(); ++k) {
      const Port* p = ports[k];
      auto splits = template_splits(r.port_pattern, p->name);
      if (auto v = anchor(splits, valid_re)) {
        auto& b = bundles[v->first];
        if (b.valid.empty() && b.ready.empty()) b.first = k;
        b.valid.push_back(p);
        anchors.insert(p->name);
      } else if (auto rd = anchor(splits, ready_re)) {
        auto& b = bundles[rd->first];
        if (b.valid.empty() && b.ready.empty()) b.first = k;
        b.ready.push_back(p);
        anchors.insert(p->name);
      }
    }
    std::set<std::string> complete;
    for (auto& [name, b] : bundles) {
      if (b.valid.size() != 1 || b.ready.size() != 1) {
        warn("bundle '" + name + "' is incomplete (" + std::to_string(b.valid.size()) + " valid, " +
             std::to_string(b.ready.size()) + " ready); no interface emitted");
        continue;
      }
      const Port* v = b.valid.front();
      const Port* rd = b.ready.front();
      if (v->width != 1 || rd->width != 1 || v->direction == rd->direction) {
        warn("bundle '" + name + "': valid/ready must be 1-bit with opposing directions");
        continue;
      }
      complete.insert(name);
    }
    for (const Port* p : ports) {
      if (anchors.count(p->name)) continue;
      std::string best;
      bool found = false;
      for (const auto& [bundle, role] : template_splits(r.port_pattern, p->name)) {
        if (!complete.count(bundle) || !std::regex_match(role, data_re)) continue;
        if (!found || bundle.size() > best.size()) best = bundle;
        found = true;
      }
      if (!found) continue;
      auto& b = bundles[best];
      if (p->direction != b.valid.front()->direction) {
        warn("port '" + p->name + "' matches bundle '" + best + "' but opposes its valid direction");
        continue;
      }
      b.data.push_back(p);
    }
    std::vector<std::pair<size_t, std::string>> order;
    for (const auto& name : complete) order.emplace_back(bundles[name].first, name);
    std::sort(order.begin(), order.end());
    const std::string clk = clk_port(r);
    for (const auto& [_, name] : order) {
      const Bundle& b = bundles[name];
      InterfaceSpec s;
      s.type = InterfaceType::handshake;
      for (const Port* d : b.data) s.data.push_back(d->name);
      s.valid = b.valid.front()->name;
      s.ready = b.ready.front()->name;
      s.clk = clk;
      for (const auto& p : s.members()) claimed_.insert(p);
      m_.interfaces.push_back(std::move(s));
    }
  }

  void feedforward(const InterfaceRule& r) {
    const std::regex data_re(r.role_map.at("data"));
    std::map<std::string, std::vector<const Port*>> bundles;
    std::vector<std::string> order;
    for (const Port* p : available()) {
      auto a = anchor(template_splits(r.port_pattern, p->name), data_re);
      if (!a) continue;
      if (!bundles.count(a->first)) order.push_back(a->first);
      bundles[a->first].push_back(p);
    }
    const std::string clk = clk_port(r);
    for (const auto& name : order) {
      const auto& ports = bundles[name];
      if (std::any_of(ports.begin(), ports.end(),
                      [&](const Port* p) { return p->direction != ports.front()->direction || p->name == clk; })) {
        warn("bundle '" + name + "' mixes directions; no interface emitted");
        continue;
      }
      InterfaceSpec s;
      s.type = InterfaceType::feedforward;
      for (const Port* p : ports) s.data.push_back(p->name);
      s.clk = clk;
      for (const auto& p : s.members()) claimed_.insert(p);
      m_.interfaces.push_back(std::move(s));
    }
  }

  void single(const InterfaceRule& r) {
    const std::regex re(r.port_pattern);
    for (const Port* p : available()) {
      if (!std::regex_match(p->name, re)) continue;
      InterfaceSpec s;
      s.type = r.kind;
      s.ports = {p->name};
      if (r.kind == InterfaceType::reset) s.active = r.polarity;
      claimed_.insert(p->name);
      m_.interfaces.push_back(std::move(s));
    }
  }

  Module& m_;
  std::vector<Diagnostic>* diags_;
  std::set<std::string> claimed_;
};

}  // namespace

DesignIR apply_rules(const std::vector<InterfaceRule>& rules, const DesignIR& design,
                     std::vector<Diagnostic>* diags) {
  DesignIR out = design;
  for (auto& [name, m] : out.modules) {
    RuleApplier applier(m, diags);
    for (const auto& r : rules) applier.apply(r);
  }
  return out;
}

}  // namespace hlps
