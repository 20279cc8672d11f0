// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hlps/drc.hpp"
#include "hlps/ir.hpp"

namespace hlps {

/// Declares interfaces on ports selected by name patterns.
///
/// Handshake and feedforward rules use a `port_pattern` template containing
/// `{bundle}` and `{role}`; `role_map` holds one regular expression per role
/// (`valid`, `ready`, `data`, optionally `clk`, the latter matched against
/// whole port names). Clock, reset and false-path rules use `port_pattern` as
/// a regular expression over whole port names and tag each match separately.
struct InterfaceRule {
  std::string module_pattern = ".*";
  InterfaceType kind = InterfaceType::handshake;
  std::string port_pattern;
  std::map<std::string, std::string> role_map;
  std::string polarity;  // "high", "low" or empty
  std::string origin;    // "pragma" or the rule file
  int line = 0;

  friend bool operator==(const InterfaceRule&, const InterfaceRule&) = default;
};

/// Rules from `// pragma <kind> pattern=<tpl> [role.<r>=<regex>]* [active=..]`
/// comments, each scoped to the module whose text contains it (pragmas before
/// a module belong to it). Malformed pragmas are reported in `diags`.
std::vector<InterfaceRule> parse_pragmas(std::string_view source,
                                         std::vector<Diagnostic>* diags = nullptr);

/// Parses a rule file: one call per rule, e.g.
///   add_reset(module=".*", port="rst|reset", active="high")
///   add_handshake(module=top, pattern="{bundle}_{role}",
///                 role={ready:"ready", valid:"valid", data:"in|out"})
/// `#` starts a comment; calls may span lines. A bare identifier value is a
/// literal name. Throws Error with the line number on malformed input.
std::vector<InterfaceRule> parse_rule_file(std::string_view text, const std::string& origin = "rules");

/// Applies rules in order; the first rule to claim a port wins, and ports
/// already in an interface are never touched.
DesignIR apply_rules(const std::vector<InterfaceRule>& rules, const DesignIR& design,
                     std::vector<Diagnostic>* diags = nullptr);

/// All (bundle, role) decompositions of `name` under a `{bundle}`/`{role}`
/// template.
std::vector<std::pair<std::string, std::string>> template_splits(std::string_view tpl,
                                                                 std::string_view name);

}  // namespace hlps
