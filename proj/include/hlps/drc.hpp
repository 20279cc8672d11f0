// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hlps/ir.hpp"

namespace hlps {

enum class Severity { error, warning, info };

std::string_view to_string(Severity s);

/// One finding. `path` locates the element: "Mod", "Mod/inst", "Mod/inst.port"
/// or "Mod.wire_or_port".
struct Diagnostic {
  std::string path;
  std::string rule;  // "A1", "A2", "A3", "driver", "width", "dangling", "iface", ...
  Severity severity = Severity::error;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

nlohmann::json to_json(const Diagnostic& d);
std::string format(const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& diags);
size_t count(const std::vector<Diagnostic>& diags, Severity s);

/// Checks the IR invariants. Violations are returned, never thrown.
std::vector<Diagnostic> drc_check(const DesignIR& design);

}  // namespace hlps
