// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hlps/ir.hpp"

/// Deterministic Verilog text for generated modules.
namespace hlps::codegen {

/// `module <name> (\n  input wire ...,\n ...\n);`
std::string header(const std::string& name, const std::vector<Port>& ports);

/// A named-connection instantiation; empty expressions render as `.p()`.
std::string instance(const std::string& module, const std::string& name,
                     const std::vector<std::pair<std::string, std::string>>& connections,
                     const std::string& indent = "  ");

/// Structural Verilog for a grouped module: wire declarations and instances.
/// Ports of submodules left unconnected render as `.p()`.
std::string grouped(const DesignIR& design, const Module& module);

/// A leaf wrapping one instance of `inner`. `exposed[k]` names the inner
/// port bound to a same-named wrapper port; other inner ports stay open.
/// `assigns` are appended as `assign lhs = rhs;`.
std::string wrapper(const std::string& name, const std::vector<Port>& ports, const Module& inner,
                    const std::string& inner_instance, const std::vector<std::string>& exposed,
                    const std::vector<std::pair<std::string, std::string>>& assigns = {});

}  // namespace hlps::codegen
