// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hlps/ir.hpp"

namespace hlps {

/// A connection point inside a grouped module: an instance port, or one of
/// the module's own ports when `instance` is empty.
struct Endpoint {
  std::string instance;
  std::string port;

  bool is_parent() const { return instance.empty(); }
  std::string str() const { return instance.empty() ? port : instance + "." + port; }
  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

/// Identifier (wire or module port) -> endpoints on it. A module port's own
/// endpoint comes first.
using NetMap = std::map<std::string, std::vector<Endpoint>>;

NetMap build_nets(const Module& grouped);

/// The other endpoint of a two-endpoint net.
std::optional<Endpoint> peer(const NetMap& nets, const std::string& net, const Endpoint& self);

/// Port declaration behind an endpoint (nullptr if unresolved).
const Port* endpoint_port(const DesignIR& design, const Module& grouped, const Endpoint& e);

/// Direction as seen from inside the net: a module input drives the net like
/// an instance output does.
std::optional<Direction> driving_direction(const DesignIR& design, const Module& grouped,
                                           const Endpoint& e);

}  // namespace hlps
