// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hlps/drc.hpp"
#include "hlps/ir.hpp"

/// Transformation passes. Each takes a design by const reference and returns
/// a new one; DRC-clean inputs give DRC-clean outputs.
namespace hlps::passes {

struct PassReport {
  std::string pass;
  std::vector<std::string> created;  // element ids
  std::vector<std::string> removed;
  std::vector<std::pair<std::string, std::string>> renamed;  // old id, new id
  std::vector<Diagnostic> diagnostics;
};

nlohmann::json to_json(const PassReport& report);

struct PassResult {
  DesignIR design;
  PassReport report;
};

/// Turns a Verilog leaf into a grouped module holding each extracted instance
/// plus `<name>_aux`, a leaf with the residual logic. Every connected port of
/// an extracted instance is mirrored on the aux as `<inst>_<port>` with the
/// opposite direction and tied to the original expression by an assign.
PassResult rebuild(const DesignIR& design, const std::string& module);

/// Converts a purely structural Verilog leaf (declarations and instantiations
/// only) into the equivalent grouped module, with no aux. Clock/reset nets
/// fanning out to several child clock/reset ports get a broadcast cell.
PassResult lift(const DesignIR& design, const std::string& module);

/// Completes interface specs to a fixpoint: grouped modules inherit specs of
/// child interfaces wired straight to their ports, and single-use leaves
/// inherit the mirror image of a peer's interface when all its ports face
/// that leaf. Existing specs are never changed.
PassResult infer_interfaces(const DesignIR& design);

/// Splits a leaf by port connectivity (clock and reset excluded) into
/// wrapper leaves `<leaf>_split<k>` that each instantiate the leaf with one
/// component's ports exposed. With more than one split, `<leaf>_cr_bcast`
/// exposes the clock/reset ports and fans clock/reset inputs out to the
/// splits. Opaque leaves need `metadata.extra.connectivity`: a list of port
/// groups known to be connected.
PassResult partition(const DesignIR& design, const std::string& leaf);

/// Removes every instance that only forwards whole interfaces from inputs to
/// outputs and wires its peers directly, until nothing changes.
PassResult passthrough(const DesignIR& design);

/// Inlines all grouped descendants of `module`. An inner instance `Y` of an
/// inlined instance `X` becomes `X__Y` (just `X` when `Y == X`).
PassResult flatten(const DesignIR& design, const std::string& module);

struct HelperInstance {
  std::string instance_name;
  std::string module_name;
  /// helper port -> wrapper port, internal net, sized constant
  std::map<std::string, std::string> connections;
};

struct WrapTemplate {
  std::string wrapper_name;
  std::vector<Port> ports;
  std::vector<InterfaceSpec> interfaces;
  /// Every port of the wrapped module -> wrapper port, internal net, sized
  /// constant, or empty for an open port.
  std::map<std::string, std::string> inner;
  std::vector<Wire> nets;
  std::vector<HelperInstance> helpers;
  /// Wrapper port -> value in the parent. Ports absent here take the parent
  /// connection of the wrapped port bound to them, if any.
  std::map<std::string, std::string> parent_connections;
  std::string inner_instance;  // defaults to the wrapped instance name
  nlohmann::json extra = nlohmann::json::object();
};

/// Template that passes every port through unchanged.
WrapTemplate identity_template(const DesignIR& design, const std::string& parent,
                               const std::string& instance, const std::string& wrapper_name);

/// Replaces `parent/instance` by an instance of a new grouped wrapper.
PassResult wrap(const DesignIR& design, const std::string& parent, const std::string& instance,
                const WrapTemplate& tpl);

/// Moves sibling instances into a new grouped module; nets crossing the group
/// boundary become its ports.
PassResult group(const DesignIR& design, const std::string& parent,
                 const std::vector<std::string>& instances, const std::string& new_name);

/// Inlines one grouped instance into its parent.
PassResult inline_instance(const DesignIR& design, const std::string& parent,
                           const std::string& instance);

/// Runs a pass by name with JSON arguments, as written in run configs:
/// rebuild{module}, lift{module}, infer_interfaces{}, partition{leaf}, passthrough{},
/// flatten{module}, group{parent, instances, name}, wrap{parent, instance,
/// wrapper} (identity template).
PassResult run_pass(const DesignIR& design, const std::string& name, const nlohmann::json& args);

// ---------------------------------------------------------------------------
// helpers shared with the pipeline stage

/// Clock and reset ports of a module: members of clock/reset interfaces and
/// ports referenced as `clk` roles.
std::vector<std::string> clock_reset_ports(const Module& module);

/// Port-connectivity components of a leaf, clock/reset ports excluded, each
/// listed in port order and ordered by lowest member index.
std::vector<std::vector<std::string>> port_components(const Module& leaf);

/// Adds a sink on the clock/reset net feeding `parent/instance.port` and
/// returns the net name to connect the new sink to. Nets not driven by a
/// broadcast module get one interposed first. `design` is updated in place.
std::string tap_clock_reset(DesignIR& design, const std::string& parent, const std::string& instance,
                            const std::string& port);

/// Inserts a broadcast cell driving the fan-out net `net` of grouped module
/// `parent`. The original driver feeds the cell; the sinks move to its output
/// net, whose name is returned.
std::string insert_broadcast(DesignIR& design, const std::string& parent, const std::string& net);

/// Instances of `module` anywhere in the design as (parent, instance).
std::vector<std::pair<std::string, std::string>> instances_of(const DesignIR& design,
                                                              const std::string& module);

}  // namespace hlps::passes
