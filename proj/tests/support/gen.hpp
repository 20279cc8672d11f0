// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hlps/ir.hpp"
#include "hlps/floorplan.hpp"

namespace hlps::testing {

struct GenOptions {
  int max_modules = 40;
  bool clocks = true;        // clk/rst ports, fanned out through broadcast cells
  bool passthroughs = false;  // add pure-forwarding leaves between peers
  bool composite = false;    // add a Verilog leaf that instantiates other leaves
  bool annotations = true;   // resources, floorplans, device, provenance
  bool parent_interfaces = true;  // copy child specs onto exported bundles
};

/// A random DRC-clean design. Leaves are small ANSI Verilog modules whose
/// outputs are non-trivial functions of their inputs; grouped modules wire
/// matching bundles of their children point to point.
DesignIR random_design(std::mt19937& rng, const GenOptions& options = {});

/// Device with the given grid, uniform resources and boundary capacities.
VirtualDevice grid_device(int cols, int rows, double resource = 100, double boundary = 1000);

// ---------------------------------------------------------------------------
// flattened connectivity

struct FlatOptions {
  /// Instance paths treated as leaves even when grouped.
  std::set<std::string> opaque;
  /// Modules whose instances add no path component.
  std::set<std::string> transparent;
  /// Forwarding leaves to contract: their pure assigns join nets.
  std::set<std::string> contract;
  /// Maps (parent module, instance) to the name used in paths.
  std::function<std::string(const std::string&, const std::string&)> rename;
  bool split_double_underscore = false;  // "a__b" -> "a/b"
};

/// Every non-clock/reset net of the fully expanded design as the sorted list
/// of its leaf endpoints ("path.port", top ports as "^.port"). Nets with
/// fewer than two endpoints are dropped.
std::multiset<std::vector<std::string>> flat_nets(const DesignIR& design, const FlatOptions& options = {});

/// Paths of leaf instances in the expanded design, under `options`.
std::set<std::string> leaf_paths(const DesignIR& design, const FlatOptions& options = {});

/// Pure `assign a = b;` statements of a Verilog leaf as (a, b).
std::vector<std::pair<std::string, std::string>> pure_assigns(const Module& leaf);

// ---------------------------------------------------------------------------
// export and re-import

/// Exports Verilog, imports every file again and lifts the modules that were
/// grouped.
DesignIR reimport(const DesignIR& design);

// ---------------------------------------------------------------------------
// floorplanning

/// Random graph with up to `max_nodes` nodes on `device`.
floorplanner::PartitionGraph random_graph(std::mt19937& rng, const VirtualDevice& device, int max_nodes);

/// Violated constraints of `assignment`, computed from slot coordinates
/// and raw pair capacities: pins, per-slot resources, cut-line capacities,
/// non-pipelinable crossings.
std::vector<std::string> recheck(const floorplanner::PartitionGraph& graph, const VirtualDevice& device,
                                 const floorplanner::Limits& limits,
                                 const std::map<std::string, std::string>& assignment);

/// Σ weight · Manhattan distance, from slot coordinates.
double wirelength(const floorplanner::PartitionGraph& graph, const std::map<std::string, std::string>& assignment);

/// Exhaustive optimum over all assignments that are feasible;
/// nullopt when none does. Feasibility per `recheck`.
std::optional<double> brute_force_optimum(const floorplanner::PartitionGraph& graph, const VirtualDevice& device,
                                          const floorplanner::Limits& limits);

}  // namespace hlps::testing
