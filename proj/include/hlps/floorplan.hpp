// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlps/device.hpp"
#include "hlps/ilp.hpp"
#include "hlps/ir.hpp"

namespace hlps::floorplanner {

struct Edge {
  std::string a;
  std::string b;
  double weight = 0;
  bool pipelinable = true;
};

/// Instances of one flat grouped module and the wires between them.
struct PartitionGraph {
  std::vector<std::string> nodes;  // instance names, in instance order
  std::map<std::string, std::optional<Resources>> resources;
  std::map<std::string, std::string> pinned;  // instance -> slot
  std::vector<Edge> edges;                    // a precedes b in `nodes`
};

enum class Weight { bits, nets };

/// Builds the graph of `module` (the top if empty). Children must be leaves
/// or modules created by the group pass, which are treated as atomic nodes
/// with the summed resources of their leaves. Wires on clock/reset ports and
/// on parent ports are ignored.
PartitionGraph build_graph(const DesignIR& design, const std::string& module = {},
                           Weight weight = Weight::bits);

struct Limits {
  std::array<double, 5> fraction{1, 1, 1, 1, 1};
  static Limits uniform(double f) { return {{f, f, f, f, f}}; }
};

enum class Method { recursive, exact };

struct Options {
  Method method = Method::recursive;
  ilp::Options ilp;
  const ilp::Backend* backend = nullptr;  // embedded branch and bound when null
};

struct FloorplanResult {
  std::map<std::string, std::string> assignment;  // instance -> slot
  double objective = 0;                           // Σ weight · slot distance
  std::map<std::string, double> per_boundary_usage;  // cut-line name -> bits
  ilp::Status status = ilp::Status::unknown;
  std::string message;
  int solves = 0;
};

/// Recursive bipartitioning: the current region is cut along its longer
/// axis (vertical on ties) and a 0/1 ILP sends each node to one half,
/// minimizing the weight of edges crossing the cut line subject to per-half
/// resource limits and the line's wire capacity. Edges to nodes already
/// placed on one side of the line count toward both. Nodes joined by
/// non-pipelinable edges move together. `Method::exact` instead solves one
/// ILP over all slots, minimizing Σ weight · Manhattan distance; the
/// recursive method falls back to it when a cut has no feasible point.
FloorplanResult floorplan(const PartitionGraph& graph, const VirtualDevice& device, const Limits& limits,
                          const Options& options = {});

/// Σ weight · distance over edges, and crossing bits per cut line.
double objective_of(const PartitionGraph& graph, const VirtualDevice& device,
                    const std::map<std::string, std::string>& assignment);
std::map<std::string, double> line_usage(const PartitionGraph& graph, const VirtualDevice& device,
                                         const std::map<std::string, std::string>& assignment);

/// Constraint violations of an assignment, independent of how it was found:
/// unassigned or unknown nodes, pins, per-slot resources above the limit,
/// cut lines above capacity, non-pipelinable edges across slots.
std::vector<std::string> violations(const PartitionGraph& graph, const VirtualDevice& device,
                                    const Limits& limits, const std::map<std::string, std::string>& assignment);

/// Highest usage / capacity ratio over all slots and resource kinds.
double max_utilization(const PartitionGraph& graph, const VirtualDevice& device,
                       const std::map<std::string, std::string>& assignment);

struct ExplorePoint {
  double limit = 0;
  FloorplanResult result;
  double max_utilization = 0;
  double wirelength = 0;
  bool pareto = false;
};

/// One floorplan per uniform limit, solved on up to `jobs` threads. Pareto
/// points minimize (max utilization, wirelength) among feasible results.
std::vector<ExplorePoint> explore(const PartitionGraph& graph, const VirtualDevice& device,
                                  const std::vector<double>& schedule, const Options& options = {},
                                  int jobs = 1);

/// Copies the assignment into the instances' floorplan metadata.
void apply(DesignIR& design, const std::string& module, const FloorplanResult& result);

nlohmann::json to_json(const FloorplanResult& result);
nlohmann::json to_json(const PartitionGraph& graph);

}  // namespace hlps::floorplanner
