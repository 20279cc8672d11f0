// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hlps/drc.hpp"
#include "hlps/floorplan.hpp"
#include "hlps/ir.hpp"
#include "hlps/pipeline.hpp"

/// End-to-end flow: import, rebuild, infer, partition, flatten, group,
/// floorplan, pipeline, export.
namespace hlps::flow {

/// Run configuration, read from one YAML (or JSON) file. Paths are relative
/// to the file's directory.
///
///   top: LLM
///   sources: [llm.v, fifo.v]
///   rules: [rules.hlps]
///   resources: resources.yaml        # module -> {LUT: n, FF: n, ...}
///   device: ../devices/vp1552_like.yaml
///   limits: 0.7                      # or {LUT: 0.7, DSP: 0.8, ...}
///   rebuild: [LLM]
///   lift: [Layers]
///   partition: [LLM_aux]             # default: every aux module
///   passthrough: true
///   flatten: LLM                     # default: top
///   floorplan: {method: recursive, weight: bits, solver: "cbc {lp} ..."}
///   pipeline: {min_fifo_depth: 4, stage_override: {"SLOT_X0Y0|SLOT_X0Y1": 2}}
///   explore: {schedule: [0.5, 0.6, 0.7]}
///   output: out
///   time_limit: 400
///   jobs: 4
struct Config {
  std::filesystem::path base;
  std::string top;
  std::vector<std::string> sources;
  std::vector<std::string> rules;
  std::string resources;
  std::string device;
  floorplanner::Limits limits = floorplanner::Limits::uniform(0.7);
  std::vector<std::string> rebuild;
  std::vector<std::string> lift;
  std::vector<std::string> partition;
  bool partition_default = true;
  bool passthrough = true;
  std::string flatten;
  floorplanner::Method method = floorplanner::Method::recursive;
  floorplanner::Weight weight = floorplanner::Weight::bits;
  std::string solver;  // external solver command; embedded when empty
  double time_limit = 400;
  pipeline::PlanOptions pipeline;
  std::vector<double> schedule;
  std::string output = "out";
  std::string snapshot_dir;  // default <output>/snapshots
  int jobs = 1;

  std::filesystem::path resolve(const std::string& p) const;
};

Config load_config(const std::string& path);
Config config_from_json(const nlohmann::json& j, const std::filesystem::path& base);

/// Structured log sink: one JSON object per line.
class Log {
 public:
  explicit Log(std::ostream* out = nullptr) : out_(out) {}
  void write(nlohmann::json record);
  void diagnostics(const std::string& stage, const std::vector<Diagnostic>& diags);
  const std::vector<nlohmann::json>& records() const { return records_; }

 private:
  std::ostream* out_;
  std::vector<nlohmann::json> records_;
};

/// Stage (a): leaves from the sources (each tagged with its file and unit
/// index), pragmas then rule files, resource estimates, device.
DesignIR import_design(const Config& config, std::vector<Diagnostic>* diags = nullptr);

/// Stage (f): groups every component of instances joined by
/// non-pipelinable wires into `<module>_grp<k>`.
passes::PassResult group_unpipelinable(const DesignIR& design, const std::string& module);

struct FlowResult {
  int exit_code = 0;
  std::string failed_stage;
  std::string message;
  DesignIR design;
  std::vector<std::string> snapshots;
  floorplanner::FloorplanResult floorplan;
  pipeline::Plan plan;
  nlohmann::json report;
};

/// Runs every stage, writing a snapshot after each and artifacts under the
/// output directory: rtl/, constraints.xdc, design.dot, report.json. Stops
/// at the first stage that throws or leaves DRC errors.
FlowResult run_flow(const Config& config, Log& log);

struct ExploreResult {
  int exit_code = 0;
  std::string message;
  std::vector<floorplanner::ExplorePoint> points;
};

/// Stages (a)-(f), then one floorplan per schedule value; writes
/// explore.csv and explore.dot under the output directory.
ExploreResult run_explore(const Config& config, Log& log);

std::string explore_csv(const std::vector<floorplanner::ExplorePoint>& points);
std::string explore_dot(const std::vector<floorplanner::ExplorePoint>& points);

}  // namespace hlps::flow
