// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hlps/drc.hpp"
#include "hlps/flow.hpp"
#include "hlps/passes.hpp"
#include "hlps/serialize.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::string snapshot_dir;
  std::optional<double> time_limit;
  std::optional<int> jobs;
};

hlps::flow::Config load(const Overrides& o) {
  if (o.config.empty()) throw hlps::Error("--config is required");
  hlps::flow::Config c = hlps::flow::load_config(o.config);
  if (!o.out.empty()) c.output = std::filesystem::absolute(o.out).string();
  if (!o.snapshot_dir.empty()) c.snapshot_dir = std::filesystem::absolute(o.snapshot_dir).string();
  if (o.time_limit) c.time_limit = *o.time_limit;
  if (o.jobs) c.jobs = *o.jobs;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hlps: high-level physical synthesis on a coarse-grained design IR"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config, "run configuration (YAML or JSON)");
  app.add_option("--out", o.out, "output directory (overrides the config)");
  app.add_option("--snapshot-dir", o.snapshot_dir, "directory for per-stage IR snapshots");
  app.add_option("--time-limit", o.time_limit, "seconds per ILP solve (default 400)");
  app.add_option("--jobs", o.jobs, "worker threads for exploration");

  auto* run = app.add_subcommand("run", "run the full flow");
  auto* explore = app.add_subcommand("explore", "sweep utilization limits and report Pareto points");

  auto* pass = app.add_subcommand("pass", "apply one pass to an IR file");
  std::string pass_name;
  std::string in_path;
  std::string args_text = "{}";
  std::string pass_out;
  pass->add_option("name", pass_name, "pass name")->required();
  pass->add_option("--in", in_path, "input IR (.json/.yaml)")->required();
  pass->add_option("--args", args_text, "pass arguments as a JSON object");
  pass->add_option("--to", pass_out, "output IR path (default: stdout as JSON)");

  auto* check = app.add_subcommand("check", "run DRC on an IR file");
  std::string check_path;
  check->add_option("ir", check_path, "IR file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      hlps::flow::Config c = load(o);
      hlps::flow::Log log(&std::cerr);
      auto r = hlps::flow::run_flow(c, log);
      if (r.exit_code != 0) {
        std::cerr << "hlps: stage " << r.failed_stage << ": " << r.message << "\n";
        return r.exit_code;
      }
      std::cout << "floorplan " << hlps::ilp::to_string(r.floorplan.status) << ", objective " << r.floorplan.objective
                << ", " << r.report["pipeline"]["inserted"].size() << " pipeline helpers; artifacts in "
                << c.resolve(c.output).string() << "\n";
      return 0;
    }
    if (*explore) {
      hlps::flow::Config c = load(o);
      hlps::flow::Log log(&std::cerr);
      auto r = hlps::flow::run_explore(c, log);
      if (r.exit_code != 0) {
        std::cerr << "hlps: " << r.message << "\n";
        return r.exit_code;
      }
      std::cout << hlps::flow::explore_csv(r.points);
      return 0;
    }
    if (*pass) {
      hlps::DesignIR d = hlps::load_design(in_path);
      const auto args = nlohmann::json::parse(args_text);
      auto r = hlps::passes::run_pass(d, pass_name, args);
      std::cerr << hlps::passes::to_json(r.report).dump() << "\n";
      const auto diags = hlps::drc_check(r.design);
      for (const auto& x : diags) {
        if (x.severity != hlps::Severity::info) std::cerr << hlps::format(x) << "\n";
      }
      if (pass_out.empty()) std::cout << hlps::serialize(r.design, hlps::Format::json);
      else hlps::save_design(r.design, pass_out);
      return hlps::has_errors(diags) ? 1 : 0;
    }
    if (*check) {
      hlps::DesignIR d = hlps::load_design(check_path);
      const auto diags = hlps::drc_check(d);
      for (const auto& x : diags) std::cout << hlps::format(x) << "\n";
      std::cout << hlps::count(diags, hlps::Severity::error) << " errors, "
                << hlps::count(diags, hlps::Severity::warning) << " warnings\n";
      return hlps::has_errors(diags) ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "hlps: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
