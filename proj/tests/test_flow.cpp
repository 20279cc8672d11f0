// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hlps/flow.hpp"
#include "hlps/serialize.hpp"

using namespace hlps;
namespace fs = std::filesystem;

namespace {

const fs::path kDemo = fs::path(HLPS_SOURCE_DIR) / "data/demo/llm";

nlohmann::json demo_json() { return yaml_to_json([] {
  std::ifstream in(kDemo / "config.yaml");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}()); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hlps_flow_" + name);
  fs::remove_all(p);
  return p;
}

flow::Config demo_config(const fs::path& out, nlohmann::json overrides = nlohmann::json::object()) {
  nlohmann::json j = demo_json();
  j["output"] = out.string();
  j.update(overrides);
  return flow::config_from_json(j, kDemo);
}

}  // namespace

TEST_CASE("demo flow writes nine snapshots and every artifact") {
  const fs::path out = scratch("demo");
  flow::Log log;
  const auto r = flow::run_flow(demo_config(out), log);
  REQUIRE_MESSAGE(r.exit_code == 0, r.failed_stage << ": " << r.message);
  REQUIRE(r.snapshots.size() == 9);
  CHECK(fs::path(r.snapshots.front()).filename() == "01_import.json");
  CHECK(fs::path(r.snapshots.back()).filename() == "09_export.json");
  for (const char* f : {"constraints.xdc", "design.dot", "report.json", "rtl/filelist.f"}) {
    CHECK_MESSAGE(fs::exists(out / f), f);
  }
  CHECK(r.floorplan.status != ilp::Status::infeasible);
  CHECK_FALSE(r.plan.links.empty());
  CHECK(r.report.contains("floorplan"));
  int stages = 0;
  for (const auto& rec : log.records()) stages += rec.value("event", "") == "stage";
  CHECK(stages == 9);
  fs::remove_all(out);
}

TEST_CASE("an unknown device file fails the import stage") {
  const fs::path out = scratch("nodev");
  flow::Log log;
  const auto r = flow::run_flow(demo_config(out, {{"device", "no_such_device.yaml"}}), log);
  CHECK(r.exit_code != 0);
  CHECK(r.failed_stage == "import");
  CHECK(r.message.find("no_such_device") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("unknown config keys are rejected") {
  nlohmann::json j = demo_json();
  j["flaten"] = "LLM";
  CHECK_THROWS_AS(flow::config_from_json(j, kDemo), Error);
}

TEST_CASE("single-slot device: no crossings, no relays") {
  const fs::path out = scratch("oneslot");
  const fs::path dev = out / "one.json";
  fs::create_directories(out);
  {
    std::ofstream os(dev);
    os << R"({"part": "one", "cols": 1, "rows": 1,
              "default_resources": {"LUT": 1e7, "FF": 1e7, "BRAM": 1e4, "DSP": 1e4, "URAM": 1e3}})";
  }
  flow::Log log;
  const auto r = flow::run_flow(demo_config(out, {{"device", dev.string()}}), log);
  REQUIRE_MESSAGE(r.exit_code == 0, r.message);
  CHECK(r.plan.links.empty());
  CHECK(r.floorplan.objective == 0);
  for (const auto& [inst, slot] : r.floorplan.assignment) CHECK(slot == "SLOT_X0Y0");
  fs::remove_all(out);
}

TEST_CASE("explore reports a Pareto front over the schedule") {
  const fs::path out = scratch("explore");
  flow::Log log;
  const auto r = flow::run_explore(demo_config(out), log);
  REQUIRE(r.exit_code == 0);
  CHECK(r.points.size() == 7);
  int pareto = 0;
  for (const auto& p : r.points) {
    pareto += p.pareto;
    if (p.pareto) CHECK(p.result.status != ilp::Status::infeasible);
  }
  CHECK(pareto >= 1);
  CHECK(fs::exists(out / "explore.csv"));
  std::ifstream csv(out / "explore.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.find("limit") != std::string::npos);
  fs::remove_all(out);
}
