// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "gen.hpp"
#include "hlps/floorplan.hpp"
#include "hlps/serialize.hpp"

using namespace hlps;
using namespace hlps::floorplanner;

namespace {

VirtualDevice small_device(std::mt19937& rng) {
  static const std::pair<int, int> shapes[] = {{1, 2}, {2, 1}, {2, 2}, {1, 3}, {1, 4}};
  static const double boundaries[] = {10, 30, 1000};
  const auto [c, r] = shapes[rng() % 5];
  return testing::grid_device(c, r, 100, boundaries[rng() % 3]);
}

Options exact() {
  Options o;
  o.method = Method::exact;
  return o;
}

}  // namespace

TEST_CASE("exact floorplan matches brute force on small graphs") {
  std::mt19937 rng(21);
  int feasible = 0;
  for (int t = 0; t < 40; ++t) {
    const VirtualDevice dev = small_device(rng);
    const PartitionGraph g = testing::random_graph(rng, dev, 6);
    const Limits lim = Limits::uniform(0.9);
    const auto want = testing::brute_force_optimum(g, dev, lim);
    const auto got = floorplan(g, dev, lim, exact());
    if (!want) {
      CHECK_MESSAGE(got.status == ilp::Status::infeasible, "trial " << t);
      continue;
    }
    ++feasible;
    REQUIRE_MESSAGE(got.status == ilp::Status::optimal, "trial " << t << " " << got.message);
    CHECK_MESSAGE(got.objective == *want, "trial " << t);
    CHECK(testing::recheck(g, dev, lim, got.assignment).empty());
    CHECK(testing::wirelength(g, got.assignment) == got.objective);
  }
  CHECK(feasible >= 20);
}

TEST_CASE("recursive results are feasible and never beat the optimum") {
  std::mt19937 rng(22);
  for (int t = 0; t < 40; ++t) {
    const VirtualDevice dev = small_device(rng);
    const PartitionGraph g = testing::random_graph(rng, dev, 6);
    const Limits lim = Limits::uniform(0.9);
    const auto want = testing::brute_force_optimum(g, dev, lim);
    const auto got = floorplan(g, dev, lim);
    if (!want) {
      CHECK(got.status == ilp::Status::infeasible);
      continue;
    }
    REQUIRE_MESSAGE(got.status != ilp::Status::infeasible, "trial " << t << " " << got.message);
    CHECK(testing::recheck(g, dev, lim, got.assignment).empty());
    CHECK(violations(g, dev, lim, got.assignment).empty());
    CHECK(got.objective >= *want);
  }
}

TEST_CASE("pins and non-pipelinable edges are honoured") {
  const VirtualDevice dev = testing::grid_device(2, 2);
  PartitionGraph g;
  g.nodes = {"a", "b", "c"};
  for (const auto& n : g.nodes) g.resources[n] = Resources{};
  g.pinned["a"] = "SLOT_X1Y1";
  g.edges = {{"a", "b", 8, false}, {"b", "c", 1, true}};
  for (auto o : {Options{}, exact()}) {
    const auto r = floorplan(g, dev, Limits::uniform(1), o);
    REQUIRE(r.status != ilp::Status::infeasible);
    CHECK(r.assignment.at("a") == "SLOT_X1Y1");
    CHECK(r.assignment.at("b") == "SLOT_X1Y1");
    CHECK(r.objective == 0);
  }
}

TEST_CASE("resource limits force a spread") {
  const VirtualDevice dev = testing::grid_device(2, 1, 100);
  PartitionGraph g;
  g.nodes = {"a", "b"};
  Resources r;
  r[ResourceKind::LUT] = 60;
  g.resources = {{"a", r}, {"b", r}};
  g.edges = {{"a", "b", 5, true}};
  const auto res = floorplan(g, dev, Limits::uniform(0.7));
  REQUIRE(res.status != ilp::Status::infeasible);
  CHECK(res.assignment.at("a") != res.assignment.at("b"));
  CHECK(res.objective == 5);
  CHECK(res.per_boundary_usage.at("X0|X1") == 5);
  CHECK(max_utilization(g, dev, res.assignment) == doctest::Approx(0.6));
}

TEST_CASE("oversized demand is infeasible") {
  const VirtualDevice dev = testing::grid_device(2, 1, 100);
  PartitionGraph g;
  g.nodes = {"big"};
  Resources r;
  r[ResourceKind::DSP] = 150;
  g.resources = {{"big", r}};
  CHECK(floorplan(g, dev, Limits::uniform(1)).status == ilp::Status::infeasible);
  CHECK(floorplan(g, dev, Limits::uniform(1), exact()).status == ilp::Status::infeasible);
}

TEST_CASE("violations reports each kind") {
  const VirtualDevice dev = testing::grid_device(2, 1, 100, 4);
  PartitionGraph g;
  g.nodes = {"a", "b"};
  Resources r;
  r[ResourceKind::LUT] = 80;
  g.resources = {{"a", r}, {"b", r}};
  g.pinned["a"] = "SLOT_X0Y0";
  g.edges = {{"a", "b", 9, false}};
  CHECK(violations(g, dev, Limits::uniform(1), {{"a", "SLOT_X0Y0"}, {"b", "SLOT_X0Y0"}}).size() == 1);
  // a broken pin is reported alone
  CHECK(violations(g, dev, Limits::uniform(1), {{"a", "SLOT_X1Y0"}, {"b", "SLOT_X0Y0"}}).size() == 1);
  // capacity and non-pipelinable crossing
  CHECK(violations(g, dev, Limits::uniform(1), {{"a", "SLOT_X0Y0"}, {"b", "SLOT_X1Y0"}}).size() == 2);
  CHECK_FALSE(violations(g, dev, Limits::uniform(1), {{"a", "SLOT_X0Y0"}}).empty());
}

TEST_CASE("graph of the sample IR") {
  DesignIR d = load_design(std::string(HLPS_SOURCE_DIR) + "/data/demo/ir/llm_top.yaml");
  d.module("LLM").find_instance("FIFO_inst")->floorplan = "SLOT_X1Y1";
  const PartitionGraph g = build_graph(d);
  CHECK(g.nodes.size() == 4);
  CHECK(g.pinned.size() == 1);
  CHECK(g.pinned.at("FIFO_inst") == "SLOT_X1Y1");
  double bits = 0;
  for (const auto& e : g.edges) bits += e.weight;
  CHECK(bits == 2 * 66);
  const PartitionGraph n = build_graph(d, {}, Weight::nets);
  double nets = 0;
  for (const auto& e : n.edges) nets += e.weight;
  CHECK(nets == 6);
}

TEST_CASE("explore marks the Pareto front") {
  std::mt19937 rng(4);
  const VirtualDevice dev = testing::grid_device(2, 2, 100, 1000);
  const PartitionGraph g = testing::random_graph(rng, dev, 7);
  const auto pts = explore(g, dev, {0.5, 0.7, 0.9, 1.0}, {}, 2);
  REQUIRE(pts.size() == 4);
  for (const auto& p : pts) {
    if (!p.pareto) continue;
    for (const auto& q : pts) {
      if (q.result.status == ilp::Status::infeasible) continue;
      const bool dominates = q.max_utilization <= p.max_utilization && q.wirelength <= p.wirelength &&
                             (q.max_utilization < p.max_utilization || q.wirelength < p.wirelength);
      CHECK_FALSE(dominates);
    }
  }
}
