// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "gen.hpp"
#include "hlps/drc.hpp"
#include "hlps/flow.hpp"
#include "hlps/passes.hpp"
#include "hlps/verilog.hpp"
#include "props.hpp"

using namespace hlps;

namespace {

DesignIR from_verilog(const std::string& src, const std::string& top) {
  DesignIR d;
  for (auto& m : verilog::import_leaf(src)) d.modules[m.name] = m;
  d.top = top;
  return d;
}

bool has_instance_of(const Module& m, const std::string& module) {
  for (const auto& i : m.submodules) {
    if (i.module_name == module) return true;
  }
  return false;
}

// top instantiates A and B; the glue inverts one signal and forwards another.
const char* kGlue =
    "module A(input [7:0] x, output [7:0] y); assign y = x + 8'd1; endmodule\n"
    "module B(input [7:0] x, output [7:0] y); assign y = x - 8'd1; endmodule\n"
    "module top(input [7:0] i, output [7:0] o, output [7:0] p);\n"
    "  wire [7:0] a_y, b_x, b_y;\n"
    "  A a (.x(i), .y(a_y));\n"
    "  assign b_x = ~a_y;\n"
    "  B b (.x(b_x), .y(b_y));\n"
    "  assign o = b_y;\n"
    "  assign p = i;\n"
    "endmodule\n";

}  // namespace

TEST_CASE("rebuild extracts instances and leaves the glue in an aux leaf") {
  const DesignIR d = from_verilog(kGlue, "top");
  const auto r = passes::rebuild(d, "top");
  const Module& top = r.design.module("top");
  CHECK(top.is_grouped());
  CHECK(top.submodules.size() == 3);
  REQUIRE(r.design.has_module("top_aux"));
  const Module& aux = r.design.module("top_aux");
  CHECK(aux.role() == "aux");
  // a.x, a.y, b.x, b.y mirrored; names clash with the glue wires
  CHECK(aux.ports.size() == 7);
  REQUIRE(aux.find_port("a_y_1"));
  CHECK(aux.find_port("a_y_1")->direction == Direction::in);
  REQUIRE(aux.find_port("a_x"));
  CHECK(aux.find_port("a_x")->direction == Direction::out);
  CHECK_FALSE(has_errors(drc_check(r.design)));
  CHECK(testing::flat_nets(d, {.opaque = {"top"}}).empty());
}

TEST_CASE("partition splits the aux by connectivity") {
  DesignIR d = passes::rebuild(from_verilog(kGlue, "top"), "top").design;
  const auto comps = passes::port_components(d.module("top_aux"));
  CHECK(comps.size() == 3);  // a_y/b_x, b_y/o, i/p
  const auto r = passes::partition(d, "top_aux");
  int splits = 0;
  for (const auto& [name, m] : r.design.modules) splits += m.role() == "split";
  CHECK(splits == 3);
  CHECK_FALSE(has_errors(drc_check(r.design)));
}

TEST_CASE("passthrough removes pure forwarders and is idempotent") {
  DesignIR d = passes::rebuild(from_verilog(kGlue, "top"), "top").design;
  d = passes::infer_interfaces(d).design;
  d = passes::partition(d, "top_aux").design;
  const auto r = passes::passthrough(d);
  CHECK_FALSE(has_errors(drc_check(r.design)));
  CHECK(passes::passthrough(r.design).design == r.design);
  // the inverter split is not a forwarder
  int splits = 0;
  for (const auto& i : r.design.module("top").submodules) {
    splits += r.design.module(i.module_name).role() == "split";
  }
  CHECK(splits >= 1);
}

TEST_CASE("flatten names inner instances X__Y and X for Y == X") {
  const DesignIR d = from_verilog(
      "module L(input a, output b); assign b = ~a; endmodule\n"
      "module G(input a, output b); wire t; L G (.a(a), .b(t)); L k (.a(t), .b(b)); endmodule\n"
      "module top(input a, output b); G G (.a(a), .b(b)); endmodule\n",
      "top");
  DesignIR lifted = passes::lift(d, "G").design;
  lifted = passes::lift(lifted, "top").design;
  const auto r = passes::flatten(lifted, "top");
  const Module& top = r.design.module("top");
  CHECK(top.find_instance("G"));
  CHECK(top.find_instance("G__k"));
  CHECK(top.submodules.size() == 2);
  CHECK_FALSE(has_errors(drc_check(r.design)));
}

TEST_CASE("wrap and group keep connectivity") {
  std::mt19937 rng(9);
  testing::GenOptions o;
  o.annotations = false;
  const DesignIR d = testing::random_design(rng, o);
  const Module& top = d.module(d.top);
  REQUIRE(top.submodules.size() >= 2);
  const auto w = passes::wrap(d, d.top, top.submodules[0].instance_name,
                              passes::identity_template(d, d.top, top.submodules[0].instance_name, "W"));
  CHECK(w.design.module("W").role() == "wrapper");
  CHECK(testing::flat_nets(w.design, {.transparent = {"W"}}) == testing::flat_nets(d));
  const auto g = passes::group(d, d.top, {top.submodules[0].instance_name, top.submodules[1].instance_name}, "Grp");
  CHECK_FALSE(has_errors(drc_check(g.design)));
  CHECK(testing::flat_nets(g.design, {.transparent = {"Grp"}}) == testing::flat_nets(d));
  // the wrapper's inner instance keeps the wrapped name, so inlining restores the paths
  const auto back = passes::inline_instance(w.design, d.top, top.submodules[0].instance_name);
  CHECK(testing::flat_nets(back.design) == testing::flat_nets(d));
}

TEST_CASE("demo walkthrough: one aux, five splits, RAM forwarder removed, layers become siblings") {
  const auto cfg = flow::load_config(std::string(HLPS_SOURCE_DIR) + "/data/demo/llm/config.yaml");
  DesignIR d = flow::import_design(cfg);
  d = passes::rebuild(d, "LLM").design;
  d = passes::lift(d, "Layers").design;
  int aux = 0;
  for (const auto& [n, m] : d.modules) aux += m.role() == "aux";
  CHECK(aux == 1);
  d = passes::infer_interfaces(d).design;
  d = passes::partition(d, "LLM_aux").design;
  int splits = 0;
  for (const auto& i : d.module("LLM").submodules) splits += d.module(i.module_name).role() == "split";
  CHECK(splits == 5);
  const auto pt = passes::passthrough(d);
  REQUIRE(pt.report.removed.size() == 1);
  d = pt.design;
  CHECK(has_instance_of(d.module("LLM"), "Buffer"));
  d = passes::flatten(d, "LLM").design;
  CHECK(has_instance_of(d.module("LLM"), "Layer_1"));
  CHECK(has_instance_of(d.module("LLM"), "Layer_2"));
  CHECK_FALSE(has_instance_of(d.module("LLM"), "Layers"));
  CHECK_FALSE(has_errors(drc_check(d)));
}

TEST_CASE("run_pass dispatches by name") {
  const DesignIR d = from_verilog(kGlue, "top");
  CHECK(passes::run_pass(d, "rebuild", {{"module", "top"}}).design == passes::rebuild(d, "top").design);
  CHECK_THROWS_AS(passes::run_pass(d, "nope", nlohmann::json::object()), Error);
}

TEST_CASE("property: every pass on random designs") {
  for (const auto& pass : testing::kPasses) {
    int applied = 0;
    for (unsigned seed = 0; applied < 25 && seed < 400; ++seed) {
      const auto r = testing::check_pass(pass, 1000 + seed);
      if (!r.applicable) continue;
      ++applied;
      CHECK_MESSAGE(r.ok(), pass << " seed " << 1000 + seed << ": " << r.detail);
    }
    CHECK_MESSAGE(applied == 25, pass);
  }
}
