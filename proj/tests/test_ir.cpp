// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "gen.hpp"
#include "hlps/drc.hpp"
#include "hlps/serialize.hpp"

using namespace hlps;

namespace {

const std::string kDir = HLPS_SOURCE_DIR;

size_t errors(const std::vector<Diagnostic>& d) { return count(d, Severity::error); }

std::vector<Diagnostic> with_rule(const std::vector<Diagnostic>& diags, const std::string& rule) {
  std::vector<Diagnostic> out;
  for (const auto& d : diags) {
    if (d.rule == rule && d.severity == Severity::error) out.push_back(d);
  }
  return out;
}

Module leaf(const std::string& name, std::vector<Port> ports) {
  Module m;
  m.name = name;
  m.ports = std::move(ports);
  m.source = "module " + name + "(); endmodule\n";
  return m;
}

// top { a: Src.o -> w -> b: Dst.i }
DesignIR pair_design() {
  DesignIR d;
  d.modules["Src"] = leaf("Src", {{"o", Direction::out, 4}});
  d.modules["Dst"] = leaf("Dst", {{"i", Direction::in, 4}});
  Module top;
  top.name = "Top";
  top.kind = ModuleKind::grouped;
  top.wires = {{"w", 4}};
  top.submodules = {{"a", "Src", {{"o", "w"}}, std::nullopt}, {"b", "Dst", {{"i", "w"}}, std::nullopt}};
  d.modules["Top"] = top;
  d.top = "Top";
  return d;
}

}  // namespace

TEST_CASE("sample LLM IR is canonical and has three functional submodules") {
  const DesignIR d = load_design(kDir + "/data/demo/ir/llm_top.yaml");
  CHECK(errors(drc_check(d)) == 0);
  CHECK(d.top == "LLM");
  const Module& top = d.module("LLM");
  int functional = 0;
  for (const auto& i : top.submodules) functional += i.module_name != "ClockFanout";
  CHECK(functional == 3);
  const Module& fifo = d.module("FIFO");
  REQUIRE(fifo.metadata.resource);
  CHECK((*fifo.metadata.resource)[ResourceKind::LUT] == 39);
  CHECK((*fifo.metadata.resource)[ResourceKind::FF] == 10);
  CHECK(fifo.metadata.floorplan == "SLOT_X1Y1");
  const InterfaceSpec* in = fifo.interface_of("I");
  REQUIRE(in);
  CHECK(in->type == InterfaceType::handshake);
  CHECK(in->valid == "I_vld");
  CHECK(in->ready == "I_rdy");
  CHECK(in->clk == "ap_clk");
}

TEST_CASE("drc flags a wire with three endpoints") {
  DesignIR d = pair_design();
  d.modules["Dst2"] = leaf("Dst2", {{"i", Direction::in, 4}});
  d.module("Top").submodules.push_back({"c", "Dst2", {{"i", "w"}}, std::nullopt});
  const auto a1 = with_rule(drc_check(d), "A1");
  REQUIRE(a1.size() == 1);
  CHECK(a1[0].path == "Top.w");
}

TEST_CASE("drc flags a ready port wider than one bit") {
  DesignIR d = pair_design();
  Module& src = d.module("Src");
  src.ports.push_back({"v", Direction::out, 1});
  src.ports.push_back({"r", Direction::in, 2});
  InterfaceSpec hs;
  hs.data = {"o"};
  hs.valid = "v";
  hs.ready = "r";
  src.interfaces.push_back(hs);
  const auto diags = drc_check(d);
  const auto roles = with_rule(diags, "iface-role");
  REQUIRE(roles.size() == 1);
  CHECK(roles[0].message.find("ready") != std::string::npos);
}

TEST_CASE("drc: widths, drivers and dangling references") {
  SUBCASE("width mismatch") {
    DesignIR d = pair_design();
    d.module("Top").wires[0].width = 3;
    CHECK_FALSE(with_rule(drc_check(d), "width").empty());
  }
  SUBCASE("two drivers") {
    DesignIR d = pair_design();
    d.module("Dst").ports[0].direction = Direction::out;
    CHECK_FALSE(with_rule(drc_check(d), "driver").empty());
  }
  SUBCASE("unknown module") {
    DesignIR d = pair_design();
    d.module("Top").submodules[1].module_name = "Nope";
    CHECK(with_rule(drc_check(d), "dangling").size() == 1);
  }
  SUBCASE("unconnected port is a warning") {
    DesignIR d = pair_design();
    d.module("Dst").ports.push_back({"extra", Direction::in, 1});
    const auto diags = drc_check(d);
    CHECK(errors(diags) == 0);
    CHECK(count(diags, Severity::warning) == 1);
  }
  SUBCASE("partially connected interface") {
    DesignIR d = pair_design();
    Module& dst = d.module("Dst");
    dst.ports.push_back({"v", Direction::in, 1});
    dst.ports.push_back({"r", Direction::out, 1});
    InterfaceSpec hs;
    hs.data = {"i"};
    hs.valid = "v";
    hs.ready = "r";
    dst.interfaces.push_back(hs);
    CHECK(with_rule(drc_check(d), "A3").size() == 1);
  }
}

TEST_CASE("empty design round-trips") {
  DesignIR d;
  for (auto f : {Format::json, Format::yaml}) CHECK(structural_equal(deserialize(serialize(d, f), f), d));
}

TEST_CASE("structural_equal distinguishes widths and ignores wire names") {
  const DesignIR d = pair_design();
  CHECK(structural_equal(d, d));
  DesignIR wider = d;
  wider.module("Src").ports[0].width = 5;
  CHECK_FALSE(structural_equal(d, wider));
  DesignIR renamed = d;
  Module& top = renamed.module("Top");
  top.wires[0].name = "other";
  for (auto& i : top.submodules) {
    for (auto& [p, v] : i.connections) v = "other";
  }
  CHECK(structural_equal(d, renamed));
}

TEST_CASE("deserialize reports the offending path") {
  const std::string bad = R"({"top": "M", "modules": [{"module_name": "M", "module_ports": [{"name": "a", "direction": "in", "width": "x"}]}]})";
  try {
    deserialize(bad, Format::json);
    FAIL("accepted a string width");
  } catch (const SchemaError& e) {
    CHECK(e.path().find("module_ports[0]") != std::string::npos);
  }
}

TEST_CASE("50-module random designs round-trip through json and yaml") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    std::mt19937 rng(seed);
    testing::GenOptions o;
    o.max_modules = 50;
    const DesignIR d = testing::random_design(rng, o);
    REQUIRE(errors(drc_check(d)) == 0);
    for (auto f : {Format::json, Format::yaml}) {
      const DesignIR back = deserialize(serialize(d, f), f);
      const auto diff = structural_diff(d, back);
      CHECK_MESSAGE(!diff, "seed " << seed << ": " << diff.value_or(""));
      CHECK(back == d);
    }
  }
}

TEST_CASE("serialization is byte-stable") {
  std::mt19937 rng(11);
  const DesignIR d = testing::random_design(rng);
  const std::string text = serialize(d, Format::json);
  CHECK(serialize(deserialize(text, Format::json), Format::json) == text);
}

TEST_CASE("provenance helpers") {
  DesignIR d = pair_design();
  record_provenance(d, "Top/x", "Top/a");
  record_provenance(d, "Top/y", "Top/x");
  CHECK(provenance_root(d, "Top/y") == "Top/a");
  prune_provenance(d);
  CHECK(d.provenance.empty());
  CHECK(fresh_name("w", {"w", "w_1"}) == "w_2");
  CHECK(is_sized_constant("4'b0000"));
  CHECK_FALSE(is_sized_constant("0"));
  CHECK(constant_width("8'hFF") == 8);
}
