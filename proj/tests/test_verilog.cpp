// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "gen.hpp"
#include "hlps/drc.hpp"
#include "hlps/exporter.hpp"
#include "hlps/rules.hpp"
#include "hlps/serialize.hpp"
#include "hlps/verilog.hpp"

using namespace hlps;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(HLPS_SOURCE_DIR) + "/" + rel);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DesignIR single(const Module& m) {
  DesignIR d;
  d.modules[m.name] = m;
  d.top = m.name;
  return d;
}

const InterfaceSpec* spec_with_valid(const Module& m, const std::string& valid) {
  for (const auto& i : m.interfaces) {
    if (i.valid == valid) return &i;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("minimal ANSI module") {
  const auto mods = verilog::import_leaf("module m(input a, output [3:0] b); endmodule\n");
  REQUIRE(mods.size() == 1);
  const Module& m = mods[0];
  CHECK(m.name == "m");
  REQUIRE(m.ports.size() == 2);
  CHECK(m.ports[0] == Port{"a", Direction::in, 1});
  CHECK(m.ports[1] == Port{"b", Direction::out, 4});
}

TEST_CASE("non-ANSI header with parameterized widths") {
  const auto p = verilog::parse_module(
      "module m(a, b);\n  parameter W = 8;\n  input [W-1:0] a;\n  output [2*W-1:0] b;\nendmodule\n");
  CHECK_FALSE(p.ansi);
  REQUIRE(p.ports.size() == 2);
  CHECK(p.ports[0].width == 8);
  CHECK(p.ports[1].width == 16);
}

TEST_CASE("constant expressions") {
  const std::map<std::string, long long> params{{"W", 32}};
  CHECK(verilog::eval_constant("W-1", params) == 31);
  CHECK(verilog::eval_constant("(W/4)+2*3", params) == 14);
  CHECK(verilog::eval_constant("$clog2(W)", params) == 5);
}

TEST_CASE("parse errors carry a location") {
  try {
    verilog::parse_source("module m(input a;\nendmodule\n");
    FAIL("accepted a broken header");
  } catch (const verilog::ParseError& e) {
    CHECK(e.line() >= 1);
  }
}

TEST_CASE("segments cover the unit and units concatenate to the file") {
  const std::string src = slurp("data/demo/llm/llm.v");
  const auto mods = verilog::parse_source(src);
  REQUIRE_FALSE(mods.empty());
  std::string joined;
  for (const auto& m : mods) {
    size_t at = 0;
    for (const auto& s : m.segments) {
      CHECK(s.span.begin == at);
      at = s.span.end;
    }
    CHECK(at == m.text.size());
    joined += m.text;
  }
  CHECK(joined == src);
}

TEST_CASE("pure assigns and instantiations are recognized") {
  const auto p = verilog::parse_module(
      "module m(input a, output b, output c);\n"
      "  wire t;\n"
      "  assign b = a;\n"
      "  assign c = ~a;\n"
      "  sub u0 (.x(a), .y(t));\n"
      "endmodule\n");
  int pure = 0;
  for (const auto& s : p.statements) pure += s.pure();
  CHECK(pure == 1);
  REQUIRE(p.instantiations.size() == 1);
  CHECK(p.instantiations[0].instance_name == "u0");
  CHECK(p.instantiations[0].find("y")->expr == "t");
}

TEST_CASE("a generated 20-module file imports with matching ports") {
  std::mt19937 rng(5);
  testing::GenOptions o;
  o.max_modules = 20;
  o.annotations = false;
  const DesignIR d = testing::random_design(rng, o);
  std::string file;
  std::vector<const Module*> leaves;
  for (const auto& name : reachable_modules(d)) {
    const Module& m = d.module(name);
    if (m.is_leaf()) {
      file += m.source;
      leaves.push_back(&m);
    }
  }
  const auto mods = verilog::import_leaf(file);
  REQUIRE(mods.size() == leaves.size());
  for (size_t i = 0; i < mods.size(); ++i) {
    CHECK(mods[i].name == leaves[i]->name);
    CHECK(mods[i].ports == leaves[i]->ports);
  }
}

TEST_CASE("lift turns a structural leaf into a grouped module") {
  const std::string src =
      "module top(input [7:0] i, output [7:0] o);\n"
      "  wire [7:0] mid;\n"
      "  A a (.x(i), .y(mid));\n"
      "  B b (.x(mid), .y(o));\n"
      "endmodule\n";
  const Module g = verilog::lift_structural(verilog::import_leaf(src)[0]);
  CHECK(g.is_grouped());
  CHECK(g.submodules.size() == 2);
  REQUIRE(g.find_wire("mid"));
  CHECK(g.find_instance("b")->connections.at("y") == "o");
}

TEST_CASE("rewriter edits keep the rest of the text") {
  const auto p = verilog::parse_module("module m(input a, output b);\n  sub u (.x(a), .y(b));\nendmodule\n");
  verilog::Rewriter rw(p);
  rw.rename_module("m2");
  rw.replace_connection("u", "x", "a_q");
  rw.add_wire("a_q", 1);
  const std::string out = rw.str();
  const auto q = verilog::parse_module(out);
  CHECK(q.name == "m2");
  CHECK(q.find_instance("u")->find("x")->expr == "a_q");
  CHECK(q.find_instance("u")->find("y")->expr == "b");
  CHECK(rw.fresh("a_q") != "a_q");
}

TEST_CASE("pragma on the AXI stub yields one handshake per bundle") {
  const std::string src = slurp("data/stubs/axi_stub.v");
  const auto mods = verilog::import_leaf(src);
  REQUIRE(mods.size() == 1);
  CHECK(mods[0].ports.size() == 37);
  std::vector<Diagnostic> diags;
  const auto rules = parse_pragmas(src, &diags);
  CHECK(diags.empty());
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].origin == "pragma");
  const DesignIR d = apply_rules(rules, single(mods[0]));
  const Module& m = d.module("axi_stub");
  CHECK(m.interfaces.size() == 5);
  for (const std::string b : {"AW", "W", "B", "AR", "R"}) {
    const InterfaceSpec* s = spec_with_valid(m, "m_axi_" + b + "VALID");
    REQUIRE_MESSAGE(s, b);
    CHECK(s->type == InterfaceType::handshake);
    CHECK(s->ready == "m_axi_" + b + "READY");
    for (const auto& p : s->data) CHECK(p.rfind("m_axi_" + b, 0) == 0);
  }
  CHECK(spec_with_valid(m, "m_axi_AWVALID")->data.size() == 8);
  CHECK(spec_with_valid(m, "m_axi_RVALID")->data.size() == 4);
  CHECK_FALSE(has_errors(drc_check(d)));
}

TEST_CASE("rule file: reset polarity and first match wins") {
  const auto rules = parse_rule_file(
      "# comment\n"
      "add_reset(module=\".*\", port=\"rst|reset\", active=\"high\")\n"
      "add_clock(module=\".*\", port=\"ap_clk\")\n"
      "add_false_path(module=\".*\", port=\"rst\")\n");
  REQUIRE(rules.size() == 3);
  CHECK(rules[0].kind == InterfaceType::reset);
  CHECK(rules[0].line == 2);
  const DesignIR d = apply_rules(rules, single(verilog::import_leaf(slurp("data/stubs/axi_stub.v"))[0]));
  const Module& m = d.module("axi_stub");
  const InterfaceSpec* rst = m.interface_of("rst");
  REQUIRE(rst);
  CHECK(rst->type == InterfaceType::reset);
  CHECK(rst->active == "high");
  REQUIRE(m.interface_of("ap_clk"));
  CHECK(m.interface_of("ap_clk")->type == InterfaceType::clock);
}

TEST_CASE("malformed rules report their line") {
  try {
    parse_rule_file("add_clock(module=\".*\", port=\"clk\")\nadd_reset(port=\"rst\" active=\"high\")\n");
    FAIL("accepted a truncated call");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("rules:2:") == 0);
  }
  std::vector<Diagnostic> diags;
  parse_pragmas("// pragma handshake pattern=nobundle\nmodule m(); endmodule\n", &diags);
  CHECK_FALSE(diags.empty());
}

TEST_CASE("template splits enumerate every decomposition") {
  const auto s = template_splits("{bundle}_{role}", "a_b_c");
  CHECK(s.size() == 2);
  CHECK(template_splits("m_axi_{bundle}{role}", "x_ARVALID").empty());
}
