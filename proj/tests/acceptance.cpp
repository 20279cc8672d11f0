// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>

#include "gen.hpp"
#include "hlps/drc.hpp"
#include "hlps/floorplan.hpp"
#include "hlps/flow.hpp"
#include "hlps/passes.hpp"
#include "hlps/pipeline.hpp"
#include "hlps/rules.hpp"
#include "hlps/serialize.hpp"
#include "hlps/verilog.hpp"
#include "props.hpp"

using namespace hlps;
namespace fs = std::filesystem;

namespace {

// tolerances and budgets
constexpr int kRoundTripDesigns = 500;
constexpr double kRoundTripSeconds = 60;
constexpr int kPassInputs = 200;
constexpr int kFloorplanGraphs = 100;
constexpr int kFloorplanMaxNodes = 8;
constexpr double kExactTolerance = 0;
constexpr double kRecursiveGapMax = 0.20;
constexpr double kSolveSeconds = 5;
constexpr int kRelayJointCycles = 8;    // both sides enumerated: 16 pattern bits
constexpr int kRelayOneSidedCycles = 16;
constexpr int kRelayRandomTrials = 1000;
constexpr double kRelaySeconds = 120;

const fs::path kRoot = HLPS_SOURCE_DIR;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 -------------------------------------------------------------------------

Outcome roundtrip() {
  const auto t0 = Clock::now();
  int ok = 0, largest = 0;
  std::string first;
  for (int seed = 0; seed < kRoundTripDesigns; ++seed) {
    std::mt19937 rng(seed);
    const DesignIR d = testing::random_design(rng);
    largest = std::max(largest, static_cast<int>(d.modules.size()));
    std::string why;
    if (has_errors(drc_check(d))) why = "generator produced DRC errors";
    for (auto f : {Format::json, Format::yaml}) {
      if (why.empty() && !(deserialize(serialize(d, f), f) == d)) why = "serialize round-trip differs";
    }
    if (why.empty()) {
      if (auto diff = structural_diff(d, testing::reimport(d), {.annotations = false})) why = "reimport: " + *diff;
    }
    if (why.empty()) {
      ++ok;
    } else if (first.empty()) {
      first = fmt(" (seed %d: %s)", seed, why.c_str());
    }
  }
  const double secs = since(t0);
  return {ok == kRoundTripDesigns && secs < kRoundTripSeconds,
          fmt("%d/%d designs (max %d modules) in %.1f s, limit %.0f s", ok, kRoundTripDesigns, largest, secs,
              kRoundTripSeconds) +
              first};
}

// 2 -------------------------------------------------------------------------

Outcome pass_canonicity() {
  std::string detail, first;
  bool all = true;
  for (const auto& pass : testing::kPasses) {
    int applied = 0, ok = 0;
    for (unsigned seed = 0; applied < kPassInputs && seed < 50 * kPassInputs; ++seed) {
      const auto r = testing::check_pass(pass, seed);
      if (!r.applicable) continue;
      ++applied;
      if (r.ok()) {
        ++ok;
      } else if (first.empty()) {
        first = fmt(" (%s seed %u: %s)", pass.c_str(), seed, r.detail.c_str());
      }
    }
    all = all && applied == kPassInputs && ok == kPassInputs;
    detail += fmt("%s%s %d/%d", detail.empty() ? "" : ", ", pass.c_str(), ok, kPassInputs);
  }
  return {all, detail + first};
}

// 3 -------------------------------------------------------------------------

int count_role(const DesignIR& d, const std::string& module, const std::string& role) {
  int n = 0;
  for (const auto& i : d.module(module).submodules) n += d.module(i.module_name).role() == role;
  return n;
}

bool instantiates(const Module& m, const std::string& module) {
  return std::any_of(m.submodules.begin(), m.submodules.end(),
                     [&](const Instance& i) { return i.module_name == module; });
}

Outcome walkthrough() {
  const auto cfg = flow::load_config((kRoot / "data/demo/llm/config.yaml").string());
  DesignIR d = flow::import_design(cfg);
  d = passes::rebuild(d, "LLM").design;
  int aux = 0;
  for (const auto& [n, m] : d.modules) aux += m.role() == "aux";
  d = passes::lift(d, "Layers").design;
  d = passes::infer_interfaces(d).design;
  d = passes::partition(d, "LLM_aux").design;
  const int splits = count_role(d, "LLM", "split");

  const auto pt = passes::passthrough(d);
  // the removed split forwarded the Layers output to the RAM buffer, which are now wired directly
  bool ram_removed = false;
  if (pt.report.removed.size() == 1) {
    const Module& top = pt.design.module("LLM");
    const Instance* layers = top.find_instance("Layers_inst");
    const Instance* ram = top.find_instance("Buffer_inst");
    ram_removed = layers && ram;
    for (const std::string role : {"data", "valid", "ready"}) {
      ram_removed = ram_removed && layers->connections.at("out_" + role) == ram->connections.at("in_" + role);
    }
  }
  d = pt.design;
  const int after_pt = count_role(d, "LLM", "split");
  d = passes::flatten(d, "LLM").design;
  const Module& top = d.module("LLM");
  const bool siblings = instantiates(top, "Layer_1") && instantiates(top, "Layer_2") && !instantiates(top, "Layers");
  const bool clean = !has_errors(drc_check(d));
  const bool pass = aux == 1 && splits == 5 && ram_removed && after_pt == 4 && siblings && clean;
  return {pass, fmt("aux %d, splits %d, RAM forwarder removed %s (%d left), Layer_1/Layer_2 siblings %s, DRC %s", aux,
                    splits, ram_removed ? "yes" : "no", after_pt, siblings ? "yes" : "no", clean ? "clean" : "errors")};
}

// 4 and 5 -------------------------------------------------------------------

struct FloorplanSuite {
  int graphs = 0, feasible = 0, exact_match = 0, rechecked = 0, violations = 0, status_mismatch = 0;
  double max_gap = 0, sum_gap = 0, slowest = 0, max_exact_error = 0;
  std::string first_violation;
};

VirtualDevice suite_device(std::mt19937& rng) {
  static const std::pair<int, int> shapes[] = {{1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}, {1, 4}, {4, 1}};
  static const double boundaries[] = {12, 40, 1000};
  const auto [c, r] = shapes[rng() % std::size(shapes)];
  return testing::grid_device(c, r, 100, boundaries[rng() % std::size(boundaries)]);
}

const FloorplanSuite& floorplan_suite() {
  static const FloorplanSuite s = [] {
    FloorplanSuite s;
    std::mt19937 rng(2026);
    floorplanner::Options exact;
    exact.method = floorplanner::Method::exact;
    auto recheck = [&](const floorplanner::PartitionGraph& g, const VirtualDevice& dev,
                       const floorplanner::Limits& lim, const floorplanner::FloorplanResult& r) {
      if (r.status == ilp::Status::infeasible) return;
      ++s.rechecked;
      const auto v = testing::recheck(g, dev, lim, r.assignment);
      s.violations += static_cast<int>(v.size());
      if (!v.empty() && s.first_violation.empty()) s.first_violation = v[0];
    };
    while (s.graphs < kFloorplanGraphs) {
      const VirtualDevice dev = suite_device(rng);
      auto g = testing::random_graph(rng, dev, kFloorplanMaxNodes);
      const auto lim = floorplanner::Limits::uniform(std::uniform_real_distribution<double>(0.6, 1.0)(rng));
      ++s.graphs;
      const auto want = testing::brute_force_optimum(g, dev, lim);
      auto t = Clock::now();
      const auto e = floorplanner::floorplan(g, dev, lim, exact);
      s.slowest = std::max(s.slowest, since(t));
      t = Clock::now();
      const auto r = floorplanner::floorplan(g, dev, lim);
      s.slowest = std::max(s.slowest, since(t));
      recheck(g, dev, lim, e);
      recheck(g, dev, lim, r);
      if (!want) {
        s.status_mismatch += (e.status != ilp::Status::infeasible) + (r.status != ilp::Status::infeasible);
        continue;
      }
      ++s.feasible;
      if (e.status != ilp::Status::optimal || r.status == ilp::Status::infeasible) {
        s.status_mismatch += 1;
        continue;
      }
      const double err = std::abs(e.objective - *want);
      s.max_exact_error = std::max(s.max_exact_error, err);
      s.exact_match += err <= kExactTolerance;
      const double gap = *want > 0 ? (r.objective - *want) / *want : (r.objective > 0 ? INFINITY : 0.0);
      s.max_gap = std::max(s.max_gap, gap);
      s.sum_gap += gap;
    }
    return s;
  }();
  return s;
}

Outcome floorplan_optimality() {
  const auto& s = floorplan_suite();
  const bool pass = s.exact_match == s.feasible && s.status_mismatch == 0 && s.max_gap <= kRecursiveGapMax &&
                    s.slowest < kSolveSeconds;
  return {pass, fmt("exact = brute force on %d/%d feasible graphs (max |err| %g, tol %g), status mismatches %d; "
                    "recursive gap mean %.1f%% max %.1f%% (limit %.0f%%); slowest solve %.3f s (limit %.0f s)",
                    s.exact_match, s.feasible, s.max_exact_error, kExactTolerance, s.status_mismatch,
                    s.feasible ? 100 * s.sum_gap / s.feasible : 0.0, 100 * s.max_gap, 100 * kRecursiveGapMax,
                    s.slowest, kSolveSeconds)};
}

Outcome floorplan_feasibility() {
  const auto& s = floorplan_suite();
  // plus the demo's floorplan
  const auto cfg = flow::load_config((kRoot / "data/demo/llm/config.yaml").string());
  flow::Log log;
  auto c = cfg;
  c.output = (fs::temp_directory_path() / "hlps_acceptance_fp").string();
  c.snapshot_dir = c.output + "/snapshots";
  const auto run = flow::run_flow(c, log);
  int demo_violations = -1;
  if (run.exit_code == 0) {
    // graph of the floorplanned design, before relays are inserted
    const DesignIR placed = load_design(run.snapshots.at(6));
    const auto g = floorplanner::build_graph(placed, {}, c.weight);
    demo_violations = static_cast<int>(testing::recheck(g, *placed.device, c.limits, run.floorplan.assignment).size());
  }
  fs::remove_all(c.output);
  const bool pass = s.violations == 0 && demo_violations == 0;
  return {pass, fmt("%d violations over %d feasible floorplans of the random suite, %d on the demo floorplan%s",
                    s.violations, s.rechecked, demo_violations,
                    s.first_violation.empty() ? "" : (" (first: " + s.first_violation + ")").c_str())};
}

// 6 -------------------------------------------------------------------------

Outcome relay() {
  const auto t0 = Clock::now();
  long runs = 0, bad = 0;
  std::string first;
  auto sim = [&](int s, const pipeline::StallPattern& p, int tokens) {
    ++runs;
    const auto v = pipeline::simulate_relay(s, 2 * s + 2, p, tokens);
    if (v.sequence_equal && v.overflows == 0 && !v.deadlock && v.consumed == tokens) return;
    ++bad;
    if (first.empty()) {
      first = fmt(" (stages %d: seq %d overflow %ld deadlock %d consumed %ld)", s, v.sequence_equal, v.overflows,
                  v.deadlock, v.consumed);
    }
  };
  auto bits = [](unsigned mask, int len) {
    std::vector<bool> v(len);
    for (int t = 0; t < len; ++t) v[t] = (mask >> t) & 1;
    return v;
  };
  std::mt19937 rng(64);
  std::bernoulli_distribution coin(0.5);
  for (int s = 1; s <= 3; ++s) {
    // every joint producer/consumer pattern up to kRelayJointCycles cycles
    for (int len = 1; len <= kRelayJointCycles; ++len) {
      for (unsigned p = 0; p < (1u << len); ++p) {
        for (unsigned c = 0; c < (1u << len); ++c) sim(s, {bits(p, len), bits(c, len)}, 16);
      }
    }
    // every one-sided pattern of kRelayOneSidedCycles cycles
    for (unsigned m = 0; m < (1u << kRelayOneSidedCycles); ++m) {
      sim(s, {bits(m, kRelayOneSidedCycles), {}}, 24);
      sim(s, {{}, bits(m, kRelayOneSidedCycles)}, 24);
    }
    for (int t = 0; t < kRelayRandomTrials; ++t) {
      pipeline::StallPattern p;
      for (int k = 0; k < 64; ++k) {
        p.producer.push_back(coin(rng));
        p.consumer.push_back(coin(rng));
      }
      sim(s, p, 64);
    }
  }
  const double secs = since(t0);
  return {bad == 0 && secs < kRelaySeconds,
          fmt("%ld simulations, %ld with overflow/loss/reorder/deadlock, stages 1-3 depth 2s+2, joint patterns <= %d "
              "cycles, one-sided %d cycles, %d random 64-cycle trials each; %.1f s (limit %.0f s)",
              runs, bad, kRelayJointCycles, kRelayOneSidedCycles, kRelayRandomTrials, secs, kRelaySeconds) +
              first};
}

// 7 -------------------------------------------------------------------------

Outcome interface_rules() {
  const std::string src = slurp(kRoot / "data/stubs/axi_stub.v");
  const auto leaves = verilog::import_leaf(src);
  DesignIR d;
  d.modules[leaves.at(0).name] = leaves.at(0);
  d.top = leaves.at(0).name;
  const DesignIR tagged = apply_rules(parse_pragmas(src), d);
  const Module& m = tagged.module(d.top);

  auto hs = [](const std::string& b, std::vector<std::string> data) {
    InterfaceSpec s;
    s.type = InterfaceType::handshake;
    for (auto& p : data) p = "m_axi_" + b + p;
    s.data = data;
    s.valid = "m_axi_" + b + "VALID";
    s.ready = "m_axi_" + b + "READY";
    return s;
  };
  const std::vector<std::string> addr = {"ID", "ADDR", "LEN", "SIZE", "BURST", "LOCK", "CACHE", "PROT"};
  std::vector<InterfaceSpec> want = {hs("AW", addr), hs("W", {"DATA", "STRB", "LAST"}), hs("B", {"ID", "RESP"}),
                                     hs("AR", addr), hs("R", {"ID", "DATA", "RESP", "LAST"})};
  auto key = [](const InterfaceSpec& s) { return s.valid; };
  auto got = m.interfaces;
  std::sort(got.begin(), got.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
  std::sort(want.begin(), want.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
  const bool axi = m.ports.size() == 37 && got == want;

  // reset rule over the stub, the reset mix and a generated design with its specs removed
  const auto rules = parse_rule_file("add_reset(module=\".*\", port=\"rst|reset\", active=\"high\")\n");
  DesignIR mix = d;
  for (auto& leaf : verilog::import_leaf(slurp(kRoot / "data/stubs/resets.v"))) mix.modules[leaf.name] = leaf;
  std::mt19937 rng(7);
  for (auto& [name, mod] : testing::random_design(rng).modules) {
    mod.interfaces.clear();
    mix.modules["g_" + name] = mod;
  }
  const DesignIR reset_tagged = apply_rules(rules, mix);
  const std::regex re("rst|reset");
  int expected = 0, correct = 0, stray = 0;
  for (const auto& [name, mod] : reset_tagged.modules) {
    for (const auto& p : mod.ports) {
      const InterfaceSpec* s = mod.interface_of(p.name);
      const bool is_reset = s && s->type == InterfaceType::reset && s->active == "high";
      if (std::regex_match(p.name, re)) {
        ++expected;
        correct += is_reset;
      } else {
        stray += is_reset;
      }
    }
  }
  const bool resets = expected > 0 && correct == expected && stray == 0;
  return {axi && resets, fmt("AXI stub: %zu ports, %zu handshake specs, exact match %s; reset rule tagged %d/%d "
                             "rst|reset ports, %d others",
                             m.ports.size(), m.interfaces.size(), axi ? "yes" : "no", correct, expected, stray)};
}

// 8 -------------------------------------------------------------------------

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string text = slurp(e.path());
    const std::string rel = fs::relative(e.path(), dir).generic_string();
    if (rel == "report.json") {
      auto j = nlohmann::json::parse(text);
      j.erase("generated_at");
      text = j.dump();
    }
    out[rel] = text;
  }
  return out;
}

Outcome determinism() {
  auto cfg = flow::load_config((kRoot / "data/demo/llm/config.yaml").string());
  std::map<std::string, std::string> runs[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = fs::temp_directory_path() / ("hlps_acceptance_det" + std::to_string(k));
    fs::remove_all(out);
    cfg.output = out.string();
    cfg.snapshot_dir.clear();
    flow::Log log;
    const auto r = flow::run_flow(cfg, log);
    if (r.exit_code != 0) return {false, "demo run failed: " + r.message};
    runs[k] = tree(out);
    fs::remove_all(out);
  }
  int differing = 0;
  std::string first;
  for (const auto& [f, text] : runs[0]) {
    auto it = runs[1].find(f);
    if (it == runs[1].end() || it->second != text) {
      ++differing;
      if (first.empty()) first = " (first: " + f + ")";
    }
  }
  differing += static_cast<int>(runs[1].size() > runs[0].size());
  int snapshots = 0, verilog = 0;
  for (const auto& [f, t] : runs[0]) {
    snapshots += f.rfind("snapshots/", 0) == 0;
    verilog += f.size() > 2 && f.substr(f.size() - 2) == ".v";
  }
  const bool pass = differing == 0 && snapshots == 9 && verilog > 0 && runs[0].count("constraints.xdc");
  return {pass, fmt("%zu files compared (%d snapshots, %d Verilog), %d differ, timestamp excluded", runs[0].size(),
                    snapshots, verilog, differing) +
                    first};
}

}  // namespace

int main() {
  report(1, "IR round-trip", roundtrip);
  report(2, "pass canonicity", pass_canonicity);
  report(3, "LLM walkthrough structure", walkthrough);
  report(4, "floorplanner optimality", floorplan_optimality);
  report(5, "floorplan feasibility recheck", floorplan_feasibility);
  report(6, "relay correctness", relay);
  report(7, "interface-rule extraction", interface_rules);
  report(8, "determinism", determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
