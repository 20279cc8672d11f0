// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/flow.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "hlps/exporter.hpp"
#include "hlps/passes.hpp"
#include "hlps/rules.hpp"
#include "hlps/serialize.hpp"
#include "hlps/verilog.hpp"

namespace hlps::flow {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p, const std::string& what) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error("cannot read " + what + " '" + p.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> strings(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return {};
  if (j[key].is_string()) return {j[key].get<std::string>()};
  if (!j[key].is_array()) throw Error(std::string("config: '") + key + "' must be a list of strings");
  return j[key].get<std::vector<std::string>>();
}

Resources resources_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw Error(where + ": expected a map of resource kinds");
  Resources r;
  for (const auto& [k, v] : j.items()) {
    auto kind = resource_kind_from_string(k);
    if (!kind) throw Error(where + ": unknown resource kind '" + k + "'");
    if (!v.is_number() || v.get<double>() < 0) throw Error(where + "." + k + ": expected a non-negative number");
    r[*kind] = v.get<double>();
  }
  return r;
}

}  // namespace

fs::path Config::resolve(const std::string& p) const {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

Config config_from_json(const nlohmann::json& j, const fs::path& base) {
  if (!j.is_object()) throw Error("config: expected a map");
  static const std::set<std::string> known = {
      "top",     "sources", "rules",       "resources", "device",   "limits",  "rebuild",    "lift",
      "partition", "passthrough", "flatten", "floorplan", "pipeline", "explore", "output", "snapshot_dir",
      "time_limit", "jobs"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw Error("config: unknown key '" + k + "'");
  }
  Config c;
  c.base = base;
  c.top = j.value("top", "");
  c.sources = strings(j, "sources");
  c.rules = strings(j, "rules");
  c.resources = j.value("resources", "");
  c.device = j.value("device", "");
  if (j.contains("limits")) {
    const auto& l = j["limits"];
    if (l.is_number()) {
      c.limits = floorplanner::Limits::uniform(l.get<double>());
    } else if (l.is_object()) {
      c.limits = floorplanner::Limits::uniform(1.0);
      for (const auto& [k, v] : l.items()) {
        auto kind = resource_kind_from_string(k);
        if (!kind || !v.is_number()) throw Error("config: bad limit '" + k + "'");
        c.limits.fraction[static_cast<size_t>(*kind)] = v.get<double>();
      }
    } else {
      throw Error("config: 'limits' must be a number or a map");
    }
  }
  c.rebuild = strings(j, "rebuild");
  c.lift = strings(j, "lift");
  if (j.contains("partition")) {
    c.partition = strings(j, "partition");
    c.partition_default = false;
  }
  c.passthrough = j.value("passthrough", true);
  c.flatten = j.value("flatten", "");
  if (j.contains("floorplan")) {
    const auto& f = j["floorplan"];
    const std::string method = f.value("method", "recursive");
    if (method == "recursive") c.method = floorplanner::Method::recursive;
    else if (method == "exact") c.method = floorplanner::Method::exact;
    else throw Error("config: floorplan.method must be 'recursive' or 'exact'");
    const std::string weight = f.value("weight", "bits");
    if (weight == "bits") c.weight = floorplanner::Weight::bits;
    else if (weight == "nets") c.weight = floorplanner::Weight::nets;
    else throw Error("config: floorplan.weight must be 'bits' or 'nets'");
    c.solver = f.value("solver", "");
  }
  if (j.contains("pipeline")) {
    const auto& p = j["pipeline"];
    c.pipeline.min_fifo_depth = p.value("min_fifo_depth", 0);
    if (p.contains("stage_override")) c.pipeline.stage_override = p["stage_override"].get<std::map<std::string, int>>();
  }
  if (j.contains("explore")) c.schedule = j["explore"].value("schedule", std::vector<double>{});
  c.output = j.value("output", "out");
  c.snapshot_dir = j.value("snapshot_dir", "");
  c.time_limit = j.value("time_limit", 400.0);
  c.jobs = j.value("jobs", 1);
  return c;
}

Config load_config(const std::string& path) {
  const std::string text = read_file(path, "config file");
  nlohmann::json j;
  if (format_for_path(path) == Format::json) {
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error("config '" + path + "': " + e.what());
    }
  } else {
    j = yaml_to_json(text);
  }
  return config_from_json(j, fs::absolute(path).parent_path());
}

void Log::write(nlohmann::json record) {
  if (out_) *out_ << record.dump() << "\n" << std::flush;
  records_.push_back(std::move(record));
}

void Log::diagnostics(const std::string& stage, const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) {
    nlohmann::json r = hlps::to_json(d);
    r["stage"] = stage;
    r["event"] = "diagnostic";
    write(r);
  }
}

// ---------------------------------------------------------------------------

DesignIR import_design(const Config& config, std::vector<Diagnostic>* diags) {
  DesignIR d;
  std::vector<InterfaceRule> rules;
  if (config.sources.empty()) throw Error("config names no sources");
  for (const auto& src : config.sources) {
    const fs::path path = config.resolve(src);
    const std::string text = read_file(path, "source file");
    auto leaves = verilog::import_leaf(text);
    for (size_t i = 0; i < leaves.size(); ++i) {
      Module& m = leaves[i];
      if (d.has_module(m.name)) throw Error("module '" + m.name + "' defined twice (" + path.string() + ")");
      m.metadata.extra["source_file"] = path.filename().string();
      m.metadata.extra["source_unit"] = static_cast<int>(i);
      m.metadata.extra["source_units"] = static_cast<int>(leaves.size());
      d.modules[m.name] = m;
    }
    auto pr = parse_pragmas(text, diags);
    rules.insert(rules.end(), pr.begin(), pr.end());
  }
  for (const auto& rf : config.rules) {
    const fs::path path = config.resolve(rf);
    auto r = parse_rule_file(read_file(path, "rule file"), path.filename().string());
    rules.insert(rules.end(), r.begin(), r.end());
  }
  d = apply_rules(rules, d, diags);
  if (!config.resources.empty()) {
    const fs::path path = config.resolve(config.resources);
    const nlohmann::json j = yaml_to_json(read_file(path, "resource file"));
    if (!j.is_object()) throw Error("resource file '" + path.string() + "': expected a map of modules");
    for (const auto& [name, r] : j.items()) {
      Module* m = d.modules.count(name) ? &d.modules[name] : nullptr;
      if (!m) {
        if (diags) diags->push_back({name, "resources", Severity::warning, "resource estimate for unknown module"});
        continue;
      }
      m->metadata.resource = resources_from_json(r, path.filename().string() + ":" + name);
    }
  }
  if (!config.device.empty()) {
    const fs::path path = config.resolve(config.device);
    std::vector<std::string> warnings;
    d.device = define_device(yaml_to_json(read_file(path, "device file")), &warnings);
    if (diags) {
      for (const auto& w : warnings) diags->push_back({path.filename().string(), "device", Severity::info, w});
    }
  }
  if (!config.top.empty()) {
    if (!d.has_module(config.top)) throw Error("top module '" + config.top + "' not found in sources");
    d.top = config.top;
  } else {
    std::set<std::string> used;
    for (const auto& [name, m] : d.modules) {
      for (const auto& i : verilog::extract_instantiations(m).instantiations) used.insert(i.module_name);
    }
    std::vector<std::string> roots;
    for (const auto& [name, m] : d.modules) {
      if (!used.count(name)) roots.push_back(name);
    }
    if (roots.size() != 1) throw Error("cannot infer the top module; set 'top' in the config");
    d.top = roots.front();
  }
  return d;
}

passes::PassResult group_unpipelinable(const DesignIR& design, const std::string& module) {
  const auto graph = floorplanner::build_graph(design, module);
  std::map<std::string, std::string> parent;
  for (const auto& n : graph.nodes) parent[n] = n;
  std::function<std::string(const std::string&)> find = [&](const std::string& x) -> std::string {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& e : graph.edges) {
    if (!e.pipelinable) parent[find(e.b)] = find(e.a);
  }
  std::map<std::string, std::vector<std::string>> comps;
  std::vector<std::string> roots;
  for (const auto& n : graph.nodes) {
    const std::string r = find(n);
    if (!comps.count(r)) roots.push_back(r);
    comps[r].push_back(n);
  }
  passes::PassResult result{design, {"group", {}, {}, {}, {}}};
  int k = 0;
  for (const auto& r : roots) {
    const auto& members = comps[r];
    if (members.size() < 2) continue;
    std::vector<std::string> names;
    for (const auto& [n, m] : result.design.modules) names.push_back(n);
    const std::string name = fresh_name(module + "_grp" + std::to_string(k++), names);
    auto step = passes::group(result.design, module, members, name);
    result.design = std::move(step.design);
    auto& rep = result.report;
    rep.created.insert(rep.created.end(), step.report.created.begin(), step.report.created.end());
    rep.removed.insert(rep.removed.end(), step.report.removed.begin(), step.report.removed.end());
    rep.renamed.insert(rep.renamed.end(), step.report.renamed.begin(), step.report.renamed.end());
    rep.diagnostics.insert(rep.diagnostics.end(), step.report.diagnostics.begin(), step.report.diagnostics.end());
  }
  return result;
}

namespace {

struct StageFailure : Error {
  using Error::Error;
};

class Runner {
 public:
  Runner(const Config& c, Log& log, FlowResult& r) : config_(c), log_(log), result_(r) {
    out_ = config_.resolve(config_.output);
    snap_ = config_.snapshot_dir.empty() ? out_ / "snapshots" : config_.resolve(config_.snapshot_dir);
  }

  const fs::path& out() const { return out_; }

  void log_report(const std::string& stage, const passes::PassReport& rep) {
    nlohmann::json r = passes::to_json(rep);
    r["stage"] = stage;
    r["event"] = "pass";
    log_.write(r);
  }

  // DRC, snapshot, log. Throws StageFailure on DRC errors.
  void finish(const std::string& stage, const DesignIR& d) {
    const auto diags = drc_check(d);
    log_.diagnostics(stage, diags);
    fs::create_directories(snap_);
    const std::string name = (index_ < 9 ? "0" : "") + std::to_string(index_ + 1) + "_" + stage + ".json";
    ++index_;
    const fs::path path = snap_ / name;
    save_design(d, path.string());
    result_.snapshots.push_back(path.string());
    log_.write({{"event", "stage"},
                {"stage", stage},
                {"snapshot", path.filename().string()},
                {"modules", d.modules.size()},
                {"errors", count(diags, Severity::error)},
                {"warnings", count(diags, Severity::warning)}});
    if (has_errors(diags)) throw StageFailure("DRC errors after stage '" + stage + "'");
  }

 private:
  const Config& config_;
  Log& log_;
  FlowResult& result_;
  fs::path out_;
  fs::path snap_;
  int index_ = 0;
};

floorplanner::Options floorplan_options(const Config& c, std::unique_ptr<ilp::ExternalSolver>& holder) {
  floorplanner::Options o;
  o.method = c.method;
  o.ilp.time_limit = c.time_limit;
  if (!c.solver.empty()) {
    holder = std::make_unique<ilp::ExternalSolver>(c.solver);
    o.backend = holder.get();
  }
  return o;
}

// Stages (a) through (f).
DesignIR front_end(const Config& config, Log& log, Runner& run, std::string& stage) {
  stage = "import";
  std::vector<Diagnostic> diags;
  DesignIR d = import_design(config, &diags);
  log.diagnostics(stage, diags);
  if (!d.device) throw Error("config names no device");
  run.finish(stage, d);

  stage = "rebuild";
  for (const auto& m : config.rebuild) {
    auto r = passes::rebuild(d, m);
    run.log_report(stage, r.report);
    d = std::move(r.design);
  }
  for (const auto& m : config.lift) {
    auto r = passes::lift(d, m);
    run.log_report(stage, r.report);
    d = std::move(r.design);
  }
  run.finish(stage, d);

  stage = "infer";
  {
    auto r = passes::infer_interfaces(d);
    run.log_report(stage, r.report);
    d = std::move(r.design);
  }
  run.finish(stage, d);

  stage = "partition";
  std::vector<std::string> targets = config.partition;
  if (config.partition_default) {
    for (const auto& [name, m] : d.modules) {
      if (m.role() == "aux") targets.push_back(name);
    }
  }
  for (const auto& t : targets) {
    auto r = passes::partition(d, t);
    run.log_report(stage, r.report);
    d = std::move(r.design);
  }
  if (config.passthrough) {
    auto r = passes::passthrough(d);
    run.log_report(stage, r.report);
    d = std::move(r.design);
  }
  run.finish(stage, d);

  stage = "flatten";
  {
    auto r = passes::flatten(d, config.flatten.empty() ? d.top : config.flatten);
    run.log_report(stage, r.report);
    d = std::move(r.design);
  }
  run.finish(stage, d);

  stage = "group";
  {
    auto r = group_unpipelinable(d, d.top);
    run.log_report(stage, r.report);
    d = std::move(r.design);
  }
  run.finish(stage, d);
  return d;
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream os;
  os << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

nlohmann::json utilization(const floorplanner::PartitionGraph& g, const VirtualDevice& dev,
                           const std::map<std::string, std::string>& assignment) {
  std::map<std::string, Resources> used;
  for (const auto& n : g.nodes) {
    auto r = g.resources.at(n);
    if (r && assignment.count(n)) used[assignment.at(n)] += *r;
  }
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, slot] : dev.slots()) {
    nlohmann::json s = nlohmann::json::object();
    for (auto k : kResourceKinds) {
      const double cap = slot.capacity[static_cast<size_t>(k)];
      const double u = used[name][k];
      if (cap == 0 && u == 0) continue;
      s[std::string(to_string(k))] = {{"used", u}, {"capacity", cap}, {"fraction", cap > 0 ? u / cap : 0.0}};
    }
    j[name] = s;
  }
  return j;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write '" + p.string() + "'");
  os << text;
}

}  // namespace

FlowResult run_flow(const Config& config, Log& log) {
  FlowResult result;
  Runner run(config, log, result);
  std::string stage;
  DesignIR d;
  try {
    d = front_end(config, log, run, stage);
    const VirtualDevice& dev = *d.device;

    stage = "floorplan";
    const auto graph = floorplanner::build_graph(d, d.top, config.weight);
    std::unique_ptr<ilp::ExternalSolver> solver;
    result.floorplan = floorplanner::floorplan(graph, dev, config.limits, floorplan_options(config, solver));
    nlohmann::json fr = floorplanner::to_json(result.floorplan);
    fr["event"] = "floorplan";
    fr["stage"] = stage;
    log.write(fr);
    if (result.floorplan.status != ilp::Status::optimal && result.floorplan.status != ilp::Status::feasible) {
      throw StageFailure("no feasible floorplan: " + result.floorplan.message);
    }
    floorplanner::apply(d, d.top, result.floorplan);
    run.finish(stage, d);

    stage = "pipeline";
    result.plan = pipeline::plan(d, dev, d.top, config.pipeline);
    auto inserted = pipeline::insert(d, result.plan);
    run.log_report(stage, inserted.report);
    d = std::move(inserted.design);
    run.finish(stage, d);

    stage = "export";
    const fs::path out = run.out();
    std::vector<Diagnostic> diags;
    exporter::write_files(exporter::export_verilog(d), (out / "rtl").string());
    write_text(out / "constraints.xdc", exporter::export_constraints(d, dev, &diags));
    write_text(out / "design.dot", exporter::export_dot(d));
    log.diagnostics(stage, diags);

    nlohmann::json report;
    report["top"] = d.top;
    report["part"] = dev.part();
    report["floorplan"] = floorplanner::to_json(result.floorplan);
    report["crossings"] = result.floorplan.per_boundary_usage;
    report["utilization"] = utilization(graph, dev, result.floorplan.assignment);
    int relays = 0;
    int chains = 0;
    for (const auto& l : result.plan.links) {
      if (l.stages == 0) continue;
      relays += l.scheme == pipeline::Scheme::handshake_afifo;
      chains += l.scheme == pipeline::Scheme::feedforward_ff;
    }
    report["pipeline"] = pipeline::to_json(result.plan);
    report["pipeline"]["inserted"] = inserted.report.created;
    report["pipeline"]["relays"] = relays;
    report["pipeline"]["ff_chains"] = chains;
    report["snapshots"] = nlohmann::json::array();
    for (const auto& s : result.snapshots) report["snapshots"].push_back(fs::path(s).filename().string());
    report["generated_at"] = timestamp();
    result.report = report;
    write_text(out / "report.json", report.dump(2) + "\n");
    run.finish(stage, d);
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.failed_stage = stage;
    result.message = e.what();
    log.write({{"event", "error"}, {"stage", stage}, {"message", e.what()}});
  }
  result.design = std::move(d);
  return result;
}

std::string explore_csv(const std::vector<floorplanner::ExplorePoint>& points) {
  std::ostringstream os;
  os << "limit,status,max_utilization,wirelength,pareto\n";
  for (const auto& p : points) {
    os << p.limit << "," << ilp::to_string(p.result.status) << "," << p.max_utilization << "," << p.wirelength << ","
       << (p.pareto ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string explore_dot(const std::vector<floorplanner::ExplorePoint>& points) {
  std::ostringstream os;
  os << "digraph explore {\n  rankdir=LR;\n  node [shape=box];\n";
  std::vector<size_t> front;
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const bool ok = p.result.status == ilp::Status::optimal || p.result.status == ilp::Status::feasible;
    os << "  p" << i << " [label=\"limit " << p.limit << "\\n";
    if (ok) os << "util " << std::setprecision(3) << p.max_utilization << "\\nwire " << p.wirelength;
    else os << ilp::to_string(p.result.status);
    os << "\"" << (p.pareto ? ", style=bold" : ok ? "" : ", style=dashed") << "];\n";
    if (p.pareto) front.push_back(i);
  }
  std::sort(front.begin(), front.end(), [&](size_t a, size_t b) {
    return points[a].max_utilization < points[b].max_utilization;
  });
  for (size_t i = 1; i < front.size(); ++i) os << "  p" << front[i - 1] << " -> p" << front[i] << ";\n";
  os << "}\n";
  return os.str();
}

ExploreResult run_explore(const Config& config, Log& log) {
  ExploreResult result;
  FlowResult scratch;
  Runner run(config, log, scratch);
  std::string stage;
  try {
    if (config.schedule.empty()) throw Error("config has no explore.schedule");
    DesignIR d = front_end(config, log, run, stage);
    stage = "explore";
    const auto graph = floorplanner::build_graph(d, d.top, config.weight);
    std::unique_ptr<ilp::ExternalSolver> solver;
    result.points =
        floorplanner::explore(graph, *d.device, config.schedule, floorplan_options(config, solver), config.jobs);
    for (const auto& p : result.points) {
      log.write({{"event", "explore"},
                 {"limit", p.limit},
                 {"status", ilp::to_string(p.result.status)},
                 {"max_utilization", p.max_utilization},
                 {"wirelength", p.wirelength},
                 {"pareto", p.pareto}});
    }
    write_text(run.out() / "explore.csv", explore_csv(result.points));
    write_text(run.out() / "explore.dot", explore_dot(result.points));
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.message = e.what();
    log.write({{"event", "error"}, {"stage", stage}, {"message", e.what()}});
  }
  return result;
}

}  // namespace hlps::flow
