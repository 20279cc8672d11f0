// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/floorplan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include "hlps/netlist.hpp"
#include "hlps/passes.hpp"

namespace hlps::floorplanner {

namespace {

std::optional<Resources> total_resources(const DesignIR& design, const Module& m) {
  if (m.metadata.resource) return m.metadata.resource;
  if (!m.is_grouped()) return std::nullopt;
  Resources sum;
  for (const auto& inst : m.submodules) {
    const Module* c = design.find_module(inst.module_name);
    if (!c) return std::nullopt;
    auto r = total_resources(design, *c);
    if (!r) return std::nullopt;
    sum += *r;
  }
  return sum;
}

bool pipelinable_port(const Module& m, const std::string& port) {
  const InterfaceSpec* iface = m.interface_of(port);
  return iface && (iface->pipelinable() || iface->type == InterfaceType::false_path);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

PartitionGraph build_graph(const DesignIR& design, const std::string& module, Weight weight) {
  const Module& m = design.module(module.empty() ? design.top : module);
  if (!m.is_grouped()) throw Error("module '" + m.name + "' is not grouped");
  PartitionGraph g;
  std::map<std::string, size_t> index;
  std::map<std::string, std::set<std::string>> cr;
  for (const auto& inst : m.submodules) {
    const Module& child = design.module(inst.module_name);
    if (child.is_grouped() && child.role() != "group") {
      throw Error("module '" + m.name + "' is not flat: instance '" + inst.instance_name +
                  "' is a grouped module");
    }
    index[inst.instance_name] = g.nodes.size();
    g.nodes.push_back(inst.instance_name);
    g.resources[inst.instance_name] = total_resources(design, child);
    if (inst.floorplan) g.pinned[inst.instance_name] = *inst.floorplan;
    auto ports = passes::clock_reset_ports(child);
    cr[inst.instance_name] = {ports.begin(), ports.end()};
  }

  struct Acc {
    double weight = 0;
    bool pipelinable = true;
  };
  std::map<std::pair<size_t, size_t>, Acc> acc;
  for (const auto& [net, ends] : build_nets(m)) {
    std::optional<Endpoint> driver;
    bool skip = false;
    for (const auto& e : ends) {
      if (e.is_parent()) continue;
      if (cr[e.instance].count(e.port)) skip = true;
      auto dir = driving_direction(design, m, e);
      if (dir && *dir == Direction::out) driver = e;
    }
    if (skip || !driver) continue;
    const Port* dp = endpoint_port(design, m, *driver);
    const int width = dp ? dp->width : 1;
    const Module& dm = design.module(m.find_instance(driver->instance)->module_name);
    for (const auto& e : ends) {
      if (e.is_parent() || e == *driver || e.instance == driver->instance) continue;
      const Module& sm = design.module(m.find_instance(e.instance)->module_name);
      size_t a = index[driver->instance];
      size_t b = index[e.instance];
      if (a > b) std::swap(a, b);
      Acc& x = acc[{a, b}];
      x.weight += weight == Weight::bits ? width : 1;
      x.pipelinable = x.pipelinable && pipelinable_port(dm, driver->port) && pipelinable_port(sm, e.port);
    }
  }
  for (const auto& [key, x] : acc) g.edges.push_back({g.nodes[key.first], g.nodes[key.second], x.weight, x.pipelinable});
  return g;
}

// ---------------------------------------------------------------------------
// checks

double objective_of(const PartitionGraph& graph, const VirtualDevice& device,
                    const std::map<std::string, std::string>& assignment) {
  double total = 0;
  for (const auto& e : graph.edges) total += e.weight * distance(device, assignment.at(e.a), assignment.at(e.b));
  return total;
}

std::map<std::string, double> line_usage(const PartitionGraph& graph, const VirtualDevice& device,
                                         const std::map<std::string, std::string>& assignment) {
  std::map<std::string, double> out;
  for (const auto& line : device.cut_lines()) {
    double bits = 0;
    for (const auto& e : graph.edges) {
      if (device.crosses(line, assignment.at(e.a), assignment.at(e.b))) bits += e.weight;
    }
    out[line.name()] = bits;
  }
  return out;
}

namespace {

std::map<std::string, Resources> slot_usage(const PartitionGraph& graph,
                                            const std::map<std::string, std::string>& assignment) {
  std::map<std::string, Resources> usage;
  for (const auto& n : graph.nodes) {
    auto r = graph.resources.find(n);
    auto a = assignment.find(n);
    if (r == graph.resources.end() || !r->second || a == assignment.end()) continue;
    usage[a->second] += *r->second;
  }
  return usage;
}

}  // namespace

std::vector<std::string> violations(const PartitionGraph& graph, const VirtualDevice& device,
                                    const Limits& limits, const std::map<std::string, std::string>& assignment) {
  std::vector<std::string> out;
  for (const auto& n : graph.nodes) {
    auto it = assignment.find(n);
    if (it == assignment.end()) {
      out.push_back("node '" + n + "' is unassigned");
    } else if (!device.has_slot(it->second)) {
      out.push_back("node '" + n + "' assigned to unknown slot '" + it->second + "'");
    } else if (auto p = graph.pinned.find(n); p != graph.pinned.end() && p->second != it->second) {
      out.push_back("node '" + n + "' pinned to " + p->second + " but assigned to " + it->second);
    }
  }
  if (!out.empty()) return out;
  for (const auto& [slot, used] : slot_usage(graph, assignment)) {
    const Slot& s = device.slot(slot);
    for (auto k : kResourceKinds) {
      const size_t i = static_cast<size_t>(k);
      const double cap = s.capacity[i] * limits.fraction[i];
      if (used[k] > cap + 1e-6) {
        out.push_back(slot + " " + std::string(to_string(k)) + " usage " + fmt(used[k]) + " exceeds " + fmt(cap));
      }
    }
  }
  auto usage = line_usage(graph, device, assignment);
  for (const auto& line : device.cut_lines()) {
    auto cap = device.line_capacity(line);
    if (cap && usage[line.name()] > *cap + 1e-6) {
      out.push_back("line " + line.name() + " carries " + fmt(usage[line.name()]) + " bits, capacity " + fmt(*cap));
    }
  }
  for (const auto& e : graph.edges) {
    if (!e.pipelinable && assignment.at(e.a) != assignment.at(e.b)) {
      out.push_back("non-pipelinable edge " + e.a + " - " + e.b + " crosses slots");
    }
  }
  return out;
}

double max_utilization(const PartitionGraph& graph, const VirtualDevice& device,
                       const std::map<std::string, std::string>& assignment) {
  double worst = 0;
  for (const auto& [slot, used] : slot_usage(graph, assignment)) {
    const Slot& s = device.slot(slot);
    for (auto k : kResourceKinds) {
      const double cap = s.capacity[static_cast<size_t>(k)];
      if (used[k] <= 0) continue;
      worst = std::max(worst, cap > 0 ? used[k] / cap : std::numeric_limits<double>::infinity());
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// solving

namespace {

/// Nodes joined by non-pipelinable edges, collapsed.
struct Collapsed {
  std::vector<std::vector<std::string>> members;
  std::vector<Resources> resources;
  std::vector<std::optional<std::string>> pin;
  struct E {
    int a;
    int b;
    double w;
  };
  std::vector<E> edges;
  std::map<std::string, int> of;
  bool integral = true;
};

Collapsed collapse(const PartitionGraph& g, const VirtualDevice& device, std::string* conflict) {
  std::map<std::string, std::string> parent;
  for (const auto& n : g.nodes) parent[n] = n;
  std::function<std::string(const std::string&)> find = [&](const std::string& x) -> std::string {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& e : g.edges) {
    if (!e.pipelinable) {
      auto ra = find(e.a);
      auto rb = find(e.b);
      if (ra != rb) parent[rb] = ra;
    }
  }
  Collapsed c;
  std::map<std::string, int> root_index;
  for (const auto& n : g.nodes) {
    auto r = g.resources.find(n);
    if (r == g.resources.end() || !r->second) {
      throw Error("instance '" + n + "' has no resource estimate; set metadata.resource on its module");
    }
    const std::string root = find(n);
    auto [it, fresh] = root_index.emplace(root, static_cast<int>(c.members.size()));
    if (fresh) {
      c.members.emplace_back();
      c.resources.emplace_back();
      c.pin.emplace_back();
    }
    const int s = it->second;
    c.members[s].push_back(n);
    c.resources[s] += *r->second;
    c.of[n] = s;
    if (auto p = g.pinned.find(n); p != g.pinned.end()) {
      if (!device.has_slot(p->second)) throw Error("instance '" + n + "' pinned to unknown slot '" + p->second + "'");
      if (c.pin[s] && *c.pin[s] != p->second && conflict) {
        *conflict = "instances '" + c.members[s].front() + "' and '" + n +
                    "' share non-pipelinable wires but are pinned to different slots";
      }
      c.pin[s] = p->second;
    }
  }
  std::map<std::pair<int, int>, double> w;
  for (const auto& e : g.edges) {
    int a = c.of[e.a];
    int b = c.of[e.b];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    w[{a, b}] += e.weight;
    if (e.weight != std::floor(e.weight)) c.integral = false;
  }
  for (const auto& [k, v] : w) c.edges.push_back({k.first, k.second, v});
  return c;
}

struct Rect {
  int c0, c1, r0, r1;
  bool single() const { return c1 - c0 == 1 && r1 - r0 == 1; }
  std::string str() const {
    return "X" + std::to_string(c0) + "-" + std::to_string(c1 - 1) + "Y" + std::to_string(r0) + "-" +
           std::to_string(r1 - 1);
  }
};

ilp::Solution run(const ilp::Problem& p, const Options& o) {
  return o.backend ? o.backend->solve(p, o.ilp) : ilp::solve(p, o.ilp);
}

std::array<double, 5> region_capacity(const VirtualDevice& d, const Rect& r, const Limits& limits) {
  std::array<double, 5> cap{};
  for (int c = r.c0; c < r.c1; ++c) {
    for (int w = r.r0; w < r.r1; ++w) {
      const Slot& s = d.slot_at(c, w);
      for (size_t k = 0; k < 5; ++k) cap[k] += s.capacity[k] * limits.fraction[k];
    }
  }
  return cap;
}

/// Names a resource kind whose total demand exceeds the region's capacity.
std::string overflow_reason(const Collapsed& c, const std::vector<int>& nodes, const std::array<double, 5>& cap) {
  for (auto k : kResourceKinds) {
    double demand = 0;
    for (int n : nodes) demand += c.resources[n][k];
    if (demand > cap[static_cast<size_t>(k)] + 1e-6) {
      return std::string(to_string(k)) + " demand " + fmt(demand) + " exceeds capacity " +
             fmt(cap[static_cast<size_t>(k)]);
    }
  }
  return {};
}

void finish(FloorplanResult& res, const PartitionGraph& g, const VirtualDevice& d, const Collapsed& c,
            const std::vector<std::string>& slot_of) {
  for (const auto& n : g.nodes) res.assignment[n] = slot_of[c.of.at(n)];
  res.objective = objective_of(g, d, res.assignment);
  res.per_boundary_usage = line_usage(g, d, res.assignment);
}

/// Re-solves a cut problem with its weight held at the optimum found and the
/// highest per-half utilization as the objective. Returns an infeasible
/// solution when there is nothing to balance or the solve fails.
ilp::Solution balance(const ilp::Problem& cut, const ilp::Solution& best, const Collapsed& c,
                      const std::vector<int>& nodes, std::map<int, int>& var, const std::array<double, 5>& cap0,
                      const std::array<double, 5>& cap1, const Options& o) {
  ilp::Problem p = cut;
  p.integral_objective = false;
  ilp::Constraint keep{"keep_cut", {}, ilp::Sense::le, best.objective - p.offset + 1e-6};
  for (int i = 0; i < p.size(); ++i) {
    if (p.objective[i] != 0) keep.terms.push_back({i, p.objective[i]});
  }
  std::fill(p.objective.begin(), p.objective.end(), 0.0);
  p.offset = 0;
  p.add(std::move(keep));
  const int u = p.add_var("u", 0, 1e9, false, 1);
  bool any = false;
  for (auto k : kResourceKinds) {
    const size_t ki = static_cast<size_t>(k);
    double demand = 0;
    for (int v : nodes) demand += c.resources[v][k];
    if (demand == 0 || cap0[ki] <= 0 || cap1[ki] <= 0) continue;
    any = true;
    // usage1 / cap1 <= u and (demand - usage1) / cap0 <= u
    ilp::Constraint hi{"bal1", {{u, -1}}, ilp::Sense::le, 0};
    ilp::Constraint lo{"bal0", {{u, -1}}, ilp::Sense::le, -demand / cap0[ki]};
    for (int v : nodes) {
      const double a = c.resources[v][k];
      if (a == 0) continue;
      hi.terms.push_back({var[v], a / cap1[ki]});
      lo.terms.push_back({var[v], -a / cap0[ki]});
    }
    p.add(std::move(hi));
    p.add(std::move(lo));
  }
  ilp::Solution out;
  out.status = ilp::Status::infeasible;
  if (!any) return out;
  ilp::Solution s = run(p, o);
  if (s.status != ilp::Status::optimal && s.status != ilp::Status::feasible) return out;
  s.values.resize(cut.size());
  return s;
}

FloorplanResult recursive(const PartitionGraph& g, const VirtualDevice& d, const Limits& limits,
                          const Options& o, const Collapsed& c) {
  FloorplanResult res;
  const int n = static_cast<int>(c.members.size());
  std::vector<Rect> rect(n, Rect{0, d.cols(), 0, d.rows()});
  std::vector<std::string> slot_of(n);
  std::map<std::string, double> committed;
  bool timed_out = false;

  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  std::deque<std::pair<Rect, std::vector<int>>> queue;
  queue.emplace_back(Rect{0, d.cols(), 0, d.rows()}, all);
  if (d.cols() * d.rows() == 1) {
    auto reason = overflow_reason(c, all, region_capacity(d, queue.front().first, limits));
    if (!reason.empty()) {
      res.status = ilp::Status::infeasible;
      res.message = reason;
      return res;
    }
  }
  while (!queue.empty()) {
    auto [r, nodes] = std::move(queue.front());
    queue.pop_front();
    if (nodes.empty()) continue;
    if (r.single()) {
      for (int v : nodes) slot_of[v] = d.slot_at(r.c0, r.r0).name;
      continue;
    }
    const bool vertical = (r.c1 - r.c0) >= (r.r1 - r.r0);
    const int mid = vertical ? r.c0 + (r.c1 - r.c0) / 2 : r.r0 + (r.r1 - r.r0) / 2;
    const CutLine line{vertical, mid - 1};
    const Rect h0 = vertical ? Rect{r.c0, mid, r.r0, r.r1} : Rect{r.c0, r.c1, r.r0, mid};
    const Rect h1 = vertical ? Rect{mid, r.c1, r.r0, r.r1} : Rect{r.c0, r.c1, mid, r.r1};
    // side of a rectangle relative to the line: 0, 1, or -1 when it straddles
    auto side = [&](const Rect& x) {
      const int lo = vertical ? x.c0 : x.r0;
      const int hi = vertical ? x.c1 : x.r1;
      if (hi <= mid) return 0;
      if (lo >= mid) return 1;
      return -1;
    };

    ilp::Problem p;
    p.integral_objective = c.integral;
    std::map<int, int> var;
    for (int v : nodes) {
      var[v] = p.add_binary("x_" + c.members[v].front());
      if (c.pin[v]) {
        const Slot& s = d.slot(*c.pin[v]);
        const int pos = vertical ? s.col : s.row;
        const int lo = vertical ? r.c0 : r.r0;
        const int hi = vertical ? r.c1 : r.r1;
        if (pos < lo || pos >= hi) throw Error("internal: pinned node outside its region");
        const double fixed = pos >= mid ? 1 : 0;
        p.lower[var[v]] = p.upper[var[v]] = fixed;
      }
    }
    const auto cap0 = region_capacity(d, h0, limits);
    const auto cap1 = region_capacity(d, h1, limits);
    for (auto k : kResourceKinds) {
      ilp::Constraint lo{"res0_" + std::string(to_string(k)), {}, ilp::Sense::le, cap0[static_cast<size_t>(k)]};
      ilp::Constraint hi{"res1_" + std::string(to_string(k)), {}, ilp::Sense::le, cap1[static_cast<size_t>(k)]};
      double demand = 0;
      for (int v : nodes) {
        const double a = c.resources[v][k];
        if (a == 0) continue;
        demand += a;
        hi.terms.push_back({var[v], a});
        lo.terms.push_back({var[v], -a});
      }
      if (demand == 0) continue;
      lo.rhs -= demand;
      p.add(std::move(lo));
      p.add(std::move(hi));
    }
    ilp::Constraint capc{"cut_" + line.name(), {}, ilp::Sense::le, 0};
    double constant = 0;
    for (const auto& e : c.edges) {
      const bool ia = var.count(e.a);
      const bool ib = var.count(e.b);
      if (ia && ib) {
        const int z = p.add_var("z_" + c.members[e.a].front() + "_" + c.members[e.b].front(), 0, 1, false, e.w);
        p.add({"za", {{z, 1}, {var[e.a], -1}, {var[e.b], 1}}, ilp::Sense::ge, 0});
        p.add({"zb", {{z, 1}, {var[e.a], 1}, {var[e.b], -1}}, ilp::Sense::ge, 0});
        capc.terms.push_back({z, e.w});
      } else if (ia || ib) {
        const int inside = ia ? e.a : e.b;
        const int outside = ia ? e.b : e.a;
        const int s = side(rect[outside]);
        if (s < 0) continue;
        if (s == 0) {
          p.objective[var[inside]] += e.w;
          capc.terms.push_back({var[inside], e.w});
        } else {
          p.offset += e.w;
          p.objective[var[inside]] -= e.w;
          constant += e.w;
          capc.terms.push_back({var[inside], -e.w});
        }
      }
    }
    if (auto cap = d.line_capacity(line)) {
      capc.rhs = *cap - committed[line.name()] - constant;
      p.add(std::move(capc));
    }

    ilp::Solution sol = run(p, o);
    ++res.solves;
    if (sol.status == ilp::Status::infeasible || sol.status == ilp::Status::unknown) {
      res.status = sol.status == ilp::Status::unknown ? ilp::Status::unknown : ilp::Status::infeasible;
      std::string reason = overflow_reason(c, nodes, region_capacity(d, r, limits));
      if (reason.empty()) {
        reason = sol.status == ilp::Status::unknown
                     ? "time limit reached without a feasible cut"
                     : "per-half resource limits or the capacity of " + line.name() + " cannot be met";
      }
      res.message = "region " + r.str() + " cut " + line.name() + ": " + reason;
      return res;
    }
    timed_out = timed_out || sol.status == ilp::Status::feasible;
    if ((!h0.single() || !h1.single())) {
      // among cuts of this weight, prefer the one leaving the fullest half least full
      if (auto b = balance(p, sol, c, nodes, var, cap0, cap1, o); b.status != ilp::Status::infeasible) {
        ++res.solves;
        timed_out = timed_out || b.status == ilp::Status::feasible;
        sol = std::move(b);
      }
    }

    std::vector<int> n0, n1;
    for (int v : nodes) {
      if (sol.values[var[v]] > 0.5) {
        n1.push_back(v);
        rect[v] = h1;
      } else {
        n0.push_back(v);
        rect[v] = h0;
      }
    }
    // crossings of this line are now fixed for every edge with one end here
    double crossed = 0;
    for (const auto& e : c.edges) {
      const bool ia = var.count(e.a);
      const bool ib = var.count(e.b);
      if (!ia && !ib) continue;
      const int sa = side(rect[e.a]);
      const int sb = side(rect[e.b]);
      if (sa >= 0 && sb >= 0 && sa != sb) crossed += e.w;
    }
    committed[line.name()] += crossed;
    queue.emplace_back(h0, std::move(n0));
    queue.emplace_back(h1, std::move(n1));
  }
  res.status = timed_out ? ilp::Status::feasible : ilp::Status::optimal;
  finish(res, g, d, c, slot_of);
  return res;
}

FloorplanResult exact(const PartitionGraph& g, const VirtualDevice& d, const Limits& limits, const Options& o,
                      const Collapsed& c) {
  FloorplanResult res;
  const int n = static_cast<int>(c.members.size());
  std::vector<const Slot*> slots;
  for (const auto& [name, s] : d.slots()) slots.push_back(&s);
  const int m = static_cast<int>(slots.size());
  ilp::Problem p;
  p.integral_objective = c.integral;
  std::vector<std::vector<int>> x(n, std::vector<int>(m));
  for (int v = 0; v < n; ++v) {
    ilp::Constraint one{"assign_" + c.members[v].front(), {}, ilp::Sense::eq, 1};
    for (int t = 0; t < m; ++t) {
      x[v][t] = p.add_binary("x_" + c.members[v].front() + "_" + slots[t]->name);
      one.terms.push_back({x[v][t], 1});
      if (c.pin[v] && *c.pin[v] != slots[t]->name) p.upper[x[v][t]] = 0;
    }
    p.add(std::move(one));
  }
  for (int t = 0; t < m; ++t) {
    for (auto k : kResourceKinds) {
      const size_t ki = static_cast<size_t>(k);
      ilp::Constraint rc{"res_" + slots[t]->name + "_" + std::string(to_string(k)), {}, ilp::Sense::le,
                         slots[t]->capacity[ki] * limits.fraction[ki]};
      for (int v = 0; v < n; ++v) {
        if (c.resources[v][k] != 0) rc.terms.push_back({x[v][t], c.resources[v][k]});
      }
      if (!rc.terms.empty()) p.add(std::move(rc));
    }
  }
  for (const auto& line : d.cut_lines()) {
    ilp::Constraint capc{"cut_" + line.name(), {}, ilp::Sense::le, 0};
    for (const auto& e : c.edges) {
      const int z = p.add_var("z_" + line.name(), 0, 1, false, e.w);
      ilp::Constraint za{"za", {{z, 1}}, ilp::Sense::ge, 0};
      ilp::Constraint zb{"zb", {{z, 1}}, ilp::Sense::ge, 0};
      for (int t = 0; t < m; ++t) {
        const int pos = line.vertical ? slots[t]->col : slots[t]->row;
        if (pos <= line.index) continue;
        za.terms.push_back({x[e.a][t], -1});
        za.terms.push_back({x[e.b][t], 1});
        zb.terms.push_back({x[e.a][t], 1});
        zb.terms.push_back({x[e.b][t], -1});
      }
      p.add(std::move(za));
      p.add(std::move(zb));
      capc.terms.push_back({z, e.w});
    }
    if (auto cap = d.line_capacity(line); cap && !capc.terms.empty()) {
      capc.rhs = *cap;
      p.add(std::move(capc));
    }
  }
  ilp::Solution sol = run(p, o);
  res.solves = 1;
  res.status = sol.status;
  if (sol.status == ilp::Status::infeasible || sol.status == ilp::Status::unknown) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    std::string reason = overflow_reason(c, all, region_capacity(d, Rect{0, d.cols(), 0, d.rows()}, limits));
    res.message = reason.empty() ? (sol.status == ilp::Status::unknown ? "time limit reached without a feasible point"
                                                                        : "resource or wire-capacity limits cannot be met")
                                 : reason;
    return res;
  }
  std::vector<std::string> slot_of(n);
  for (int v = 0; v < n; ++v) {
    for (int t = 0; t < m; ++t) {
      if (sol.values[x[v][t]] > 0.5) slot_of[v] = slots[t]->name;
    }
  }
  finish(res, g, d, c, slot_of);
  return res;
}

/// Empty when every node fits some allowed slot and the total demand fits
/// the device; otherwise the reason.
std::string fits_anywhere(const Collapsed& c, const VirtualDevice& d, const Limits& limits) {
  std::vector<int> all(c.members.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  std::string reason = overflow_reason(c, all, region_capacity(d, Rect{0, d.cols(), 0, d.rows()}, limits));
  if (!reason.empty()) return reason;
  for (size_t v = 0; v < c.members.size(); ++v) {
    bool fits = false;
    for (const auto& [name, slot] : d.slots()) {
      if (c.pin[v] && *c.pin[v] != name) continue;
      Rect r{slot.col, slot.col + 1, slot.row, slot.row + 1};
      if (overflow_reason(c, {static_cast<int>(v)}, region_capacity(d, r, limits)).empty()) fits = true;
    }
    if (!fits) return "'" + c.members[v].front() + "' fits no " + (c.pin[v] ? "pinned " : "") + "slot";
  }
  return {};
}

}  // namespace

FloorplanResult floorplan(const PartitionGraph& graph, const VirtualDevice& device, const Limits& limits,
                          const Options& options) {
  if (device.slots().empty()) throw Error("device has no slots");
  std::string conflict;
  Collapsed c = collapse(graph, device, &conflict);
  if (!conflict.empty()) {
    FloorplanResult res;
    res.status = ilp::Status::infeasible;
    res.message = conflict;
    return res;
  }
  // cheap necessary conditions; proving these by branch and bound is slow
  if (std::string why = fits_anywhere(c, device, limits); !why.empty()) {
    FloorplanResult res;
    res.status = ilp::Status::infeasible;
    res.message = why;
    return res;
  }
  FloorplanResult res =
      options.method == Method::exact ? exact(graph, device, limits, options, c) : recursive(graph, device, limits, options, c);
  if (options.method == Method::recursive && res.status == ilp::Status::infeasible) {
    FloorplanResult whole = exact(graph, device, limits, options, c);
    whole.solves += res.solves;
    if (whole.status == ilp::Status::optimal || whole.status == ilp::Status::feasible) {
      whole.message = "recursive cut failed (" + res.message + "); solved over all slots at once";
    }
    res = std::move(whole);
  }
  if (res.status == ilp::Status::optimal || res.status == ilp::Status::feasible) {
    auto bad = violations(graph, device, limits, res.assignment);
    if (!bad.empty()) throw Error("internal: floorplan violates " + bad.front());
  }
  return res;
}

std::vector<ExplorePoint> explore(const PartitionGraph& graph, const VirtualDevice& device,
                                  const std::vector<double>& schedule, const Options& options, int jobs) {
  if (schedule.empty()) throw Error("explore needs a non-empty limit schedule");
  std::vector<ExplorePoint> out(schedule.size());
  std::vector<std::string> errors(schedule.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < schedule.size(); i = next++) {
      ExplorePoint& pt = out[i];
      pt.limit = schedule[i];
      try {
        pt.result = floorplan(graph, device, Limits::uniform(schedule[i]), options);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        continue;
      }
      if (!pt.result.assignment.empty() || graph.nodes.empty()) {
        pt.max_utilization = max_utilization(graph, device, pt.result.assignment);
        pt.wirelength = pt.result.objective;
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(schedule.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(e);
  }
  auto feasible = [](const ExplorePoint& p) {
    return p.result.status == ilp::Status::optimal || p.result.status == ilp::Status::feasible;
  };
  for (auto& p : out) {
    if (!feasible(p)) continue;
    p.pareto = std::none_of(out.begin(), out.end(), [&](const ExplorePoint& q) {
      return feasible(q) && q.max_utilization <= p.max_utilization && q.wirelength <= p.wirelength &&
             (q.max_utilization < p.max_utilization || q.wirelength < p.wirelength);
    });
  }
  return out;
}

void apply(DesignIR& design, const std::string& module, const FloorplanResult& result) {
  Module& m = design.module(module.empty() ? design.top : module);
  for (auto& inst : m.submodules) {
    auto it = result.assignment.find(inst.instance_name);
    if (it != result.assignment.end()) inst.floorplan = it->second;
  }
}

nlohmann::json to_json(const FloorplanResult& r) {
  nlohmann::json j;
  j["status"] = ilp::to_string(r.status);
  j["objective"] = r.objective;
  j["assignment"] = r.assignment;
  j["per_boundary_usage"] = r.per_boundary_usage;
  if (!r.message.empty()) j["message"] = r.message;
  j["solves"] = r.solves;
  return j;
}

nlohmann::json to_json(const PartitionGraph& g) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : g.nodes) {
    nlohmann::json node{{"name", n}};
    if (auto r = g.resources.at(n)) {
      for (auto k : kResourceKinds) {
        if ((*r)[k] != 0) node["resource"][std::string(to_string(k))] = (*r)[k];
      }
    }
    if (auto p = g.pinned.find(n); p != g.pinned.end()) node["pinned"] = p->second;
    j["nodes"].push_back(node);
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges) {
    j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}, {"pipelinable", e.pipelinable}});
  }
  return j;
}

}  // namespace hlps::floorplanner
