// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "hlps/netlist.hpp"
#include "hlps/passes.hpp"
#include "hlps/verilog.hpp"
#include "passes_util.hpp"

namespace hlps::passes {

using namespace detail;

PassResult rebuild(const DesignIR& design, const std::string& name) {
  PassResult result{design, {"rebuild", {}, {}, {}, {}}};
  DesignIR& d = result.design;
  const Module leaf = design.module(name);
  if (!leaf.is_leaf()) throw Error("module '" + name + "' is not a leaf");
  if (leaf.format != SourceFormat::verilog) throw Error("module '" + name + "': opaque leaf, cannot rebuild");
  const verilog::ParsedModule parsed = verilog::extract_instantiations(leaf);

  const std::string aux_name = fresh_name(name + "_aux", module_names(design));
  verilog::Rewriter rw(parsed);
  rw.rename_module(aux_name);

  Module g;
  g.name = name;
  g.kind = ModuleKind::grouped;
  g.ports = leaf.ports;
  g.interfaces = leaf.interfaces;
  g.metadata = leaf.metadata;
  g.metadata.resource.reset();

  std::vector<Port> mirrored;
  Resources children{};
  bool children_known = true;
  std::vector<std::string> instance_names;
  for (const auto& inst : parsed.instantiations) {
    const std::string where = "module '" + name + "', instance '" + inst.instance_name + "'";
    if (inst.positional) throw Error(where + ": positional connections cannot be rebuilt");
    if (!inst.parameters.empty()) throw Error(where + ": parameter overrides cannot be rebuilt");
    const Module* child = design.find_module(inst.module_name);
    if (!child) throw Error(where + ": unknown module '" + inst.module_name + "'");
    if (child->metadata.resource) children += *child->metadata.resource;
    else children_known = false;

    Instance ni;
    ni.instance_name = inst.instance_name;
    ni.module_name = inst.module_name;
    for (const auto& c : inst.connections) {
      if (c.expr.empty()) continue;
      const Port* cp = child->find_port(c.port);
      if (!cp) throw Error(where + ": module '" + child->name + "' has no port '" + c.port + "'");
      if (cp->direction == Direction::inout) throw Error(where + ": inout port '" + c.port + "' cannot be rebuilt");
      const std::string pn = rw.fresh(inst.instance_name + "_" + c.port);
      if (cp->direction == Direction::in) {
        rw.add_assign(pn, c.expr);
      } else {
        if (is_sized_constant(c.expr)) throw Error(where + ": output '" + c.port + "' tied to a constant");
        rw.add_assign(c.expr, pn);
      }
      mirrored.push_back({pn, flip(cp->direction), cp->width});
      g.wires.push_back({pn, cp->width});
      ni.connections[c.port] = pn;
    }
    rw.remove_instance(inst.instance_name);
    instance_names.push_back(inst.instance_name);
    g.submodules.push_back(std::move(ni));
  }
  rw.add_ports(mirrored);

  Module aux;
  aux.name = aux_name;
  aux.ports = leaf.ports;
  aux.ports.insert(aux.ports.end(), mirrored.begin(), mirrored.end());
  aux.interfaces = leaf.interfaces;
  aux.source = rw.str();
  aux.metadata.floorplan = leaf.metadata.floorplan;
  if (leaf.metadata.resource) {
    Resources r = *leaf.metadata.resource;
    if (children_known) {
      for (size_t k = 0; k < r.amount.size(); ++k) r.amount[k] = std::max(0.0, r.amount[k] - children.amount[k]);
    }
    aux.metadata.resource = r;
  }
  set_role(aux, "aux");
  aux.metadata.extra["rebuilt_from"] = name;

  // the generated text must import back to the same interface
  const verilog::ParsedModule check = verilog::parse_module(aux.source);
  if (check.ports != aux.ports) throw Error("rebuild of '" + name + "' produced an inconsistent aux module");

  std::vector<std::string> taken = instance_names;
  for (const auto& p : g.ports) taken.push_back(p.name);
  for (const auto& w : g.wires) taken.push_back(w.name);
  Instance ai;
  ai.instance_name = fresh_name(aux_name + "_inst", taken);
  ai.module_name = aux_name;
  for (const auto& p : leaf.ports) ai.connections[p.name] = p.name;
  for (const auto& p : mirrored) ai.connections[p.name] = p.name;
  g.submodules.push_back(ai);

  d.modules[name] = std::move(g);
  d.modules[aux_name] = std::move(aux);
  record_provenance(d, aux_name, name);
  record_provenance(d, element_id(name, ai.instance_name), name);
  result.report.created = {aux_name, element_id(name, ai.instance_name)};
  tidy(d);
  return result;
}

PassResult lift(const DesignIR& design, const std::string& name) {
  PassResult result{design, {"lift", {}, {}, {}, {}}};
  DesignIR& d = result.design;
  const Module& leaf = design.module(name);
  Module g = verilog::lift_structural(leaf);
  for (const auto& inst : g.submodules) {
    if (!design.has_module(inst.module_name)) {
      throw Error("module '" + name + "', instance '" + inst.instance_name + "': unknown module '" +
                  inst.module_name + "'");
    }
  }
  g.metadata.resource.reset();
  d.modules[name] = g;
  for (const auto& [net, eps] : build_nets(g)) {
    if (eps.size() <= 2) continue;
    bool all_cr = true;
    for (const auto& e : eps) {
      if (e.is_parent()) continue;
      const Module& m = d.module(g.find_instance(e.instance)->module_name);
      const InterfaceSpec* iface = m.interface_of(e.port);
      all_cr &= iface && (iface->type == InterfaceType::clock || iface->type == InterfaceType::reset);
    }
    if (!all_cr) throw Error("module '" + name + "': net '" + net + "' fans out to non-clock/reset ports");
    insert_broadcast(d, name, net);
  }
  for (const auto& inst : d.module(name).submodules) {
    if (g.find_instance(inst.instance_name)) continue;
    const std::string id = element_id(name, inst.instance_name);
    record_provenance(d, id, name);
    result.report.created.push_back(id);
  }
  tidy(d);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

std::set<std::string> claimed_ports(const Module& m) {
  std::set<std::string> out;
  for (const auto& iface : m.interfaces) {
    for (const auto& p : iface.members()) out.insert(p);
  }
  return out;
}

InterfaceSpec map_spec(const InterfaceSpec& s, const std::map<std::string, std::string>& to) {
  InterfaceSpec out;
  out.type = s.type;
  out.active = s.active;
  for (const auto& p : s.data) out.data.push_back(to.at(p));
  if (!s.valid.empty()) out.valid = to.at(s.valid);
  if (!s.ready.empty()) out.ready = to.at(s.ready);
  for (const auto& p : s.ports) out.ports.push_back(to.at(p));
  return out;
}

// Adds non-conflicting candidates to `m`; returns whether anything was added.
bool adopt(Module& m, std::vector<InterfaceSpec> candidates, PassReport& report) {
  std::map<std::string, int> uses;
  for (const auto& c : candidates) {
    for (const auto& p : c.members()) ++uses[p];
  }
  bool added = false;
  for (const auto& c : candidates) {
    bool conflict = false;
    for (const auto& p : c.members()) {
      if (uses[p] > 1) {
        conflict = true;
        report.diagnostics.push_back(
            {m.name + "." + p, "iface-infer", Severity::warning, "conflicting interface inferences; port left untyped"});
      }
    }
    if (conflict) continue;
    m.interfaces.push_back(c);
    added = true;
  }
  return added;
}

}  // namespace

bool detail::infer_from_children(DesignIR& d, Module& g, PassReport& report) {
  const auto claimed = claimed_ports(g);
  std::vector<InterfaceSpec> candidates;
  for (const auto& inst : g.submodules) {
    const Module* child = d.find_module(inst.module_name);
    if (!child) continue;
    for (const auto& s : child->interfaces) {
      std::map<std::string, std::string> to;
      bool ok = true;
      for (const auto& p : s.members()) {
        auto it = inst.connections.find(p);
        if (it == inst.connections.end() || !g.find_port(it->second) || claimed.count(it->second)) {
          ok = false;
          break;
        }
        to[p] = it->second;
      }
      if (!ok || to.empty()) continue;
      InterfaceSpec spec = map_spec(s, to);
      if (!s.clk.empty()) {
        auto it = inst.connections.find(s.clk);
        if (it != inst.connections.end() && g.find_port(it->second)) spec.clk = it->second;
      }
      candidates.push_back(std::move(spec));
    }
  }
  // one child port may reach the same parent port twice only through A1
  // violations; duplicates are dropped as conflicts by adopt()
  return adopt(g, std::move(candidates), report);
}

PassResult infer_interfaces(const DesignIR& design) {
  PassResult result{design, {"infer_interfaces", {}, {}, {}, {}}};
  DesignIR& d = result.design;
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [name, m] : d.modules) {
      if (m.is_grouped()) changed |= infer_from_children(d, m, result.report);
    }
    std::map<std::string, std::vector<InterfaceSpec>> mirrored;
    for (const auto& [name, g] : d.modules) {
      if (!g.is_grouped()) continue;
      const NetMap nets = build_nets(g);
      for (const auto& inst : g.submodules) {
        const Module* child = d.find_module(inst.module_name);
        if (!child) continue;
        for (const auto& s : child->interfaces) {
          std::map<std::string, std::string> to;
          std::string target;
          bool ok = true;
          for (const auto& p : s.members()) {
            auto it = inst.connections.find(p);
            if (it == inst.connections.end() || !is_identifier(it->second)) {
              ok = false;
              break;
            }
            auto other = peer(nets, it->second, {inst.instance_name, p});
            if (!other || other->is_parent() || (!target.empty() && other->instance != target)) {
              ok = false;
              break;
            }
            target = other->instance;
            to[p] = other->port;
          }
          if (!ok || target.empty()) continue;
          const Module* tm = d.find_module(g.find_instance(target)->module_name);
          if (!tm || !tm->is_leaf() || usage_count(d, tm->name) != 1) continue;
          const auto claimed = claimed_ports(*tm);
          if (std::any_of(to.begin(), to.end(), [&](const auto& kv) { return claimed.count(kv.second); })) continue;
          mirrored[tm->name].push_back(map_spec(s, to));
        }
      }
    }
    for (auto& [name, specs] : mirrored) changed |= adopt(d.module(name), std::move(specs), result.report);
  }
  auto& diags = result.report.diagnostics;
  std::vector<Diagnostic> unique;
  for (const auto& x : diags) {
    if (std::find(unique.begin(), unique.end(), x) == unique.end()) unique.push_back(x);
  }
  diags = std::move(unique);
  return result;
}

}  // namespace hlps::passes
