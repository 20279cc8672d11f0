// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "hlps/netlist.hpp"
#include "hlps/passes.hpp"
#include "passes_util.hpp"

namespace hlps::passes {

using namespace detail;

namespace {

void inline_into(DesignIR& d, const std::string& parent_name, const std::string& inst_name, PassReport& report) {
  Module& p = d.module(parent_name);
  const Instance x = *p.find_instance(inst_name);
  const Module c = d.module(x.module_name);
  if (!c.is_grouped()) throw Error("instance '" + inst_name + "' of '" + parent_name + "' is not grouped");
  std::erase_if(p.submodules, [&](const Instance& i) { return i.instance_name == inst_name; });
  std::vector<std::string> taken = local_names(p);

  std::map<std::string, std::string> wire_map;
  for (const auto& w : c.wires) {
    const std::string n = fresh_name(inst_name + "__" + w.name, taken);
    taken.push_back(n);
    wire_map[w.name] = n;
    p.wires.push_back({n, w.width});
  }
  std::map<std::string, int> inner_uses;
  for (const auto& y : c.submodules) {
    for (const auto& [port, v] : y.connections) {
      if (c.find_port(v)) ++inner_uses[v];
    }
  }
  for (const auto& y : c.submodules) {
    const std::string base = y.instance_name == inst_name ? inst_name : inst_name + "__" + y.instance_name;
    const std::string n = fresh_name(base, taken);
    taken.push_back(n);
    Instance ny;
    ny.instance_name = n;
    ny.module_name = y.module_name;
    ny.floorplan = y.floorplan ? y.floorplan : x.floorplan;
    for (const auto& [port, v] : y.connections) {
      if (auto it = wire_map.find(v); it != wire_map.end()) {
        ny.connections[port] = it->second;
      } else if (c.find_port(v)) {
        auto ot = x.connections.find(v);
        if (ot != x.connections.end()) ny.connections[port] = ot->second;
      } else {
        ny.connections[port] = v;
      }
    }
    p.submodules.push_back(std::move(ny));
    record_provenance(d, element_id(parent_name, n), element_id(c.name, y.instance_name));
    report.created.push_back(element_id(parent_name, n));
    if (n != base) report.renamed.emplace_back(element_id(c.name, y.instance_name), element_id(parent_name, n));
  }
  // a port of the inlined module that nothing inside uses leaves its outer
  // wire with a single endpoint
  for (const auto& port : c.ports) {
    if (inner_uses[port.name]) continue;
    auto ot = x.connections.find(port.name);
    if (ot == x.connections.end() || !p.find_wire(ot->second)) continue;
    const std::string w = ot->second;
    std::erase_if(p.wires, [&](const Wire& wire) { return wire.name == w; });
    for (auto& sub : p.submodules) std::erase_if(sub.connections, [&](const auto& kv) { return kv.second == w; });
  }
  report.removed.push_back(element_id(parent_name, inst_name));
}

}  // namespace

PassResult inline_instance(const DesignIR& design, const std::string& parent, const std::string& instance) {
  PassResult result{design, {"inline", {}, {}, {}, {}}};
  const Module& p = design.module(parent);
  if (!p.is_grouped() || !p.find_instance(instance)) {
    throw Error("no instance '" + instance + "' in grouped module '" + parent + "'");
  }
  inline_into(result.design, parent, instance, result.report);
  tidy(result.design);
  return result;
}

PassResult flatten(const DesignIR& design, const std::string& module) {
  PassResult result{design, {"flatten", {}, {}, {}, {}}};
  DesignIR& d = result.design;
  if (!d.module(module).is_grouped()) throw Error("module '" + module + "' is not grouped");
  while (true) {
    const Module& g = d.module(module);
    auto it = std::find_if(g.submodules.begin(), g.submodules.end(), [&](const Instance& i) {
      const Module* m = d.find_module(i.module_name);
      return m && m->is_grouped();
    });
    if (it == g.submodules.end()) break;
    const std::string target = it->instance_name;
    inline_into(d, module, target, result.report);
  }
  auto& created = result.report.created;
  std::erase_if(created, [&](const std::string& id) {
    return std::find(result.report.removed.begin(), result.report.removed.end(), id) != result.report.removed.end();
  });
  tidy(d);
  return result;
}

// ---------------------------------------------------------------------------

WrapTemplate identity_template(const DesignIR& design, const std::string& parent, const std::string& instance,
                               const std::string& wrapper_name) {
  const Instance* inst = design.module(parent).find_instance(instance);
  if (!inst) throw Error("no instance '" + instance + "' in '" + parent + "'");
  const Module& m = design.module(inst->module_name);
  WrapTemplate t;
  t.wrapper_name = wrapper_name;
  t.ports = m.ports;
  t.interfaces = m.interfaces;
  for (const auto& p : m.ports) t.inner[p.name] = p.name;
  return t;
}

PassResult wrap(const DesignIR& design, const std::string& parent_name, const std::string& inst_name,
                const WrapTemplate& tpl) {
  PassResult result{design, {"wrap", {}, {}, {}, {}}};
  DesignIR& d = result.design;
  Module& parent = d.module(parent_name);
  if (!parent.is_grouped()) throw Error("module '" + parent_name + "' is not grouped");
  Instance* found = parent.find_instance(inst_name);
  if (!found) throw Error("no instance '" + inst_name + "' in '" + parent_name + "'");
  const Instance x = *found;
  const Module& m = d.module(x.module_name);
  if (d.has_module(tpl.wrapper_name)) throw Error("module '" + tpl.wrapper_name + "' already exists");
  if (!is_identifier(tpl.wrapper_name)) throw Error("invalid wrapper name '" + tpl.wrapper_name + "'");

  std::vector<std::string> unbound;
  for (const auto& p : m.ports) {
    if (!tpl.inner.count(p.name)) unbound.push_back(p.name);
  }
  for (const auto& [port, v] : tpl.inner) {
    if (!m.find_port(port)) unbound.push_back(port + " (not a port of " + m.name + ")");
  }
  if (!unbound.empty()) {
    std::string list;
    for (const auto& u : unbound) list += (list.empty() ? "" : ", ") + u;
    throw Error("template '" + tpl.wrapper_name + "' does not match '" + m.name + "': unbound ports " + list);
  }

  Module w;
  w.name = tpl.wrapper_name;
  w.kind = ModuleKind::grouped;
  w.ports = tpl.ports;
  w.interfaces = tpl.interfaces;
  w.wires = tpl.nets;
  // a wrapped broadcast cell still drives a clock/reset fan-out
  set_role(w, m.role() == "broadcast" ? "broadcast" : "wrapper");
  for (const auto& [k, v] : tpl.extra.items()) w.metadata.extra[k] = v;
  auto valid_value = [&](const std::string& v) {
    return v.empty() || is_sized_constant(v) || w.find_port(v) || w.find_wire(v);
  };

  Instance inner;
  inner.instance_name = tpl.inner_instance.empty() ? inst_name : tpl.inner_instance;
  inner.module_name = m.name;
  for (const auto& [port, v] : tpl.inner) {
    if (!valid_value(v)) throw Error("template '" + w.name + "': '" + v + "' is not a wrapper port or net");
    if (v.empty()) continue;
    const Port* wp = w.find_port(v);
    if (wp && wp->width != m.find_port(port)->width) {
      throw Error("template '" + w.name + "': width mismatch between '" + port + "' and '" + v + "'");
    }
    inner.connections[port] = v;
  }
  w.submodules.push_back(inner);
  for (const auto& h : tpl.helpers) {
    if (!d.has_module(h.module_name)) throw Error("template '" + w.name + "': unknown helper module '" + h.module_name + "'");
    if (w.find_instance(h.instance_name)) throw Error("template '" + w.name + "': duplicate instance '" + h.instance_name + "'");
    Instance hi{h.instance_name, h.module_name, {}, std::nullopt};
    for (const auto& [port, v] : h.connections) {
      if (!valid_value(v)) throw Error("template '" + w.name + "': '" + v + "' is not a wrapper port or net");
      if (!v.empty()) hi.connections[port] = v;
    }
    w.submodules.push_back(std::move(hi));
  }

  Instance wi;
  wi.instance_name = inst_name;
  wi.module_name = w.name;
  wi.floorplan = x.floorplan;
  for (const auto& p : w.ports) {
    if (auto it = tpl.parent_connections.find(p.name); it != tpl.parent_connections.end()) {
      if (!it->second.empty()) wi.connections[p.name] = it->second;
      continue;
    }
    for (const auto& [port, v] : tpl.inner) {
      if (v != p.name) continue;
      if (auto ct = x.connections.find(port); ct != x.connections.end()) wi.connections[p.name] = ct->second;
      break;
    }
  }
  for (const auto& [port, v] : x.connections) {
    if (is_sized_constant(v)) continue;
    bool kept = std::any_of(wi.connections.begin(), wi.connections.end(), [&](const auto& kv) { return kv.second == v; });
    if (!kept) throw Error("template '" + w.name + "' hides port '" + port + "' which is connected in '" + parent_name + "'");
  }
  *found = wi;
  d.modules[w.name] = std::move(w);
  record_provenance(d, tpl.wrapper_name, m.name);
  record_provenance(d, element_id(tpl.wrapper_name, inner.instance_name), element_id(parent_name, inst_name));
  for (const auto& h : tpl.helpers) {
    record_provenance(d, element_id(tpl.wrapper_name, h.instance_name), element_id(parent_name, inst_name));
    result.report.created.push_back(element_id(tpl.wrapper_name, h.instance_name));
  }
  result.report.created.push_back(tpl.wrapper_name);
  result.report.created.push_back(element_id(tpl.wrapper_name, inner.instance_name));
  tidy(d);
  return result;
}

// ---------------------------------------------------------------------------

PassResult group(const DesignIR& design, const std::string& parent_name, const std::vector<std::string>& members,
                 const std::string& new_name) {
  PassResult result{design, {"group", {}, {}, {}, {}}};
  DesignIR& d = result.design;
  Module& p = d.module(parent_name);
  if (!p.is_grouped()) throw Error("module '" + parent_name + "' is not grouped");
  if (members.empty()) throw Error("group needs at least one instance");
  std::set<std::string> inside;
  for (const auto& i : members) {
    if (!p.find_instance(i)) throw Error("instances are not siblings under '" + parent_name + "': '" + i + "' not found");
    if (!inside.insert(i).second) throw Error("instance '" + i + "' listed twice");
  }
  if (d.has_module(new_name) || !is_identifier(new_name)) throw Error("invalid or taken module name '" + new_name + "'");

  Module g;
  g.name = new_name;
  g.kind = ModuleKind::grouped;
  set_role(g, "group");
  for (const auto& i : p.submodules) {
    if (inside.count(i.instance_name)) g.submodules.push_back(i);
  }
  std::vector<std::string> taken = local_names(p);
  taken.push_back(new_name);
  const std::string gi_name = fresh_name(new_name + "_inst", taken);
  taken.push_back(gi_name);
  Instance gi{gi_name, new_name, {}, std::nullopt};

  auto interface_of_endpoint = [&](const Endpoint& e) -> const InterfaceSpec* {
    const Module* owner = e.is_parent() ? &p : d.find_module(p.find_instance(e.instance)->module_name);
    return owner ? owner->interface_of(e.port) : nullptr;
  };
  std::vector<std::string> moved_wires;
  std::vector<std::string> rebroadcast;
  const NetMap nets = build_nets(p);
  for (const auto& [net, eps] : nets) {
    std::vector<Endpoint> in, out;
    for (const auto& e : eps) (!e.is_parent() && inside.count(e.instance) ? in : out).push_back(e);
    if (in.empty()) continue;
    const Wire* wire = p.find_wire(net);
    const int width = wire ? wire->width : p.find_port(net)->width;
    if (out.empty()) {
      g.wires.push_back({net, width});
      moved_wires.push_back(net);
      continue;
    }
    std::optional<Endpoint> driver;
    for (const auto& e : eps) {
      auto dir = driving_direction(d, p, e);
      if (dir && *dir == Direction::out) driver = e;
    }
    const bool driven_inside = driver && !driver->is_parent() && inside.count(driver->instance);
    if (eps.size() <= 2) {
      auto dir = driver ? (driven_inside ? Direction::out : Direction::in) : Direction::inout;
      for (const auto& e : in) {
        if (auto dd = driving_direction(d, p, e); dd && *dd == Direction::inout) dir = Direction::inout;
      }
      g.ports.push_back({net, dir, width});
      gi.connections[net] = net;
      continue;
    }
    // clock/reset fan-out: one group port per endpoint crossing the boundary
    auto cr_spec = [&](const Endpoint& e, const std::string& port) {
      InterfaceSpec s;
      s.type = InterfaceType::clock;
      if (const InterfaceSpec* i = interface_of_endpoint(e)) {
        s.type = i->type;
        s.active = i->active;
      }
      s.ports = {port};
      return s;
    };
    if (!driven_inside) {
      for (const auto& e : in) {
        std::vector<std::string> local = local_names(g);
        const std::string port = fresh_name(e.instance + "_" + e.port, local);
        g.ports.push_back({port, Direction::in, width});
        g.interfaces.push_back(cr_spec(e, port));
        for (auto& sub : g.submodules) {
          if (sub.instance_name == e.instance) sub.connections[e.port] = port;
        }
        gi.connections[port] = net;
      }
    } else if (std::none_of(out.begin(), out.end(), [](const Endpoint& e) { return e.is_parent(); })) {
      // the group port joins the internal broadcast net as one more sink;
      // several outside sinks get a broadcast cell of their own
      g.ports.push_back({net, Direction::out, width});
      g.interfaces.push_back(cr_spec(*driver, net));
      gi.connections[net] = net;
      if (out.size() > 1) rebroadcast.push_back(net);
    } else {
      throw Error("cannot group: broadcast net '" + net + "' also drives a port of '" + parent_name + "'");
    }
  }
  std::erase_if(p.wires, [&](const Wire& w) {
    return std::find(moved_wires.begin(), moved_wires.end(), w.name) != moved_wires.end();
  });
  std::erase_if(p.submodules, [&](const Instance& i) { return inside.count(i.instance_name) > 0; });

  Resources total{};
  bool all_known = true;
  std::optional<std::string> slot;
  bool same_slot = true;
  for (const auto& i : g.submodules) {
    const Module& m = d.module(i.module_name);
    if (m.metadata.resource) total += *m.metadata.resource;
    else all_known = false;
    if (!i.floorplan || (slot && *slot != *i.floorplan)) same_slot = false;
    if (i.floorplan) slot = i.floorplan;
  }
  if (all_known) g.metadata.resource = total;
  if (same_slot && slot) gi.floorplan = slot;
  p.submodules.push_back(gi);
  d.modules[new_name] = g;
  for (const auto& net : rebroadcast) insert_broadcast(d, parent_name, net);
  infer_from_children(d, d.module(new_name), result.report);
  record_provenance(d, new_name, parent_name);
  for (const auto& i : g.submodules) {
    record_provenance(d, element_id(new_name, i.instance_name), element_id(parent_name, i.instance_name));
    result.report.created.push_back(element_id(new_name, i.instance_name));
    result.report.removed.push_back(element_id(parent_name, i.instance_name));
  }
  result.report.created.push_back(new_name);
  result.report.created.push_back(element_id(parent_name, gi_name));
  tidy(d);
  return result;
}

}  // namespace hlps::passes
