// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "hlps/netlist.hpp"
#include "hlps/passes.hpp"
#include "hlps/verilog.hpp"
#include "passes_util.hpp"

namespace hlps::passes {

namespace detail {

std::vector<std::string> local_names(const Module& m) {
  std::vector<std::string> out;
  for (const auto& p : m.ports) out.push_back(p.name);
  for (const auto& w : m.wires) out.push_back(w.name);
  for (const auto& i : m.submodules) out.push_back(i.instance_name);
  return out;
}

std::vector<std::string> module_names(const DesignIR& design) {
  std::vector<std::string> out;
  for (const auto& [name, m] : design.modules) out.push_back(name);
  return out;
}

int usage_count(const DesignIR& design, const std::string& module) {
  int n = 0;
  for (const auto& [name, m] : design.modules) {
    if (m.is_grouped()) {
      for (const auto& inst : m.submodules) n += inst.module_name == module;
    } else if (m.format == SourceFormat::verilog && !m.source.empty()) {
      try {
        for (const auto& inst : verilog::extract_instantiations(m).instantiations) {
          n += inst.module_name == module;
        }
      } catch (const Error&) {
      }
    }
  }
  return n;
}

void tidy(DesignIR& design) {
  prune_unreferenced(design);
  prune_provenance(design);
}

void set_role(Module& m, const std::string& role) {
  if (!m.metadata.extra.is_object()) m.metadata.extra = nlohmann::json::object();
  m.metadata.extra["role"] = role;
}

}  // namespace detail

using namespace detail;

nlohmann::json to_json(const PassReport& r) {
  nlohmann::json j;
  j["pass"] = r.pass;
  j["created"] = r.created;
  j["removed"] = r.removed;
  j["renamed"] = nlohmann::json::array();
  for (const auto& [from, to] : r.renamed) j["renamed"].push_back({{"from", from}, {"to", to}});
  j["diagnostics"] = nlohmann::json::array();
  for (const auto& d : r.diagnostics) j["diagnostics"].push_back(hlps::to_json(d));
  return j;
}

std::vector<std::pair<std::string, std::string>> instances_of(const DesignIR& design,
                                                              const std::string& module) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, m] : design.modules) {
    for (const auto& inst : m.submodules) {
      if (inst.module_name == module) out.emplace_back(name, inst.instance_name);
    }
  }
  return out;
}

std::vector<std::string> clock_reset_ports(const Module& m) {
  std::set<std::string> cr;
  for (const auto& iface : m.interfaces) {
    if (iface.type == InterfaceType::clock || iface.type == InterfaceType::reset) {
      cr.insert(iface.ports.begin(), iface.ports.end());
    }
    if (!iface.clk.empty()) cr.insert(iface.clk);
  }
  std::vector<std::string> out;
  for (const auto& p : m.ports) {
    if (cr.count(p.name)) out.push_back(p.name);
  }
  return out;
}

std::vector<std::vector<std::string>> port_components(const Module& leaf) {
  if (!leaf.is_leaf()) throw Error("module '" + leaf.name + "' is not a leaf");
  auto cr_list = clock_reset_ports(leaf);
  std::set<std::string> cr(cr_list.begin(), cr_list.end());
  UnionFind uf;
  auto unite_all = [&](const std::vector<std::string>& ids) {
    const std::string* first = nullptr;
    for (const auto& id : ids) {
      if (cr.count(id)) continue;
      if (first) uf.unite(*first, id);
      else first = &id;
    }
  };
  const nlohmann::json& extra = leaf.metadata.extra;
  if (extra.is_object() && extra.contains("connectivity")) {
    for (const auto& group : extra["connectivity"]) {
      unite_all(group.get<std::vector<std::string>>());
    }
  } else if (leaf.format == SourceFormat::verilog) {
    for (const auto& s : verilog::extract_instantiations(leaf).statements) unite_all(s.identifiers);
  } else {
    throw Error("module '" + leaf.name + "': opaque leaf without a connectivity sidecar");
  }
  for (const auto& iface : leaf.interfaces) {
    if (iface.type == InterfaceType::clock || iface.type == InterfaceType::reset) continue;
    unite_all(iface.members());
  }
  std::map<std::string, size_t> index_of_root;
  std::vector<std::vector<std::string>> comps;
  for (const auto& p : leaf.ports) {
    if (cr.count(p.name)) continue;
    const std::string root = uf.find(p.name);
    auto it = index_of_root.find(root);
    if (it == index_of_root.end()) {
      index_of_root.emplace(root, comps.size());
      comps.push_back({p.name});
    } else {
      comps[it->second].push_back(p.name);
    }
  }
  return comps;
}

namespace {

Module make_bcast_module(const std::string& name, InterfaceType type, const std::string& active, int width) {
  Module m;
  m.name = name;
  m.ports = {{"i", Direction::in, width}, {"o", Direction::out, width}};
  m.source = "module " + name + " (\n  " + verilog::declaration(m.ports[0]) + ",\n  " +
             verilog::declaration(m.ports[1]) + "\n);\n  assign o = i;\nendmodule\n";
  InterfaceSpec in;
  in.type = type;
  in.ports = {"i"};
  in.active = active;
  InterfaceSpec out = in;
  out.ports = {"o"};
  m.interfaces = {in, out};
  m.metadata.resource = Resources{};
  set_role(m, "broadcast");
  return m;
}

}  // namespace

std::string tap_clock_reset(DesignIR& design, const std::string& parent, const std::string& instance,
                            const std::string& port) {
  Module& p = design.module(parent);
  Instance* inst = p.find_instance(instance);
  if (!inst) throw Error("no instance '" + instance + "' in '" + parent + "'");
  auto cit = inst->connections.find(port);
  if (cit == inst->connections.end() || !is_identifier(cit->second)) {
    throw Error(parent + "/" + instance + "." + port + " is not connected to a net");
  }
  const std::string net = cit->second;
  NetMap nets = build_nets(p);
  std::optional<Endpoint> driver;
  for (const auto& e : nets[net]) {
    auto dir = driving_direction(design, p, e);
    if (dir && *dir == Direction::out) driver = e;
  }
  if (!driver) throw Error("net '" + net + "' in '" + parent + "' has no driver");
  if (!driver->is_parent()) {
    const Module* dm = design.find_module(p.find_instance(driver->instance)->module_name);
    if (dm && dm->role() == "broadcast") return net;
  }

  return insert_broadcast(design, parent, net);
}

std::string insert_broadcast(DesignIR& design, const std::string& parent, const std::string& net) {
  Module& p = design.module(parent);
  NetMap nets = build_nets(p);
  auto nit = nets.find(net);
  if (nit == nets.end()) throw Error("no net '" + net + "' in '" + parent + "'");
  std::optional<Endpoint> driver;
  const InterfaceSpec* iface = nullptr;
  for (const auto& e : nit->second) {
    auto dir = driving_direction(design, p, e);
    if (dir && *dir == Direction::out) {
      driver = e;
      continue;
    }
    if (e.is_parent()) throw Error("net '" + net + "' in '" + parent + "' drives a module port; cannot broadcast");
    const Module* m = design.find_module(p.find_instance(e.instance)->module_name);
    if (!iface && m) iface = m->interface_of(e.port);
  }
  if (!driver) throw Error("net '" + net + "' in '" + parent + "' has no driver");
  InterfaceType type = iface && iface->type == InterfaceType::reset ? InterfaceType::reset : InterfaceType::clock;
  const std::string active = iface ? iface->active : std::string();
  const Wire* w = p.find_wire(net);
  const int width = w ? w->width : p.find_port(net)->width;
  std::string mname = "hlps_bcast_" + std::string(to_string(type));
  if (!active.empty()) mname += "_" + active;
  if (width > 1) mname += "_w" + std::to_string(width);
  if (auto* existing = design.find_module(mname); existing && existing->role() != "broadcast") {
    throw Error("module name '" + mname + "' is taken");
  }
  if (!design.has_module(mname)) design.modules[mname] = make_bcast_module(mname, type, active, width);

  auto taken = local_names(p);
  std::string bname = fresh_name(net + "_bcast", taken);
  taken.push_back(bname);
  std::string out_net = fresh_name(net + "_b", taken);
  std::optional<std::string> slot;
  for (auto& sub : p.submodules) {
    for (auto& [sp, value] : sub.connections) {
      if (value != net || (!driver->is_parent() && sub.instance_name == driver->instance && sp == driver->port)) {
        continue;
      }
      value = out_net;
      if (!slot) slot = sub.floorplan;
    }
  }
  p.wires.push_back({out_net, width});
  Instance b;
  b.instance_name = bname;
  b.module_name = mname;
  b.connections = {{"i", net}, {"o", out_net}};
  b.floorplan = slot;
  p.submodules.push_back(std::move(b));
  return out_net;
}

PassResult run_pass(const DesignIR& design, const std::string& name, const nlohmann::json& args) {
  auto arg = [&](const char* key) {
    if (!args.is_object() || !args.contains(key) || !args[key].is_string()) {
      throw Error("pass '" + name + "' needs string argument '" + key + "'");
    }
    return args[key].get<std::string>();
  };
  if (name == "rebuild") return rebuild(design, arg("module"));
  if (name == "lift") return lift(design, arg("module"));
  if (name == "infer_interfaces") return infer_interfaces(design);
  if (name == "partition") return partition(design, arg("leaf"));
  if (name == "passthrough") return passthrough(design);
  if (name == "flatten") return flatten(design, arg("module"));
  if (name == "group") {
    if (!args.contains("instances") || !args["instances"].is_array()) {
      throw Error("pass 'group' needs a list argument 'instances'");
    }
    return group(design, arg("parent"), args["instances"].get<std::vector<std::string>>(), arg("name"));
  }
  if (name == "wrap") {
    const std::string parent = arg("parent");
    const std::string instance = arg("instance");
    return wrap(design, parent, instance, identity_template(design, parent, instance, arg("wrapper")));
  }
  throw Error("unknown pass '" + name + "'");
}

}  // namespace hlps::passes
