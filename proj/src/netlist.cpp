// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/netlist.hpp"

namespace hlps {

NetMap build_nets(const Module& grouped) {
  NetMap nets;
  for (const auto& p : grouped.ports) nets[p.name].push_back({"", p.name});
  for (const auto& w : grouped.wires) nets[w.name];
  for (const auto& inst : grouped.submodules) {
    for (const auto& [port, value] : inst.connections) {
      if (is_sized_constant(value)) continue;
      nets[value].push_back({inst.instance_name, port});
    }
  }
  return nets;
}

std::optional<Endpoint> peer(const NetMap& nets, const std::string& net, const Endpoint& self) {
  auto it = nets.find(net);
  if (it == nets.end() || it->second.size() != 2) return std::nullopt;
  if (it->second[0] == self) return it->second[1];
  if (it->second[1] == self) return it->second[0];
  return std::nullopt;
}

const Port* endpoint_port(const DesignIR& design, const Module& grouped, const Endpoint& e) {
  if (e.is_parent()) return grouped.find_port(e.port);
  const Instance* inst = grouped.find_instance(e.instance);
  if (!inst) return nullptr;
  const Module* m = design.find_module(inst->module_name);
  return m ? m->find_port(e.port) : nullptr;
}

std::optional<Direction> driving_direction(const DesignIR& design, const Module& grouped,
                                           const Endpoint& e) {
  const Port* p = endpoint_port(design, grouped, e);
  if (!p) return std::nullopt;
  return e.is_parent() ? flip(p->direction) : p->direction;
}

}  // namespace hlps
