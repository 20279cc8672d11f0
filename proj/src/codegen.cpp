// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/codegen.hpp"

#include <algorithm>
#include <set>

#include "hlps/verilog.hpp"

namespace hlps::codegen {

std::string header(const std::string& name, const std::vector<Port>& ports) {
  if (ports.empty()) return "module " + name + ";\n";
  std::string out = "module " + name + " (\n";
  for (size_t k = 0; k < ports.size(); ++k) {
    out += "  " + verilog::declaration(ports[k]) + (k + 1 < ports.size() ? ",\n" : "\n");
  }
  return out + ");\n";
}

std::string instance(const std::string& module, const std::string& name,
                     const std::vector<std::pair<std::string, std::string>>& connections,
                     const std::string& indent) {
  if (connections.empty()) return indent + module + " " + name + " ();\n";
  std::string out = indent + module + " " + name + " (\n";
  for (size_t k = 0; k < connections.size(); ++k) {
    out += indent + "  ." + connections[k].first + "(" + connections[k].second + ")" +
           (k + 1 < connections.size() ? ",\n" : "\n");
  }
  return out + indent + ");\n";
}

std::string grouped(const DesignIR& design, const Module& m) {
  std::string out = header(m.name, m.ports);
  if (!m.wires.empty()) out += "\n";
  for (const auto& w : m.wires) out += "  wire " + verilog::range(w.width) + w.name + ";\n";
  for (const auto& inst : m.submodules) {
    std::vector<std::pair<std::string, std::string>> conns;
    std::set<std::string> done;
    if (const Module* child = design.find_module(inst.module_name)) {
      for (const auto& p : child->ports) {
        auto it = inst.connections.find(p.name);
        conns.emplace_back(p.name, it == inst.connections.end() ? std::string() : it->second);
        done.insert(p.name);
      }
    }
    for (const auto& [port, value] : inst.connections) {
      if (!done.count(port)) conns.emplace_back(port, value);
    }
    out += "\n" + instance(inst.module_name, inst.instance_name, conns);
  }
  return out + "\nendmodule\n";
}

std::string wrapper(const std::string& name, const std::vector<Port>& ports, const Module& inner,
                    const std::string& inner_instance, const std::vector<std::string>& exposed,
                    const std::vector<std::pair<std::string, std::string>>& assigns) {
  std::string out = header(name, ports) + "\n";
  std::vector<std::pair<std::string, std::string>> conns;
  for (const auto& p : inner.ports) {
    bool on = std::find(exposed.begin(), exposed.end(), p.name) != exposed.end();
    conns.emplace_back(p.name, on ? p.name : std::string());
  }
  out += instance(inner.name, inner_instance, conns);
  if (!assigns.empty()) out += "\n";
  for (const auto& [lhs, rhs] : assigns) out += "  assign " + lhs + " = " + rhs + ";\n";
  return out + "\nendmodule\n";
}

}  // namespace hlps::codegen
