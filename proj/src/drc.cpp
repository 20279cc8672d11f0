// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/drc.hpp"

#include <functional>
#include <set>

#include "hlps/netlist.hpp"

namespace hlps {

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::error: return "error";
    case Severity::warning: return "warning";
    case Severity::info: return "info";
  }
  return "error";
}

nlohmann::json to_json(const Diagnostic& d) {
  return {{"path", d.path}, {"rule", d.rule}, {"severity", to_string(d.severity)}, {"message", d.message}};
}

std::string format(const Diagnostic& d) {
  return std::string(to_string(d.severity)) + " [" + d.rule + "] " + d.path + ": " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& diags) { return count(diags, Severity::error) > 0; }

size_t count(const std::vector<Diagnostic>& diags, Severity s) {
  size_t n = 0;
  for (const auto& d : diags) n += d.severity == s;
  return n;
}

namespace {

class Checker {
 public:
  explicit Checker(const DesignIR& d) : d_(d) {}

  std::vector<Diagnostic> run() {
    if (!d_.top.empty() && !d_.has_module(d_.top)) {
      error(d_.top, "dangling", "top module '" + d_.top + "' does not exist");
    } else if (d_.top.empty() && !d_.modules.empty()) {
      error("", "dangling", "design has modules but no top");
    }
    for (const auto& [name, m] : d_.modules) {
      if (m.name != name) error(name, "dangling", "module keyed as '" + name + "' is named '" + m.name + "'");
      check_module(m);
    }
    check_recursion();
    return std::move(out_);
  }

 private:
  void add(std::string path, std::string rule, Severity s, std::string msg) {
    out_.push_back({std::move(path), std::move(rule), s, std::move(msg)});
  }
  void error(std::string path, std::string rule, std::string msg) {
    add(std::move(path), std::move(rule), Severity::error, std::move(msg));
  }
  void warning(std::string path, std::string rule, std::string msg) {
    add(std::move(path), std::move(rule), Severity::warning, std::move(msg));
  }

  void check_slot(const std::string& path, const std::string& slot) {
    if (d_.device) {
      if (!d_.device->has_slot(slot)) error(path, "floorplan", "unknown slot '" + slot + "'");
    } else if (!parse_slot_name(slot)) {
      error(path, "floorplan", "malformed slot name '" + slot + "'");
    }
  }

  void check_module(const Module& m) {
    std::set<std::string> names;
    for (const auto& p : m.ports) {
      if (!names.insert(p.name).second) error(m.name + "." + p.name, "port", "duplicate port name");
      if (p.width < 1) error(m.name + "." + p.name, "width", "port width must be at least 1");
      if (!is_identifier(p.name)) error(m.name + "." + p.name, "port", "port name is not an identifier");
    }
    check_interfaces(m);
    if (m.metadata.resource) {
      for (ResourceKind k : kResourceKinds) {
        if ((*m.metadata.resource)[k] < 0) {
          error(m.name, "resource", std::string(to_string(k)) + " count is negative");
        }
      }
    }
    if (m.metadata.floorplan) check_slot(m.name, *m.metadata.floorplan);
    if (m.is_leaf()) {
      if (m.source.empty()) warning(m.name, "source", "leaf module has no source");
      if (!m.wires.empty() || !m.submodules.empty()) {
        error(m.name, "leaf", "leaf module carries wires or submodules");
      }
      return;
    }
    if (!m.source.empty()) error(m.name, "grouped", "grouped module carries source text");
    check_grouped(m, names);
  }

  void check_interfaces(const Module& m) {
    std::map<std::string, int> membership;
    for (size_t k = 0; k < m.interfaces.size(); ++k) {
      const auto& iface = m.interfaces[k];
      const std::string path = m.name + "#iface" + std::to_string(k);
      bool ports_ok = true;
      for (const auto& p : iface.all_ports()) {
        const Port* port = m.find_port(p);
        if (!port) {
          error(path, "iface", "interface names missing port '" + p + "'");
          ports_ok = false;
        } else if (port->direction == Direction::inout) {
          error(path, "iface", "inout port '" + p + "' cannot belong to an interface");
        }
      }
      for (const auto& p : iface.members()) ++membership[p];
      switch (iface.type) {
        case InterfaceType::handshake: {
          if (iface.valid.empty() || iface.ready.empty()) {
            error(path, "iface-role", "handshake needs exactly one valid and one ready port");
            break;
          }
          if (!iface.ports.empty()) error(path, "iface-role", "handshake cannot list plain ports");
          if (!ports_ok) break;
          const Port* v = m.find_port(iface.valid);
          const Port* r = m.find_port(iface.ready);
          if (v->width != 1) error(path, "iface-role", "valid port '" + v->name + "' must have width 1");
          if (r->width != 1) error(path, "iface-role", "ready port '" + r->name + "' must have width 1");
          if (v->direction == r->direction) {
            error(path, "iface-role", "ready port '" + r->name + "' must oppose valid's direction");
          }
          for (const auto& dp : iface.data) {
            if (m.find_port(dp)->direction != v->direction) {
              error(path, "iface-role", "data port '" + dp + "' must follow valid's direction");
            }
          }
          break;
        }
        case InterfaceType::feedforward:
          if (!iface.valid.empty() || !iface.ready.empty() || !iface.ports.empty()) {
            error(path, "iface-role", "feedforward interfaces only have data and clk roles");
          }
          if (iface.data.empty()) error(path, "iface-role", "feedforward interface has no data ports");
          if (ports_ok && !iface.data.empty()) {
            Direction dir = m.find_port(iface.data.front())->direction;
            for (const auto& dp : iface.data) {
              if (m.find_port(dp)->direction != dir) {
                error(path, "iface-role", "feedforward data ports must share one direction");
                break;
              }
            }
          }
          break;
        case InterfaceType::clock:
        case InterfaceType::reset:
        case InterfaceType::false_path:
          if (!iface.data.empty() || !iface.valid.empty() || !iface.ready.empty() || !iface.clk.empty()) {
            error(path, "iface-role", std::string(to_string(iface.type)) + " interfaces only list ports");
          }
          if (iface.ports.empty()) error(path, "iface-role", "interface has no ports");
          break;
      }
      if (!iface.active.empty() && iface.active != "high" && iface.active != "low") {
        error(path, "iface-role", "polarity must be 'high' or 'low'");
      }
    }
    for (const auto& [p, n] : membership) {
      if (n > 1) error(m.name + "." + p, "iface", "port belongs to " + std::to_string(n) + " interfaces");
    }
  }

  int identifier_width(const Module& m, const std::string& id) {
    if (const Wire* w = m.find_wire(id)) return w->width;
    if (const Port* p = m.find_port(id)) return p->width;
    return -1;
  }

  void check_grouped(const Module& m, std::set<std::string>& names) {
    for (const auto& w : m.wires) {
      if (!names.insert(w.name).second) error(m.name + "." + w.name, "wire", "duplicate wire or port name");
      if (w.width < 1) error(m.name + "." + w.name, "width", "wire width must be at least 1");
      if (!is_identifier(w.name)) error(m.name + "." + w.name, "wire", "wire name is not an identifier");
    }
    std::set<std::string> inst_names;
    for (const auto& inst : m.submodules) {
      const std::string ipath = element_id(m.name, inst.instance_name);
      if (!inst_names.insert(inst.instance_name).second) error(ipath, "instance", "duplicate instance name");
      if (inst.floorplan) check_slot(ipath, *inst.floorplan);
      const Module* child = d_.find_module(inst.module_name);
      if (!child) {
        error(ipath, "dangling", "instantiates unknown module '" + inst.module_name + "'");
        continue;
      }
      for (const auto& [port, value] : inst.connections) {
        const std::string ppath = ipath + "." + port;
        const Port* cp = child->find_port(port);
        if (!cp) {
          error(ppath, "dangling", "module '" + child->name + "' has no port '" + port + "'");
          continue;
        }
        if (is_sized_constant(value)) {
          if (*constant_width(value) != cp->width) {
            error(ppath, "width", "constant " + value + " has width " + std::to_string(*constant_width(value)) +
                                      ", port has " + std::to_string(cp->width));
          }
          if (cp->direction != Direction::in) error(ppath, "driver", "constant drives a non-input port");
          continue;
        }
        if (!is_identifier(value)) {
          error(ppath, "A2", "connection '" + value + "' is not a single identifier or sized constant");
          continue;
        }
        int w = identifier_width(m, value);
        if (w < 0) {
          error(ppath, "dangling", "connection references unknown identifier '" + value + "'");
        } else if (w != cp->width) {
          error(ppath, "width", "'" + value + "' has width " + std::to_string(w) + ", port has " +
                                    std::to_string(cp->width));
        }
      }
      for (const auto& cp : child->ports) {
        if (!inst.connections.count(cp.name)) warning(ipath + "." + cp.name, "unconnected", "port is unconnected");
      }
      check_a3(m, inst, *child);
    }
    check_nets(m);
  }

  void check_nets(const Module& m) {
    NetMap nets = build_nets(m);
    for (const auto& [id, eps] : nets) {
      const bool is_port = m.find_port(id) != nullptr;
      const bool is_wire = m.find_wire(id) != nullptr;
      if (!is_port && !is_wire) continue;  // reported as dangling above
      const std::string path = m.name + "." + id;
      if (is_port && eps.size() == 1) {
        warning(path, "unconnected", "module port is not connected to any submodule");
        continue;
      }
      if (eps.size() != 2) {
        if (eps.size() > 2 && broadcast_exempt(m, eps)) continue;
        error(path, "A1", (is_wire ? "wire" : "port") + std::string(" connects ") + std::to_string(eps.size()) +
                              " endpoints, expected exactly 2");
        continue;
      }
      auto a = driving_direction(d_, m, eps[0]);
      auto b = driving_direction(d_, m, eps[1]);
      if (!a || !b) continue;
      if (*a == Direction::inout || *b == Direction::inout) {
        check_inout_crossing(m, eps, path);
        continue;
      }
      if (*a == *b) {
        error(path, "driver",
              *a == Direction::out ? "net has two drivers (" + eps[0].str() + ", " + eps[1].str() + ")"
                                   : "net has no driver (" + eps[0].str() + ", " + eps[1].str() + ")");
      }
    }
  }

  // Clock/reset fan-out is allowed when a broadcast module drives the net and
  // every sink is a clock or reset port.
  bool broadcast_exempt(const Module& m, const std::vector<Endpoint>& eps) {
    int drivers = 0;
    bool broadcast_driver = false;
    for (const auto& e : eps) {
      auto dir = driving_direction(d_, m, e);
      if (!dir) return false;
      if (*dir == Direction::out) {
        ++drivers;
        if (!e.is_parent()) {
          const Module* child = d_.find_module(m.find_instance(e.instance)->module_name);
          broadcast_driver = child && child->role() == "broadcast";
        }
        continue;
      }
      const Module* owner = e.is_parent() ? &m : d_.find_module(m.find_instance(e.instance)->module_name);
      const InterfaceSpec* iface = owner ? owner->interface_of(e.port) : nullptr;
      if (!iface || (iface->type != InterfaceType::clock && iface->type != InterfaceType::reset)) return false;
    }
    return drivers == 1 && broadcast_driver;
  }

  void check_inout_crossing(const Module& m, const std::vector<Endpoint>& eps, const std::string& path) {
    if (eps[0].is_parent() || eps[1].is_parent()) return;
    const Instance* a = m.find_instance(eps[0].instance);
    const Instance* b = m.find_instance(eps[1].instance);
    if (a && b && a->floorplan && b->floorplan && *a->floorplan != *b->floorplan) {
      warning(path, "inout", "inout connection crosses slots " + *a->floorplan + " and " + *b->floorplan);
    }
  }

  void check_a3(const Module& m, const Instance& inst, const Module& child) {
    if (child.interfaces.empty()) return;
    NetMap nets;  // built lazily
    bool built = false;
    for (size_t k = 0; k < child.interfaces.size(); ++k) {
      const auto& iface = child.interfaces[k];
      std::set<std::string> peers;
      int connected = 0, open = 0;
      for (const auto& p : iface.members()) {
        auto it = inst.connections.find(p);
        if (it == inst.connections.end()) {
          ++open;
          continue;
        }
        ++connected;
        if (is_sized_constant(it->second)) continue;
        if (!built) {
          nets = build_nets(m);
          built = true;
        }
        auto nit = nets.find(it->second);
        if (nit == nets.end()) continue;
        for (const auto& e : nit->second) {
          if (e.instance == inst.instance_name && e.port == p) continue;
          peers.insert(e.is_parent() ? std::string("<parent>") : e.instance);
        }
      }
      const std::string path = element_id(m.name, inst.instance_name) + "#iface" + std::to_string(k);
      if (connected > 0 && open > 0) {
        error(path, "A3", "interface is partially connected (" + std::to_string(open) + " member(s) open)");
      } else if (connected == 0 && open > 0) {
        warning(path, "A3", "interface is entirely unconnected");
      }
      const bool fanout_type = iface.type == InterfaceType::clock || iface.type == InterfaceType::reset;
      if (peers.size() > 1 && !fanout_type) {
        std::string list;
        for (const auto& p : peers) list += (list.empty() ? "" : ", ") + p;
        error(path, "A3", "interface connects to several peers: " + list);
      }
    }
  }

  void check_recursion() {
    // grouped instantiation graph must be acyclic
    std::map<std::string, int> state;
    std::function<bool(const std::string&)> visit = [&](const std::string& name) {
      int& s = state[name];
      if (s == 1) return true;
      if (s == 2) return false;
      s = 1;
      const Module* m = d_.find_module(name);
      if (m) {
        for (const auto& inst : m->submodules) {
          if (d_.has_module(inst.module_name) && visit(inst.module_name)) {
            error(name, "recursion", "module instantiates itself through '" + inst.module_name + "'");
            state[name] = 2;
            return false;
          }
        }
      }
      state[name] = 2;
      return false;
    };
    for (const auto& [name, _] : d_.modules) visit(name);
  }

  const DesignIR& d_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> drc_check(const DesignIR& design) { return Checker(design).run(); }

}  // namespace hlps
