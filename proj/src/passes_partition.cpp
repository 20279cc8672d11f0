// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "hlps/codegen.hpp"
#include "hlps/netlist.hpp"
#include "hlps/passes.hpp"
#include "hlps/verilog.hpp"
#include "passes_util.hpp"

namespace hlps::passes {

using namespace detail;

namespace {

// Components holding more interfaces than this are reported: interface
// pre-merging can chain unrelated logic together.
constexpr int kMergeWarnInterfaces = 8;

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::vector<InterfaceSpec> interfaces_within(const Module& m, const std::vector<std::string>& ports) {
  std::vector<InterfaceSpec> out;
  for (const auto& iface : m.interfaces) {
    auto all = iface.all_ports();
    if (std::all_of(all.begin(), all.end(), [&](const std::string& p) { return contains(ports, p); })) {
      out.push_back(iface);
    }
  }
  return out;
}

InterfaceSpec cr_spec_for(const Module& m, const std::string& port, const std::string& renamed) {
  InterfaceSpec s;
  s.type = InterfaceType::clock;
  if (const InterfaceSpec* iface = m.interface_of(port);
      iface && (iface->type == InterfaceType::clock || iface->type == InterfaceType::reset)) {
    s.type = iface->type;
    s.active = iface->active;
  }
  s.ports = {renamed};
  return s;
}

}  // namespace

PassResult partition(const DesignIR& design, const std::string& leaf_name) {
  PassResult result{design, {"partition", {}, {}, {}, {}}};
  DesignIR& d = result.design;
  auto& diags = result.report.diagnostics;
  const Module leaf = design.module(leaf_name);
  if (!leaf.is_leaf()) throw Error("module '" + leaf_name + "' is not a leaf");
  const auto uses = instances_of(design, leaf_name);
  if (uses.size() != 1 || usage_count(design, leaf_name) != 1) {
    throw Error("module '" + leaf_name + "' must be instantiated exactly once to be partitioned");
  }
  const auto [parent_name, inst_name] = uses.front();
  const auto comps = port_components(leaf);
  const auto cr = clock_reset_ports(leaf);
  std::vector<std::string> cr_inputs;
  for (const auto& p : cr) {
    if (leaf.find_port(p)->direction == Direction::in) cr_inputs.push_back(p);
  }

  for (size_t k = 0; k < comps.size(); ++k) {
    int n = 0;
    for (const auto& iface : leaf.interfaces) {
      auto m = iface.members();
      n += !m.empty() && contains(comps[k], m.front());
    }
    if (n > kMergeWarnInterfaces) {
      diags.push_back({leaf_name, "partition-merge", Severity::warning,
                       "component " + std::to_string(k) + " merges " + std::to_string(n) + " interfaces"});
    }
  }
  const bool multi = comps.size() > 1;
  if (multi && leaf.format == SourceFormat::verilog) {
    for (const auto& s : verilog::extract_instantiations(leaf).statements) {
      bool cr_out = false;
      bool other = false;
      for (const auto& id : s.identifiers) {
        if (contains(cr, id)) cr_out |= leaf.find_port(id)->direction == Direction::out;
        else other = true;
      }
      if (cr_out && other) {
        diags.push_back({leaf_name, "partition-clock", Severity::warning,
                         "a clock/reset output depends on logic outside the clock/reset ports"});
        break;
      }
    }
  }

  Module& parent = d.module(parent_name);
  const Instance original = *parent.find_instance(inst_name);
  std::erase_if(parent.submodules, [&](const Instance& i) { return i.instance_name == inst_name; });
  std::vector<std::string> taken_local = local_names(parent);
  std::vector<std::string> taken_modules = module_names(d);
  auto conn_of = [&](const std::string& port) -> std::optional<std::string> {
    auto it = original.connections.find(port);
    if (it == original.connections.end()) return std::nullopt;
    return it->second;
  };

  // the broadcast module drives one fan-out net per clock/reset input
  std::map<std::string, std::string> fanout_net;  // leaf port -> parent wire
  std::string bcast_name;
  if (multi && !cr.empty()) {
    bcast_name = fresh_name(leaf_name + "_cr_bcast", taken_modules);
    taken_modules.push_back(bcast_name);
    Module b;
    b.name = bcast_name;
    std::vector<std::string> names;
    for (const auto& p : leaf.ports) names.push_back(p.name);
    const std::string inner = fresh_name(leaf_name + "_inst", names);
    names.push_back(inner);
    for (const auto& p : cr) b.ports.push_back(*leaf.find_port(p));
    b.interfaces = interfaces_within(leaf, cr);
    std::vector<std::pair<std::string, std::string>> assigns;
    std::map<std::string, std::string> fanout_port;
    for (const auto& c : cr_inputs) {
      const std::string fo = fresh_name(c + "_bcast", names);
      names.push_back(fo);
      fanout_port[c] = fo;
      b.ports.push_back({fo, Direction::out, leaf.find_port(c)->width});
      b.interfaces.push_back(cr_spec_for(leaf, c, fo));
      assigns.emplace_back(fo, c);
    }
    b.source = codegen::wrapper(bcast_name, b.ports, leaf, inner, cr, assigns);
    b.metadata.resource = Resources{};
    set_role(b, "broadcast");
    b.metadata.extra["wraps"] = leaf_name;

    Instance bi;
    bi.instance_name = fresh_name(bcast_name + "_inst", taken_local);
    taken_local.push_back(bi.instance_name);
    bi.module_name = bcast_name;
    bi.floorplan = original.floorplan;
    for (const auto& p : cr) {
      if (auto v = conn_of(p)) bi.connections[p] = *v;
    }
    for (const auto& c : cr_inputs) {
      const std::string w = fresh_name(inst_name + "_" + c, taken_local);
      taken_local.push_back(w);
      parent.wires.push_back({w, leaf.find_port(c)->width});
      bi.connections[fanout_port[c]] = w;
      fanout_net[c] = w;
    }
    d.modules[bcast_name] = std::move(b);
    parent.submodules.push_back(bi);
    record_provenance(d, bcast_name, leaf_name);
    record_provenance(d, element_id(parent_name, bi.instance_name), element_id(parent_name, inst_name));
    result.report.created.push_back(bcast_name);
    result.report.created.push_back(element_id(parent_name, bi.instance_name));
  }

  size_t non_cr = 0;
  for (const auto& c : comps) non_cr += c.size();
  const size_t nsplits = std::max<size_t>(comps.size(), 1);
  for (size_t k = 0; k < nsplits; ++k) {
    std::vector<std::string> exposed;
    if (multi) {
      for (const auto& p : leaf.ports) {
        if (contains(comps[k], p.name) || contains(cr_inputs, p.name)) exposed.push_back(p.name);
      }
    } else {
      for (const auto& p : leaf.ports) exposed.push_back(p.name);
    }
    Module s;
    s.name = fresh_name(leaf_name + "_split" + std::to_string(k), taken_modules);
    taken_modules.push_back(s.name);
    for (const auto& p : exposed) s.ports.push_back(*leaf.find_port(p));
    std::vector<std::string> names;
    for (const auto& p : leaf.ports) names.push_back(p.name);
    s.source = codegen::wrapper(s.name, s.ports, leaf, fresh_name(leaf_name + "_inst", names), exposed);
    s.interfaces = interfaces_within(leaf, exposed);
    if (leaf.metadata.resource) {
      const double share = !multi || non_cr == 0 ? 1.0 : double(comps[k].size()) / double(non_cr);
      Resources r;
      for (size_t i = 0; i < r.amount.size(); ++i) r.amount[i] = leaf.metadata.resource->amount[i] * share;
      s.metadata.resource = r;
    }
    s.metadata.floorplan = leaf.metadata.floorplan;
    set_role(s, "split");
    s.metadata.extra["split_of"] = leaf_name;
    s.metadata.extra["component"] = k;

    int undriven = 0;
    for (const auto& p : leaf.ports) {
      undriven += p.direction == Direction::in && !contains(exposed, p.name);
    }
    if (undriven > 0) {
      diags.push_back({s.name, "undriven", Severity::info,
                       std::to_string(undriven) + " input(s) of the wrapped '" + leaf_name + "' left undriven"});
    }

    Instance si;
    si.instance_name = fresh_name(s.name + "_inst", taken_local);
    taken_local.push_back(si.instance_name);
    si.module_name = s.name;
    si.floorplan = original.floorplan;
    for (const auto& p : exposed) {
      if (fanout_net.count(p)) si.connections[p] = fanout_net[p];
      else if (auto v = conn_of(p)) si.connections[p] = *v;
    }
    parent.submodules.push_back(si);
    record_provenance(d, s.name, leaf_name);
    record_provenance(d, element_id(parent_name, si.instance_name), element_id(parent_name, inst_name));
    result.report.created.push_back(s.name);
    result.report.created.push_back(element_id(parent_name, si.instance_name));
    d.modules[s.name] = std::move(s);
  }
  result.report.removed.push_back(element_id(parent_name, inst_name));
  tidy(d);
  return result;
}

// ---------------------------------------------------------------------------
// passthrough

namespace {

struct Forward {
  std::string in;
  std::string out;
};

// Input -> output pairs when every non-clock/reset port of `m` is forwarded
// unchanged by pure assigns; nullopt otherwise.
std::optional<std::vector<Forward>> forwarding(const DesignIR& design, const Module& m) {
  if (!m.is_leaf() || m.format != SourceFormat::verilog) return std::nullopt;
  const std::string role = m.role();
  if (role == "broadcast" || role == "helper" || role == "wrapper") return std::nullopt;
  const auto cr = clock_reset_ports(m);
  std::vector<std::string> ports;
  for (const auto& p : m.ports) {
    if (contains(cr, p.name)) continue;
    if (p.direction == Direction::inout) return std::nullopt;
    ports.push_back(p.name);
  }
  if (ports.empty()) return std::nullopt;

  // statements that can influence the ports
  const Module* body = &m;
  if (role == "split") {
    const nlohmann::json& e = m.metadata.extra;
    if (!e.contains("split_of") || !e["split_of"].is_string()) return std::nullopt;
    body = design.find_module(e["split_of"].get<std::string>());
    if (!body || !body->is_leaf() || body->format != SourceFormat::verilog) return std::nullopt;
  }
  verilog::ParsedModule parsed;
  try {
    parsed = verilog::extract_instantiations(*body);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (role != "split" && !parsed.instantiations.empty()) return std::nullopt;
  const auto body_cr = clock_reset_ports(*body);
  UnionFind uf;
  for (const auto& s : parsed.statements) {
    const std::string* first = nullptr;
    for (const auto& id : s.identifiers) {
      if (contains(body_cr, id)) continue;
      if (first) uf.unite(*first, id);
      else first = &id;
    }
  }
  std::set<std::string> roots;
  for (const auto& p : ports) roots.insert(uf.find(p));
  std::map<std::string, std::string> source_of;
  for (const auto& s : parsed.statements) {
    bool relevant = false;
    for (const auto& id : s.identifiers) relevant |= !contains(body_cr, id) && roots.count(uf.find(id));
    if (!relevant) continue;
    if (!s.pure() || source_of.count(s.lhs)) return std::nullopt;
    source_of[s.lhs] = s.rhs;
  }

  std::vector<Forward> out;
  std::set<std::string> used;
  for (const auto& pname : ports) {
    const Port* o = m.find_port(pname);
    if (o->direction != Direction::out) continue;
    std::string x = pname;
    for (size_t steps = 0;; ++steps) {
      auto it = source_of.find(x);
      if (it == source_of.end() || steps > source_of.size()) return std::nullopt;
      x = it->second;
      const Port* p = m.find_port(x);
      if (p && p->direction == Direction::in) break;
      if (p || body->find_port(x)) return std::nullopt;  // ends on a port outside the component
    }
    const Port* i = m.find_port(x);
    if (!contains(ports, x) || i->width != o->width || !used.insert(x).second) return std::nullopt;
    out.push_back({x, pname});
  }
  if (out.size() * 2 != ports.size()) return std::nullopt;

  // interface pairing must be role-preserving and one-to-one
  std::map<const InterfaceSpec*, const InterfaceSpec*> pairing;
  std::map<const InterfaceSpec*, size_t> counted;
  auto role_of = [](const InterfaceSpec& s, const std::string& p) -> std::string {
    if (s.valid == p) return "valid";
    if (s.ready == p) return "ready";
    if (contains(s.data, p)) return "data";
    return "ports";
  };
  for (const auto& f : out) {
    const InterfaceSpec* si = m.interface_of(f.in);
    const InterfaceSpec* so = m.interface_of(f.out);
    if (!si && !so) continue;
    if (!si || !so || si->type != so->type || role_of(*si, f.in) != role_of(*so, f.out)) return std::nullopt;
    // a handshake moves data/valid forward and ready backward, so the pair
    // links the input-side spec to the output-side spec either way round
    const bool forward = role_of(*si, f.in) != "ready";
    const InterfaceSpec* from = forward ? si : so;
    const InterfaceSpec* to = forward ? so : si;
    auto [it, fresh] = pairing.emplace(from, to);
    if (!fresh && it->second != to) return std::nullopt;
    ++counted[from];
  }
  std::set<const InterfaceSpec*> targets;
  for (const auto& [from, to] : pairing) {
    if (!targets.insert(to).second || counted[from] != from->members().size() ||
        from->members().size() != to->members().size()) {
      return std::nullopt;
    }
  }
  return out;
}

// Removes `inst` from `g` and wires its forwarded peers together. Returns
// false (leaving `g` untouched) when a pair links two parent ports.
bool bypass(const DesignIR& design, Module& g, const std::string& inst_name, const std::vector<Forward>& pairs) {
  const Instance x = *g.find_instance(inst_name);
  const Module& xm = design.module(x.module_name);
  NetMap nets = build_nets(g);
  struct Plan {
    std::string keep, drop;                  // net kept, wire removed
    std::string moved_instance, moved_port;  // endpoint reconnected to `keep`
  };
  std::vector<Plan> plans;
  for (const auto& f : pairs) {
    auto ci = x.connections.find(f.in);
    auto co = x.connections.find(f.out);
    if (ci == x.connections.end() || co == x.connections.end() || !is_identifier(ci->second) ||
        !is_identifier(co->second)) {
      return false;
    }
    auto a = peer(nets, ci->second, {inst_name, f.in});
    auto b = peer(nets, co->second, {inst_name, f.out});
    if (!a || !b || (a->is_parent() && b->is_parent())) return false;
    if (!b->is_parent()) plans.push_back({ci->second, co->second, b->instance, b->port});
    else plans.push_back({co->second, ci->second, a->instance, a->port});
  }
  for (const auto& p : plans) {
    g.find_instance(p.moved_instance)->connections[p.moved_port] = p.keep;
    std::erase_if(g.wires, [&](const Wire& w) { return w.name == p.drop; });
  }
  // clock/reset nets lose one sink; nets left with a lone driver go away
  for (const auto& c : clock_reset_ports(xm)) {
    auto it = x.connections.find(c);
    if (it == x.connections.end() || !g.find_wire(it->second)) continue;
    const std::string net = it->second;
    if (nets[net].size() == 2) {
      std::erase_if(g.wires, [&](const Wire& w) { return w.name == net; });
      for (auto& sub : g.submodules) {
        if (sub.instance_name == inst_name) continue;
        std::erase_if(sub.connections, [&](const auto& kv) { return kv.second == net; });
      }
    }
  }
  std::erase_if(g.submodules, [&](const Instance& i) { return i.instance_name == inst_name; });
  return true;
}

}  // namespace

PassResult passthrough(const DesignIR& design) {
  PassResult result{design, {"passthrough", {}, {}, {}, {}}};
  DesignIR& d = result.design;
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [name, g] : d.modules) {
      if (!g.is_grouped()) continue;
      for (size_t k = 0; k < g.submodules.size(); ++k) {
        const Instance& inst = g.submodules[k];
        const Module* m = d.find_module(inst.module_name);
        if (!m) continue;
        auto pairs = forwarding(d, *m);
        if (!pairs) continue;
        const std::string id = element_id(name, inst.instance_name);
        if (bypass(d, g, inst.instance_name, *pairs)) {
          result.report.removed.push_back(id);
          changed = true;
          break;
        }
      }
      if (changed) break;
    }
  }
  tidy(d);
  return result;
}

}  // namespace hlps::passes
