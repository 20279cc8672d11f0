// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/pipeline.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "hlps/netlist.hpp"
#include "hlps/verilog.hpp"

namespace hlps::pipeline {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::feedforward_ff: return "feedforward_ff";
    case Scheme::handshake_afifo: return "handshake_afifo";
    case Scheme::false_path: return "false_path";
  }
  return "?";
}

namespace {

int interface_index(const Module& m, const InterfaceSpec* iface) {
  return static_cast<int>(iface - m.interfaces.data());
}

std::string pair_key(const std::string& a, const std::string& b) { return a + "|" + b; }

}  // namespace

Plan plan(const DesignIR& design, const VirtualDevice& device, const std::string& module,
          const PlanOptions& options) {
  Plan out;
  out.module = module.empty() ? design.top : module;
  const Module& m = design.module(out.module);
  if (!m.is_grouped()) throw Error("module '" + out.module + "' is not grouped");
  auto slot_of = [&](const std::string& inst) {
    const Instance* i = m.find_instance(inst);
    if (!i->floorplan) throw Error("instance '" + inst + "' has no floorplan");
    if (!device.has_slot(*i->floorplan)) throw Error("instance '" + inst + "' is assigned to unknown slot '" + *i->floorplan + "'");
    return *i->floorplan;
  };
  auto module_of = [&](const std::string& inst) -> const Module& {
    return design.module(m.find_instance(inst)->module_name);
  };

  std::map<std::pair<std::string, int>, Link> links;
  std::vector<std::pair<std::string, int>> order;
  for (const auto& [net, ends] : build_nets(m)) {
    std::optional<Endpoint> driver;
    for (const auto& e : ends) {
      if (e.is_parent()) continue;
      auto dir = driving_direction(design, m, e);
      if (dir && *dir == Direction::out) driver = e;
    }
    if (!driver) continue;
    const Module& dm = module_of(driver->instance);
    auto dcr = passes::clock_reset_ports(dm);
    if (std::find(dcr.begin(), dcr.end(), driver->port) != dcr.end()) continue;
    for (const auto& s : ends) {
      if (s.is_parent() || s.instance == driver->instance) continue;
      const std::string ds = slot_of(driver->instance);
      const std::string ss = slot_of(s.instance);
      if (ds == ss) continue;
      const Module& sm = module_of(s.instance);
      const InterfaceSpec* di = dm.interface_of(driver->port);
      const InterfaceSpec* si = sm.interface_of(s.port);
      std::string producer = driver->instance;
      std::string consumer = s.instance;
      const InterfaceSpec* iface = di;
      const Module* pm = &dm;
      if (di && di->type == InterfaceType::handshake && di->ready == driver->port) {
        if (!si || si->type != InterfaceType::handshake || si->ready != s.port) {
          throw Error("ready wire '" + net + "' crosses " + ds + "|" + ss + " without a matching handshake");
        }
        std::swap(producer, consumer);
        iface = si;
        pm = &sm;
      }
      if (!iface || !(iface->pipelinable() || iface->type == InterfaceType::false_path)) {
        throw Error("wire '" + net + "' (" + driver->str() + " -> " + s.str() + ") crosses " + ds + "|" + ss +
                    " but has no pipelinable interface");
      }
      const auto key = std::make_pair(producer, interface_index(*pm, iface));
      auto [it, fresh] = links.try_emplace(key);
      Link& l = it->second;
      if (fresh) {
        order.push_back(key);
        l.producer = producer;
        l.interface = key.second;
        l.consumer = consumer;
        l.from_slot = slot_of(producer);
        l.to_slot = slot_of(consumer);
        l.scheme = iface->type == InterfaceType::handshake     ? Scheme::handshake_afifo
                   : iface->type == InterfaceType::feedforward ? Scheme::feedforward_ff
                                                               : Scheme::false_path;
        for (const auto& dport : iface->data) l.data.emplace_back(dport, pm->find_port(dport)->width);
        if (l.scheme == Scheme::handshake_afifo) {
          l.valid = iface->valid;
          l.ready = iface->ready;
        }
        if (l.scheme != Scheme::false_path) {
          auto ov = options.stage_override.find(pair_key(l.from_slot, l.to_slot));
          if (ov == options.stage_override.end()) ov = options.stage_override.find(pair_key(l.to_slot, l.from_slot));
          l.stages = ov != options.stage_override.end() ? ov->second : distance(device, l.from_slot, l.to_slot);
        }
        if (l.scheme == Scheme::handshake_afifo) {
          l.fifo_depth = std::max(2 * l.stages + 2, options.min_fifo_depth);
          l.afull_threshold = l.fifo_depth - 2 * l.stages;
        }
      } else if (l.consumer != consumer) {
        throw Error("interface of '" + producer + "' feeds both '" + l.consumer + "' and '" + consumer + "'");
      }
    }
  }
  for (const auto& k : order) out.links.push_back(links.at(k));
  return out;
}

// ---------------------------------------------------------------------------
// helper modules

namespace {

int bits_for(int n) {
  int b = 1;
  while ((1 << b) < n) ++b;
  return b;
}

std::string width_tag(const std::vector<int>& widths) {
  std::string s;
  for (size_t i = 0; i < widths.size(); ++i) s += (i ? "x" : "") + std::to_string(widths[i]);
  return s;
}

std::string reset_tag(const std::string& active) {
  return active.empty() ? "" : active == "low" ? "_rl" : "_rh";
}

// Port name, reset condition expression.
std::pair<std::string, std::string> reset_names(const std::string& active) {
  if (active == "low") return {"rst_n", "!rst_n"};
  return {"rst", "rst"};
}

// `{d2, d1, d0}` over ports `<base>0..`; the bare name for a single port.
std::string concat(const std::string& base, size_t n) {
  if (n == 1) return base + "0";
  std::string s = "{";
  for (size_t i = n; i-- > 0;) s += base + std::to_string(i) + (i ? ", " : "}");
  return s;
}

void add_clock_reset(Module& m, const std::string& active) {
  m.ports.push_back({"clk", Direction::in, 1});
  InterfaceSpec clk;
  clk.type = InterfaceType::clock;
  clk.ports = {"clk"};
  m.interfaces.push_back(clk);
  if (!active.empty()) {
    const auto [name, cond] = reset_names(active);
    m.ports.push_back({name, Direction::in, 1});
    InterfaceSpec rst;
    rst.type = InterfaceType::reset;
    rst.ports = {name};
    rst.active = active;
    m.interfaces.push_back(rst);
  }
}

std::string header(const Module& m) {
  std::ostringstream os;
  os << "module " << m.name << " (\n";
  for (size_t i = 0; i < m.ports.size(); ++i) {
    os << "  " << verilog::declaration(m.ports[i]) << (i + 1 < m.ports.size() ? ",\n" : "\n");
  }
  os << ");\n";
  return os.str();
}

void finish_helper(Module& m, const Resources& r) {
  m.metadata.resource = r;
  m.metadata.extra = nlohmann::json::object();
  m.metadata.extra["role"] = "helper";
}

}  // namespace

Module afifo_relay_module(const std::vector<int>& widths, int stages, int depth, const std::string& reset_active) {
  if (widths.empty()) throw Error("relay needs at least one data port");
  const int threshold = depth - 2 * stages;
  if (stages < 0 || threshold < 1) {
    throw Error("relay with " + std::to_string(stages) + " stages needs depth >= " + std::to_string(2 * stages + 1));
  }
  Module m;
  m.name = "hlps_afifo_relay_s" + std::to_string(stages) + "_d" + std::to_string(depth) + "_w" + width_tag(widths) +
           reset_tag(reset_active);
  add_clock_reset(m, reset_active);
  int total = 0;
  InterfaceSpec in;
  in.type = InterfaceType::handshake;
  in.clk = "clk";
  InterfaceSpec out = in;
  for (size_t i = 0; i < widths.size(); ++i) {
    m.ports.push_back({"in_data" + std::to_string(i), Direction::in, widths[i]});
    in.data.push_back("in_data" + std::to_string(i));
    total += widths[i];
  }
  m.ports.push_back({"in_valid", Direction::in, 1});
  m.ports.push_back({"in_ready", Direction::out, 1});
  for (size_t i = 0; i < widths.size(); ++i) {
    m.ports.push_back({"out_data" + std::to_string(i), Direction::out, widths[i]});
    out.data.push_back("out_data" + std::to_string(i));
  }
  m.ports.push_back({"out_valid", Direction::out, 1});
  m.ports.push_back({"out_ready", Direction::in, 1});
  in.valid = "in_valid";
  in.ready = "in_ready";
  out.valid = "out_valid";
  out.ready = "out_ready";
  m.interfaces.push_back(in);
  m.interfaces.push_back(out);

  const bool rst = !reset_active.empty();
  const std::string cond = reset_names(reset_active).second;
  const int aw = bits_for(depth);
  const int cw = bits_for(depth + 1);
  const std::string init = rst ? "" : " = 0";
  std::ostringstream os;
  os << "// Almost-full FIFO relay: " << stages << " forward and " << stages
     << " return register stages, AFull at " << threshold << " of " << depth << " words.\n";
  os << header(m);
  os << "  wire " << verilog::range(total) << "in_word = " << concat("in_data", widths.size()) << ";\n";
  os << "  wire send = in_valid & in_ready;\n";
  for (int s = 0; s < stages; ++s) {
    os << "  reg " << verilog::range(total) << "fwd_data_" << s << ";\n";
    os << "  reg fwd_valid_" << s << init << ";\n";
    os << "  reg afull_" << s << init << ";\n";
  }
  os << "  reg " << verilog::range(total) << "mem [0:" << depth - 1 << "];\n";
  os << "  reg " << verilog::range(aw) << "wr_ptr" << init << ";\n";
  os << "  reg " << verilog::range(aw) << "rd_ptr" << init << ";\n";
  os << "  reg " << verilog::range(cw) << "count" << init << ";\n";
  const std::string push = stages == 0 ? "send" : "fwd_valid_" + std::to_string(stages - 1);
  const std::string push_data = stages == 0 ? "in_word" : "fwd_data_" + std::to_string(stages - 1);
  os << "  wire push = " << push << ";\n";
  os << "  wire pop = (count != 0) & out_ready;\n";
  os << "  wire afull = count >= " << threshold << ";\n";
  if (stages > 0) {
    os << "  always @(posedge clk) begin\n";
    if (rst) {
      os << "    if (" << cond << ") begin\n";
      for (int s = 0; s < stages; ++s) os << "      fwd_valid_" << s << " <= 1'b0;\n      afull_" << s << " <= 1'b0;\n";
      os << "    end else begin\n";
    }
    const std::string ind = rst ? "      " : "    ";
    for (int s = 0; s < stages; ++s) {
      const std::string prev_v = s == 0 ? "send" : "fwd_valid_" + std::to_string(s - 1);
      const std::string prev_d = s == 0 ? "in_word" : "fwd_data_" + std::to_string(s - 1);
      const std::string prev_a = s == 0 ? "afull" : "afull_" + std::to_string(s - 1);
      os << ind << "fwd_valid_" << s << " <= " << prev_v << ";\n";
      os << ind << "fwd_data_" << s << " <= " << prev_d << ";\n";
      os << ind << "afull_" << s << " <= " << prev_a << ";\n";
    }
    if (rst) os << "    end\n";
    os << "  end\n";
  }
  os << "  always @(posedge clk) begin\n";
  const std::string ind = rst ? "      " : "    ";
  if (rst) {
    os << "    if (" << cond << ") begin\n      wr_ptr <= 0;\n      rd_ptr <= 0;\n      count <= 0;\n";
    os << "    end else begin\n";
  }
  os << ind << "if (push) begin\n";
  os << ind << "  mem[wr_ptr] <= " << push_data << ";\n";
  os << ind << "  wr_ptr <= wr_ptr == " << depth - 1 << " ? 0 : wr_ptr + 1;\n";
  os << ind << "end\n";
  os << ind << "if (pop) rd_ptr <= rd_ptr == " << depth - 1 << " ? 0 : rd_ptr + 1;\n";
  os << ind << "count <= count + push - pop;\n";
  if (rst) os << "    end\n";
  os << "  end\n";
  os << "  assign in_ready = " << (stages == 0 ? "!afull" : "!afull_" + std::to_string(stages - 1)) << ";\n";
  os << "  assign out_valid = count != 0;\n";
  os << "  assign " << concat("out_data", widths.size()) << " = mem[rd_ptr];\n";
  os << "endmodule\n";
  m.source = os.str();
  Resources r;
  r[ResourceKind::FF] = static_cast<double>((total + 2) * stages + 2 * aw + cw);
  r[ResourceKind::LUT] = static_cast<double>(total * ((depth + 31) / 32) + 8);
  finish_helper(m, r);
  return m;
}

Module ff_chain_module(const std::vector<int>& widths, int stages, const std::string& reset_active) {
  if (widths.empty()) throw Error("flip-flop chain needs at least one data port");
  if (stages < 0) throw Error("negative stage count");
  Module m;
  m.name = "hlps_ff_chain_s" + std::to_string(stages) + "_w" + width_tag(widths) + reset_tag(reset_active);
  add_clock_reset(m, reset_active);
  InterfaceSpec in;
  in.type = InterfaceType::feedforward;
  in.clk = "clk";
  InterfaceSpec out = in;
  int total = 0;
  for (size_t i = 0; i < widths.size(); ++i) {
    m.ports.push_back({"d" + std::to_string(i), Direction::in, widths[i]});
    in.data.push_back("d" + std::to_string(i));
    total += widths[i];
  }
  for (size_t i = 0; i < widths.size(); ++i) {
    m.ports.push_back({"q" + std::to_string(i), Direction::out, widths[i]});
    out.data.push_back("q" + std::to_string(i));
  }
  m.interfaces.push_back(in);
  m.interfaces.push_back(out);
  const bool rst = !reset_active.empty();
  std::ostringstream os;
  os << "// Flip-flop chain of " << stages << " stages" << (rst ? ", cleared on reset" : "") << ".\n";
  os << header(m);
  os << "  wire " << verilog::range(total) << "d = " << concat("d", widths.size()) << ";\n";
  for (int s = 0; s < stages; ++s) os << "  reg " << verilog::range(total) << "r_" << s << ";\n";
  if (stages > 0) {
    os << "  always @(posedge clk) begin\n";
    const std::string ind = rst ? "      " : "    ";
    if (rst) {
      os << "    if (" << reset_names(reset_active).second << ") begin\n";
      for (int s = 0; s < stages; ++s) os << "      r_" << s << " <= 0;\n";
      os << "    end else begin\n";
    }
    for (int s = 0; s < stages; ++s) os << ind << "r_" << s << " <= " << (s == 0 ? "d" : "r_" + std::to_string(s - 1)) << ";\n";
    if (rst) os << "    end\n";
    os << "  end\n";
  }
  os << "  assign " << concat("q", widths.size()) << " = " << (stages == 0 ? "d" : "r_" + std::to_string(stages - 1))
     << ";\n";
  os << "endmodule\n";
  m.source = os.str();
  Resources r;
  r[ResourceKind::FF] = static_cast<double>(total * stages);
  finish_helper(m, r);
  return m;
}

// ---------------------------------------------------------------------------
// insertion

namespace {

std::string first_port(const Module& m, InterfaceType type, std::string* active = nullptr) {
  for (const auto& iface : m.interfaces) {
    if (iface.type == type && !iface.ports.empty()) {
      if (active) *active = iface.active;
      return iface.ports.front();
    }
  }
  return {};
}

}  // namespace

passes::PassResult insert(const DesignIR& design, const Plan& plan) {
  passes::PassResult result{design, {"pipeline", {}, {}, {}, {}}};
  DesignIR& d = result.design;
  const std::string& parent = plan.module;
  for (const auto& link : plan.links) {
    if (link.scheme == Scheme::false_path || link.stages == 0) continue;
    const Instance* inst = d.module(parent).find_instance(link.producer);
    if (!inst) throw Error("no instance '" + link.producer + "' in '" + parent + "'");
    const Module pm = d.module(inst->module_name);
    if (link.interface < 0 || link.interface >= static_cast<int>(pm.interfaces.size())) {
      throw Error("interface " + std::to_string(link.interface) + " out of range for '" + pm.name + "'");
    }
    const InterfaceSpec& iface = pm.interfaces[link.interface];
    if (iface.data.size() != link.data.size()) throw Error("plan does not match interface of '" + link.producer + "'");
    std::vector<int> widths;
    for (size_t i = 0; i < link.data.size(); ++i) {
      const Port* p = pm.find_port(iface.data[i]);
      if (!p || p->name != link.data[i].first || p->width != link.data[i].second) {
        throw Error("width mismatch between plan and '" + link.producer + "." + link.data[i].first + "'");
      }
      widths.push_back(p->width);
    }
    std::string clk = iface.clk.empty() ? first_port(pm, InterfaceType::clock) : iface.clk;
    if (clk.empty()) throw Error("producer '" + link.producer + "' has no clock port for its pipeline helper");
    std::string active;
    std::string rst = first_port(pm, InterfaceType::reset, &active);
    if (!rst.empty() && active.empty()) active = "high";
    passes::tap_clock_reset(d, parent, link.producer, clk);
    if (!rst.empty()) {
      auto c = d.module(parent).find_instance(link.producer)->connections;
      if (c.count(rst) && is_identifier(c.at(rst))) passes::tap_clock_reset(d, parent, link.producer, rst);
      else rst.clear();
    }
    const bool handshake = link.scheme == Scheme::handshake_afifo;
    Module helper = handshake ? afifo_relay_module(widths, link.stages, link.fifo_depth, rst.empty() ? "" : active)
                              : ff_chain_module(widths, link.stages, rst.empty() ? "" : active);
    if (const Module* existing = d.find_module(helper.name); existing && existing->role() != "helper") {
      throw Error("module name '" + helper.name + "' is taken");
    }
    if (!d.has_module(helper.name)) d.modules[helper.name] = helper;

    std::vector<std::string> taken;
    for (const auto& p : pm.ports) taken.push_back(p.name);
    std::vector<std::string> modules;
    for (const auto& [name, mod] : d.modules) modules.push_back(name);
    passes::WrapTemplate tpl =
        passes::identity_template(d, parent, link.producer, fresh_name(pm.name + "_pipe", modules));
    const auto conns = d.module(parent).find_instance(link.producer)->connections;
    auto pre = [&](const std::string& port) {
      std::string n = fresh_name(port + "_pre", taken);
      taken.push_back(n);
      tpl.nets.push_back({n, pm.find_port(port)->width});
      tpl.inner[port] = n;
      if (auto c = conns.find(port); c != conns.end()) tpl.parent_connections[port] = c->second;
      return n;
    };
    passes::HelperInstance h;
    h.module_name = helper.name;
    h.instance_name = fresh_name(iface.data.front() + (handshake ? "_relay" : "_ff"), taken);
    taken.push_back(h.instance_name);
    h.connections["clk"] = clk;
    if (!rst.empty()) h.connections[reset_names(active).first] = rst;
    for (size_t i = 0; i < iface.data.size(); ++i) {
      const std::string n = pre(iface.data[i]);
      h.connections[(handshake ? "in_data" : "d") + std::to_string(i)] = n;
      h.connections[(handshake ? "out_data" : "q") + std::to_string(i)] = iface.data[i];
    }
    if (handshake) {
      h.connections["in_valid"] = pre(iface.valid);
      h.connections["in_ready"] = pre(iface.ready);
      h.connections["out_valid"] = iface.valid;
      h.connections["out_ready"] = iface.ready;
    }
    tpl.helpers.push_back(h);
    tpl.extra["role"] = "wrapper";

    passes::PassResult wrapped = passes::wrap(d, parent, link.producer, tpl);
    passes::PassResult inlined = passes::inline_instance(wrapped.design, parent, link.producer);
    d = std::move(inlined.design);
    const std::string helper_inst = link.producer + "__" + h.instance_name;
    const Module& pmod = d.module(parent);
    std::string final_name = helper_inst;
    for (const auto& [from, to] : inlined.report.renamed) {
      if (from == parent + "/" + tpl.wrapper_name + "/" + h.instance_name || from == parent + "/" + helper_inst) {
        final_name = to.substr(parent.size() + 1);
      }
    }
    if (!pmod.find_instance(final_name)) throw Error("internal: helper instance '" + final_name + "' missing");
    const std::string id = parent + "/" + final_name;
    d.provenance[id] = parent + "/" + link.producer + "." + (handshake ? iface.valid : iface.data.front());
    result.report.created.push_back(id);
  }
  prune_unreferenced(d);
  prune_provenance(d);
  return result;
}

// ---------------------------------------------------------------------------
// simulation

RelayVerdict simulate_relay(int stages, int depth, const StallPattern& pattern, int tokens, long max_cycles) {
  const int threshold = depth - 2 * stages;
  if (stages < 0 || threshold < 1) {
    throw Error("invalid relay: threshold depth - 2*stages = " + std::to_string(threshold) + " must be >= 1");
  }
  auto at = [](const std::vector<bool>& v, long t, bool tail) {
    return t < static_cast<long>(v.size()) ? static_cast<bool>(v[t]) : tail;
  };
  struct Reg {
    bool valid = false;
    long token = 0;
  };
  std::vector<Reg> fwd(stages);
  std::vector<bool> ret(stages, false);
  std::deque<long> fifo;
  std::vector<long> consumed;
  RelayVerdict v;
  long next = 0;
  long idle = 0;
  const long patience = depth + 2 * stages + 2;
  long t = 0;
  for (; t < max_cycles && static_cast<long>(consumed.size()) < tokens; ++t) {
    const int count = static_cast<int>(fifo.size());
    const bool afull = count >= threshold;
    const bool ready = stages == 0 ? !afull : !ret[stages - 1];
    const bool offer = next < tokens && at(pattern.producer, t, pattern.producer_tail);
    const bool accept = at(pattern.consumer, t, pattern.consumer_tail);
    const bool send = offer && ready;
    Reg push = stages == 0 ? Reg{send, next} : fwd[stages - 1];
    const bool pop = count > 0 && accept;
    if (pop) {
      consumed.push_back(fifo.front());
      fifo.pop_front();
    }
    if (push.valid) {
      if (static_cast<int>(fifo.size()) >= depth) ++v.overflows;
      else fifo.push_back(push.token);
    }
    for (int s = stages - 1; s > 0; --s) {
      fwd[s] = fwd[s - 1];
      ret[s] = ret[s - 1];
    }
    if (stages > 0) {
      fwd[0] = Reg{send, next};
      ret[0] = afull;
    }
    if (send) ++next;
    v.max_occupancy = std::max(v.max_occupancy, static_cast<int>(fifo.size()));
    const bool progress = send || pop || push.valid;
    const bool willing = accept && (offer || next >= tokens);
    idle = progress ? 0 : willing ? idle + 1 : idle;
    if (idle >= patience) {
      v.deadlock = true;
      ++t;
      break;
    }
  }
  v.cycles = t;
  v.sent = next;
  v.consumed = static_cast<long>(consumed.size());
  v.final_occupancy = static_cast<int>(fifo.size());
  for (const auto& r : fwd) v.in_flight += r.valid;

  // the direct connection delivers tokens 0, 1, 2, ... whenever both sides agree
  bool in_order = true;
  for (size_t i = 0; i < consumed.size(); ++i) in_order = in_order && consumed[i] == static_cast<long>(i);
  const bool lossless = v.overflows == 0 && v.sent == v.consumed + v.final_occupancy + v.in_flight;
  bool direct_done = true;
  {
    long n = 0;
    for (long c = 0; c < max_cycles && n < tokens; ++c) {
      if (at(pattern.producer, c, pattern.producer_tail) && at(pattern.consumer, c, pattern.consumer_tail)) ++n;
      if (c > static_cast<long>(std::max(pattern.producer.size(), pattern.consumer.size())) &&
          !(pattern.producer_tail && pattern.consumer_tail)) {
        break;
      }
    }
    direct_done = n >= tokens;
  }
  v.sequence_equal = in_order && lossless && (!direct_done || v.consumed == tokens);
  return v;
}

nlohmann::json to_json(const Plan& plan) {
  nlohmann::json j;
  j["module"] = plan.module;
  j["links"] = nlohmann::json::array();
  for (const auto& l : plan.links) {
    nlohmann::json x{{"producer", l.producer}, {"consumer", l.consumer}, {"interface", l.interface},
                     {"scheme", std::string(to_string(l.scheme))}, {"from", l.from_slot}, {"to", l.to_slot},
                     {"stages", l.stages}};
    if (l.scheme == Scheme::handshake_afifo) {
      x["fifo_depth"] = l.fifo_depth;
      x["afull_threshold"] = l.afull_threshold;
    }
    nlohmann::json data = nlohmann::json::array();
    for (const auto& [p, w] : l.data) data.push_back({{"port", p}, {"width", w}});
    x["data"] = data;
    j["links"].push_back(x);
  }
  return j;
}

}  // namespace hlps::pipeline
