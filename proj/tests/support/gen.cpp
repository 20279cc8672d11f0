// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "gen.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include "hlps/exporter.hpp"
#include "hlps/netlist.hpp"
#include "hlps/passes.hpp"
#include "hlps/verilog.hpp"

namespace hlps::testing {

namespace {

enum class Kind { handshake, feedforward, plain };

struct Bundle {
  Kind kind = Kind::plain;
  Direction dir = Direction::in;
  int width = 1;
  std::string prefix;

  std::vector<Port> ports() const {
    switch (kind) {
      case Kind::handshake:
        return {{prefix + "_data", dir, width}, {prefix + "_valid", dir, 1}, {prefix + "_ready", flip(dir), 1}};
      case Kind::feedforward:
        return {{prefix + "_d", dir, width}};
      case Kind::plain:
        break;
    }
    return {{prefix, dir, width}};
  }
  bool matches(const Bundle& o) const { return kind == o.kind && width == o.width && dir != o.dir; }
};

struct Shape {
  bool clk = false;
  bool rst = false;
  std::vector<Bundle> bundles;
};

std::vector<Port> ports_of(const Shape& s) {
  std::vector<Port> out;
  if (s.clk) out.push_back({"clk", Direction::in, 1});
  if (s.rst) out.push_back({"rst", Direction::in, 1});
  for (const auto& b : s.bundles) {
    for (auto& p : b.ports()) out.push_back(p);
  }
  return out;
}

InterfaceSpec spec_of(const Bundle& b, bool clk) {
  InterfaceSpec s;
  if (b.kind == Kind::handshake) {
    s.type = InterfaceType::handshake;
    s.data = {b.prefix + "_data"};
    s.valid = b.prefix + "_valid";
    s.ready = b.prefix + "_ready";
  } else {
    s.type = InterfaceType::feedforward;
    s.data = {b.prefix + "_d"};
  }
  if (clk) s.clk = "clk";
  return s;
}

std::vector<InterfaceSpec> cr_specs(const Shape& s) {
  std::vector<InterfaceSpec> out;
  if (s.clk) {
    InterfaceSpec c;
    c.type = InterfaceType::clock;
    c.ports = {"clk"};
    out.push_back(c);
  }
  if (s.rst) {
    InterfaceSpec r;
    r.type = InterfaceType::reset;
    r.ports = {"rst"};
    r.active = "high";
    out.push_back(r);
  }
  return out;
}

std::string header(const std::string& name, const std::vector<Port>& ports) {
  std::string s = "module " + name + " (\n";
  for (size_t i = 0; i < ports.size(); ++i) {
    s += "  " + verilog::declaration(ports[i]) + (i + 1 < ports.size() ? ",\n" : "\n");
  }
  return s + ");\n";
}

class Generator {
 public:
  Generator(std::mt19937& rng, const GenOptions& o) : rng_(rng), o_(o) {}

  DesignIR run() {
    const int target = pick(3, std::max(3, o_.max_modules - 5));
    const int leaves = pick(2, std::max(2, target / 2));
    for (int i = 0; i < leaves; ++i) leaf();
    if (o_.composite) composite();
    while (count() < target - 1 && unused().size() > 1) grouped(false);
    grouped(true);
    if (o_.annotations) annotate();
    return d_;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  int count() const { return static_cast<int>(d_.modules.size()); }

  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& name : order_) {
      if (!uses_.count(name)) out.push_back(name);
    }
    return out;
  }

  Bundle random_bundle(const std::string& prefix) {
    Bundle b;
    const int k = pick(0, 9);
    b.kind = k < 4 ? Kind::handshake : k < 6 ? Kind::feedforward : Kind::plain;
    b.dir = coin(0.5) ? Direction::in : Direction::out;
    static const int widths[] = {1, 2, 4, 8, 16, 32};
    b.width = widths[pick(0, 5)];
    b.prefix = prefix;
    return b;
  }

  void add(Module m, Shape s) {
    shapes_[m.name] = std::move(s);
    order_.push_back(m.name);
    d_.modules[m.name] = std::move(m);
  }

  // Leaf whose outputs depend on its inputs through non-forwarding logic.
  void leaf() {
    Shape s;
    s.clk = o_.clocks && coin(0.7);
    s.rst = s.clk && coin(0.4);
    const int n = pick(1, 4);
    for (int i = 0; i < n; ++i) s.bundles.push_back(random_bundle("b" + std::to_string(i)));
    Module m;
    m.name = "L" + std::to_string(next_++);
    m.ports = ports_of(s);
    m.interfaces = cr_specs(s);
    for (const auto& b : s.bundles) {
      if (b.kind != Kind::plain) m.interfaces.push_back(spec_of(b, s.clk));
    }
    std::vector<const Port*> ins;
    for (const auto& p : m.ports) {
      if (p.direction == Direction::in && p.name != "clk" && p.name != "rst") ins.push_back(&p);
    }
    std::string body;
    for (const auto& p : m.ports) {
      if (p.direction != Direction::out) continue;
      if (ins.empty()) {
        body += "  assign " + p.name + " = " + std::to_string(p.width) + "'d0;\n";
      } else if (s.clk && coin(0.3)) {
        const std::string q = p.name + "_q";
        body += "  reg " + verilog::range(p.width) + q + ";\n";
        body += "  always @(posedge clk) " + q + " <= " + ins[pick(0, int(ins.size()) - 1)]->name + ";\n";
        body += "  assign " + p.name + " = " + q + ";\n";
      } else if (ins.size() > 1 && coin(0.5)) {
        body += "  assign " + p.name + " = " + ins[pick(0, int(ins.size()) - 1)]->name + " ^ " +
                ins[pick(0, int(ins.size()) - 1)]->name + ";\n";
      } else {
        body += "  assign " + p.name + " = ~" + ins[pick(0, int(ins.size()) - 1)]->name + ";\n";
      }
    }
    m.source = header(m.name, m.ports) + body + "endmodule\n";
    add(std::move(m), std::move(s));
  }

  // Forwarding leaf for one bundle shape, reused across the design.
  std::string passthrough(const Bundle& shape) {
    const std::string key = std::to_string(int(shape.kind)) + "_" + std::to_string(shape.width);
    if (auto it = pass_.find(key); it != pass_.end()) return it->second;
    Shape s;
    s.clk = o_.clocks;
    Bundle i = shape, o = shape;
    i.dir = Direction::in;
    i.prefix = "i";
    o.dir = Direction::out;
    o.prefix = "o";
    s.bundles = {i, o};
    Module m;
    m.name = "P" + std::to_string(next_++);
    m.ports = ports_of(s);
    m.interfaces = cr_specs(s);
    m.interfaces.push_back(spec_of(i, s.clk));
    m.interfaces.push_back(spec_of(o, s.clk));
    std::string body;
    if (shape.kind == Kind::handshake) {
      body = "  assign o_data = i_data;\n  assign o_valid = i_valid;\n  assign i_ready = o_ready;\n";
    } else {
      body = "  assign o_d = i_d;\n";
    }
    m.source = header(m.name, m.ports) + body + "endmodule\n";
    const std::string name = m.name;
    shapes_[name] = s;
    d_.modules[name] = std::move(m);
    return pass_[key] = name;
  }

  // Verilog leaf instantiating one to three plain leaves, with glue logic.
  void composite() {
    std::vector<std::string> leaves;
    for (const auto& name : order_) {
      if (name[0] == 'L') leaves.push_back(name);
    }
    std::shuffle(leaves.begin(), leaves.end(), rng_);
    leaves.resize(std::min<size_t>(leaves.size(), pick(1, 3)));
    Shape s;
    for (const auto& l : leaves) s.clk |= shapes_[l].clk;
    s.rst = s.clk && coin(0.5);
    const int n = pick(1, 3);
    for (int i = 0; i < n; ++i) s.bundles.push_back(random_bundle("c" + std::to_string(i)));
    Module m;
    m.name = "C" + std::to_string(next_++);
    m.ports = ports_of(s);
    m.interfaces = cr_specs(s);
    for (const auto& b : s.bundles) {
      if (b.kind != Kind::plain) m.interfaces.push_back(spec_of(b, s.clk));
    }
    std::vector<std::string> readable, assignable;
    for (const auto& p : m.ports) {
      if (p.name == "clk" || p.name == "rst") continue;
      (p.direction == Direction::in ? readable : assignable).push_back(p.name);
    }
    std::string decls, insts;
    for (size_t k = 0; k < leaves.size(); ++k) {
      const Module& child = d_.module(leaves[k]);
      const std::string u = "u" + std::to_string(k);
      insts += "  " + child.name + " " + u + " (\n";
      for (size_t j = 0; j < child.ports.size(); ++j) {
        const Port& p = child.ports[j];
        std::string expr;
        if (p.name == "clk" || p.name == "rst") {
          expr = s.clk ? "clk" : "1'b0";
          if (p.name == "rst") expr = s.rst ? "rst" : "1'b0";
        } else {
          expr = u + "_" + p.name;
          decls += "  wire " + verilog::range(p.width) + expr + ";\n";
          (p.direction == Direction::in ? assignable : readable).push_back(expr);
        }
        insts += "    ." + p.name + "(" + expr + ")" + (j + 1 < child.ports.size() ? ",\n" : "\n");
      }
      insts += "  );\n";
      ++uses_[child.name];
    }
    std::string body;
    for (const auto& a : assignable) {
      if (readable.empty()) body += "  assign " + a + " = 1'b0;\n";
      else body += "  assign " + a + " = ~" + readable[pick(0, int(readable.size()) - 1)] + ";\n";
    }
    m.source = header(m.name, m.ports) + decls + insts + body + "endmodule\n";
    add(std::move(m), std::move(s));
  }

  void grouped(bool top) {
    std::vector<std::string> children;
    auto fresh = unused();
    std::shuffle(fresh.begin(), fresh.end(), rng_);
    if (top) {
      children = fresh;
      if (children.empty()) children.push_back(order_.back());
    } else {
      children.assign(fresh.begin(), fresh.begin() + std::min<size_t>(fresh.size(), pick(1, 3)));
      for (int extra = pick(0, 2); extra > 0; --extra) {
        const std::string& c = order_[pick(0, int(order_.size()) - 1)];
        if (c[0] != 'C') children.push_back(c);
      }
    }
    Module g;
    g.kind = ModuleKind::grouped;
    g.name = top ? "Top" : "G" + std::to_string(next_++);
    Shape s;
    struct Open {
      int inst;
      Bundle b;
    };
    std::vector<Open> open;
    for (size_t k = 0; k < children.size(); ++k) {
      Instance inst;
      inst.instance_name = "u" + g.name + "_" + std::to_string(k);
      inst.module_name = children[k];
      const Shape& cs = shapes_[children[k]];
      s.clk |= cs.clk;
      s.rst |= cs.rst;
      for (const auto& b : cs.bundles) open.push_back({int(k), b});
      g.submodules.push_back(inst);
      ++uses_[children[k]];
    }
    std::shuffle(open.begin(), open.end(), rng_);
    int nets = 0, exported = 0;
    std::vector<bool> done(open.size());
    auto connect = [&](Instance& a, const Bundle& ab, Instance& b, const Bundle& bb) {
      auto ap = ab.ports();
      auto bp = bb.ports();
      for (size_t j = 0; j < ap.size(); ++j) {
        const std::string n = "n" + std::to_string(nets++);
        g.wires.push_back({n, ap[j].width});
        a.connections[ap[j].name] = n;
        b.connections[bp[j].name] = n;
      }
    };
    for (size_t x = 0; x < open.size(); ++x) {
      if (done[x] || open[x].b.dir != Direction::out || !coin(0.8)) continue;
      for (size_t y = 0; y < open.size(); ++y) {
        if (done[y] || open[y].inst == open[x].inst || !open[x].b.matches(open[y].b)) continue;
        done[x] = done[y] = true;
        Instance& a = g.submodules[open[x].inst];
        Instance& b = g.submodules[open[y].inst];
        if (o_.passthroughs && open[x].b.kind != Kind::plain && coin(0.5)) {
          Instance p;
          p.instance_name = "p" + std::to_string(g.submodules.size());
          p.module_name = passthrough(open[x].b);
          Bundle pi = open[x].b, po = open[x].b;
          pi.dir = Direction::in;
          pi.prefix = "i";
          po.dir = Direction::out;
          po.prefix = "o";
          const int ai = open[x].inst, bi = open[y].inst;
          g.submodules.push_back(p);
          connect(g.submodules[ai], open[x].b, g.submodules.back(), pi);
          connect(g.submodules.back(), po, g.submodules[bi], open[y].b);
          s.clk |= shapes_[p.module_name].clk;
          ++uses_[p.module_name];
        } else {
          connect(a, open[x].b, b, open[y].b);
        }
        break;
      }
    }
    for (size_t x = 0; x < open.size(); ++x) {
      if (done[x]) continue;
      const Bundle& cb = open[x].b;
      Instance& inst = g.submodules[open[x].inst];
      if (coin(0.6)) {
        Bundle pb = cb;
        pb.prefix = "x" + std::to_string(exported++);
        auto cp = cb.ports();
        auto pp = pb.ports();
        for (size_t j = 0; j < cp.size(); ++j) inst.connections[cp[j].name] = pp[j].name;
        s.bundles.push_back(pb);
      } else if (cb.kind == Kind::plain && cb.dir == Direction::in && coin(0.3)) {
        inst.connections[cb.prefix] = std::to_string(cb.width) + "'d0";
      }
    }
    g.ports = ports_of(s);
    g.interfaces = cr_specs(s);
    for (const auto& b : s.bundles) {
      if (b.kind != Kind::plain && o_.parent_interfaces && coin(0.7)) g.interfaces.push_back(spec_of(b, s.clk));
    }
    std::vector<std::string> fan;
    for (const char* cr : {"clk", "rst"}) {
      int sinks = 0;
      for (auto& inst : g.submodules) {
        const Shape& cs = shapes_[inst.module_name];
        if ((std::string(cr) == "clk" ? cs.clk : cs.rst)) {
          inst.connections[cr] = cr;
          ++sinks;
        }
      }
      if (sinks > 1) fan.push_back(cr);
    }
    const std::string name = g.name;
    if (top) {
      d_.top = name;
      d_.modules[name] = std::move(g);
      shapes_[name] = s;
    } else {
      add(std::move(g), s);
    }
    for (const auto& net : fan) passes::insert_broadcast(d_, name, net);
  }

  void annotate() {
    d_.device = grid_device(2, 2);
    for (auto& [name, m] : d_.modules) {
      if (m.is_leaf() && m.role().empty()) {
        Resources r;
        r[ResourceKind::LUT] = pick(0, 500);
        r[ResourceKind::FF] = pick(0, 800);
        if (coin(0.3)) r[ResourceKind::DSP] = pick(0, 4);
        m.metadata.resource = r;
      }
      if (coin(0.2)) m.metadata.extra["note"] = "gen " + name;
      if (m.is_grouped()) {
        for (auto& inst : m.submodules) {
          if (coin(0.3)) inst.floorplan = slot_name(pick(0, 1), pick(0, 1));
        }
      }
    }
    for (const auto& id : element_ids(d_)) {
      if (coin(0.1)) d_.provenance[id] = "orig/" + id;
    }
  }

  std::mt19937& rng_;
  GenOptions o_;
  DesignIR d_;
  std::map<std::string, Shape> shapes_;
  std::map<std::string, int> uses_;
  std::map<std::string, std::string> pass_;
  std::vector<std::string> order_;
  int next_ = 0;
};

std::string join(const std::string& path, const std::string& name) { return path.empty() ? name : path + "/" + name; }

struct UnionFind {
  std::map<std::string, std::string> parent;
  std::string find(const std::string& x) {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return x;
    }
    if (it->second == x) return x;
    return parent[x] = find(it->second);
  }
  void unite(const std::string& a, const std::string& b) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) parent[rb] = ra;
  }
};

class Flattener {
 public:
  Flattener(const DesignIR& d, const FlatOptions& o) : d_(d), o_(o) {}

  void run() {
    const Module& top = d_.module(d_.top);
    const auto cr = passes::clock_reset_ports(top);
    for (const auto& p : top.ports) {
      const std::string ep = "^." + p.name;
      uf_.unite(key("", p.name), "E:" + ep);
      endpoints_[ep] = std::find(cr.begin(), cr.end(), p.name) != cr.end();
    }
    if (top.is_grouped()) expand(top, "", "");
  }

  std::multiset<std::vector<std::string>> nets() {
    std::map<std::string, std::vector<std::string>> groups;
    std::set<std::string> excluded;
    for (const auto& [ep, cr] : endpoints_) {
      const std::string root = uf_.find("E:" + ep);
      if (cr) excluded.insert(root);
      if (!hidden_.count(ep)) groups[root].push_back(ep);
    }
    std::multiset<std::vector<std::string>> out;
    for (auto& [root, eps] : groups) {
      if (excluded.count(root) || eps.size() < 2) continue;
      std::sort(eps.begin(), eps.end());
      out.insert(eps);
    }
    return out;
  }

  std::set<std::string> leaves;

 private:
  static std::string key(const std::string& scope, const std::string& id) { return "N:" + scope + "|" + id; }

  void expand(const Module& m, const std::string& scope, const std::string& path) {
    for (const auto& inst : m.submodules) {
      const Module& child = d_.module(inst.module_name);
      std::string name = o_.rename ? o_.rename(m.name, inst.instance_name) : inst.instance_name;
      if (o_.split_double_underscore) {
        for (size_t pos; (pos = name.find("__")) != std::string::npos;) name.replace(pos, 2, "/");
      }
      const std::string cpath = o_.transparent.count(child.name) ? path : join(path, name);
      const std::string cscope = scope + "/" + inst.instance_name;
      if (child.is_grouped() && !o_.opaque.count(cpath)) {
        for (const auto& [port, value] : inst.connections) {
          if (is_identifier(value)) uf_.unite(key(scope, value), key(cscope, port));
        }
        expand(child, cscope, cpath);
        continue;
      }
      leaves.insert(cpath);
      const auto cr = passes::clock_reset_ports(child);
      const bool bcast = child.role() == "broadcast";
      for (const auto& [port, value] : inst.connections) {
        if (!is_identifier(value)) continue;
        const std::string ep = cpath + "." + port;
        uf_.unite(key(scope, value), "E:" + ep);
        endpoints_[ep] = bcast || std::find(cr.begin(), cr.end(), port) != cr.end();
      }
      if (o_.contract.count(cpath)) {
        for (const auto& [a, b] : pure_assigns(child)) uf_.unite("E:" + cpath + "." + a, "E:" + cpath + "." + b);
        for (const auto& p : child.ports) hidden_.insert(cpath + "." + p.name);
      }
    }
  }

  const DesignIR& d_;
  const FlatOptions& o_;
  UnionFind uf_;
  std::map<std::string, bool> endpoints_;  // -> clock/reset
  std::set<std::string> hidden_;
};

}  // namespace

DesignIR random_design(std::mt19937& rng, const GenOptions& options) { return Generator(rng, options).run(); }

VirtualDevice grid_device(int cols, int rows, double resource, double boundary) {
  nlohmann::json spec{{"part", "test"},
                      {"cols", cols},
                      {"rows", rows},
                      {"default_resources", {{"LUT", resource}, {"FF", resource}, {"BRAM", resource}, {"DSP", resource}}},
                      {"default_boundary_capacity", boundary}};
  return define_device(spec);
}

std::multiset<std::vector<std::string>> flat_nets(const DesignIR& design, const FlatOptions& options) {
  Flattener f(design, options);
  f.run();
  return f.nets();
}

std::set<std::string> leaf_paths(const DesignIR& design, const FlatOptions& options) {
  Flattener f(design, options);
  f.run();
  return f.leaves;
}

std::vector<std::pair<std::string, std::string>> pure_assigns(const Module& leaf) {
  static const std::regex re(R"(assign\s+(\w+)\s*=\s*(\w+)\s*;)");
  std::vector<std::pair<std::string, std::string>> out;
  for (std::sregex_iterator it(leaf.source.begin(), leaf.source.end(), re), end; it != end; ++it) {
    out.emplace_back((*it)[1], (*it)[2]);
  }
  return out;
}

DesignIR reimport(const DesignIR& design) {
  const auto files = exporter::export_verilog(design);
  DesignIR out;
  out.top = design.top;
  for (const auto& name : files.order) {
    for (auto& m : verilog::import_leaf(files.files.at(name))) {
      const Module* orig = design.find_module(m.name);
      if (orig && orig->is_grouped()) m = verilog::lift_structural(m);
      out.modules[m.name] = std::move(m);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// floorplanning

floorplanner::PartitionGraph random_graph(std::mt19937& rng, const VirtualDevice&, int max_nodes) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  floorplanner::PartitionGraph g;
  const int n = pick(1, max_nodes);
  for (int i = 0; i < n; ++i) {
    const std::string name = "n" + std::to_string(i);
    g.nodes.push_back(name);
    Resources r;
    r[ResourceKind::LUT] = pick(5, 40);
    if (pick(0, 2) == 0) r[ResourceKind::DSP] = pick(0, 30);
    g.resources[name] = r;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (pick(0, 2) == 0) g.edges.push_back({g.nodes[i], g.nodes[j], double(pick(1, 16)), pick(0, 7) != 0});
    }
  }
  return g;
}

std::vector<std::string> recheck(const floorplanner::PartitionGraph& graph, const VirtualDevice& device,
                                 const floorplanner::Limits& limits,
                                 const std::map<std::string, std::string>& assignment) {
  std::vector<std::string> out;
  std::map<std::string, Resources> used;
  for (const auto& n : graph.nodes) {
    auto it = assignment.find(n);
    if (it == assignment.end() || !parse_slot_name(it->second) || !device.has_slot(it->second)) {
      out.push_back("bad slot for " + n);
      continue;
    }
    if (auto p = graph.pinned.find(n); p != graph.pinned.end() && p->second != it->second) out.push_back("pin " + n);
    used[it->second] += graph.resources.at(n).value_or(Resources{});
  }
  if (!out.empty()) return out;
  for (const auto& [slot, r] : used) {
    const Slot& s = device.slot(slot);
    for (size_t k = 0; k < 5; ++k) {
      if (r.amount[k] > s.capacity[k] * limits.fraction[k] + 1e-9) out.push_back("resource " + slot);
    }
  }
  auto xy = [&](const std::string& n) { return *parse_slot_name(assignment.at(n)); };
  for (int c = 0; c + 1 < device.cols(); ++c) {
    double cap = 0, bits = 0;
    bool limited = true;
    for (int r = 0; r < device.rows(); ++r) {
      auto v = device.capacity(slot_name(c, r), slot_name(c + 1, r));
      if (v) cap += *v;
      else limited = false;
    }
    for (const auto& e : graph.edges) {
      const int ca = xy(e.a).first, cb = xy(e.b).first;
      if (std::min(ca, cb) <= c && std::max(ca, cb) > c) bits += e.weight;
    }
    if (limited && bits > cap + 1e-9) out.push_back("vertical line " + std::to_string(c));
  }
  for (int r = 0; r + 1 < device.rows(); ++r) {
    double cap = 0, bits = 0;
    bool limited = true;
    for (int c = 0; c < device.cols(); ++c) {
      auto v = device.capacity(slot_name(c, r), slot_name(c, r + 1));
      if (v) cap += *v;
      else limited = false;
    }
    for (const auto& e : graph.edges) {
      const int ra = xy(e.a).second, rb = xy(e.b).second;
      if (std::min(ra, rb) <= r && std::max(ra, rb) > r) bits += e.weight;
    }
    if (limited && bits > cap + 1e-9) out.push_back("horizontal line " + std::to_string(r));
  }
  for (const auto& e : graph.edges) {
    if (!e.pipelinable && assignment.at(e.a) != assignment.at(e.b)) out.push_back("crossing " + e.a + "-" + e.b);
  }
  return out;
}

double wirelength(const floorplanner::PartitionGraph& graph, const std::map<std::string, std::string>& assignment) {
  double total = 0;
  for (const auto& e : graph.edges) {
    auto a = *parse_slot_name(assignment.at(e.a));
    auto b = *parse_slot_name(assignment.at(e.b));
    total += e.weight * (std::abs(a.first - b.first) + std::abs(a.second - b.second));
  }
  return total;
}

std::optional<double> brute_force_optimum(const floorplanner::PartitionGraph& graph, const VirtualDevice& device,
                                          const floorplanner::Limits& limits) {
  std::vector<std::string> slots;
  for (const auto& [name, s] : device.slots()) slots.push_back(name);
  const size_t n = graph.nodes.size();
  std::vector<size_t> code(n, 0);
  std::optional<double> best;
  std::map<std::string, std::string> a;
  while (true) {
    for (size_t i = 0; i < n; ++i) a[graph.nodes[i]] = slots[code[i]];
    if (recheck(graph, device, limits, a).empty()) {
      const double w = wirelength(graph, a);
      if (!best || w < *best) best = w;
    }
    size_t i = 0;
    while (i < n && ++code[i] == slots.size()) code[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace hlps::testing
