// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/exporter.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "hlps/codegen.hpp"
#include "hlps/netlist.hpp"
#include "hlps/verilog.hpp"

namespace hlps::exporter {

namespace {

std::vector<std::string> children(const DesignIR& design, const Module& m) {
  std::vector<std::string> out;
  if (m.is_grouped()) {
    for (const auto& i : m.submodules) out.push_back(i.module_name);
  } else if (m.format == SourceFormat::verilog && !m.source.empty()) {
    try {
      for (const auto& i : verilog::extract_instantiations(m).instantiations) {
        if (design.has_module(i.module_name)) out.push_back(i.module_name);
      }
    } catch (const Error&) {
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<std::string> emission_order(const DesignIR& design) {
  std::set<std::string> reachable;
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    if (!reachable.insert(name).second) return;
    for (const auto& c : children(design, design.module(name))) visit(c);
  };
  if (!design.top.empty() && design.has_module(design.top)) {
    visit(design.top);
  } else {
    for (const auto& [name, m] : design.modules) reachable.insert(name);
  }
  // Kahn's algorithm, smallest ready name first
  std::map<std::string, int> pending;
  std::map<std::string, std::vector<std::string>> users;
  for (const auto& name : reachable) {
    auto deps = children(design, design.module(name));
    pending[name] = static_cast<int>(deps.size());
    for (const auto& dep : deps) users[dep].push_back(name);
  }
  std::set<std::string> ready;
  for (const auto& [name, n] : pending) {
    if (n == 0) ready.insert(name);
  }
  std::vector<std::string> out;
  while (!ready.empty()) {
    const std::string name = *ready.begin();
    ready.erase(ready.begin());
    out.push_back(name);
    for (const auto& u : users[name]) {
      if (--pending[u] == 0) ready.insert(u);
    }
  }
  if (out.size() != reachable.size()) throw Error("module instantiation graph has a cycle");
  return out;
}

FileSet export_verilog(const DesignIR& design) {
  FileSet fs;
  const auto order = emission_order(design);

  // original files whose modules all survive as unchanged leaves
  struct Unit {
    int index;
    int total;
    std::string module;
  };
  std::map<std::string, std::vector<Unit>> by_file;
  for (const auto& name : order) {
    const Module& m = design.module(name);
    const auto& x = m.metadata.extra;
    if (!m.is_leaf() || !m.role().empty() || !x.is_object() || !x.contains("source_file")) continue;
    by_file[x["source_file"].get<std::string>()].push_back(
        {x.value("source_unit", 0), x.value("source_units", 1), name});
  }
  std::set<std::string> in_original;
  std::map<std::string, std::string> file_of;
  for (auto& [file, units] : by_file) {
    std::sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) { return a.index < b.index; });
    bool complete = static_cast<int>(units.size()) == units.front().total;
    for (size_t i = 0; complete && i < units.size(); ++i) complete = units[i].index == static_cast<int>(i);
    if (!complete) continue;
    std::string text;
    for (const auto& u : units) {
      text += design.module(u.module).source;
      in_original.insert(u.module);
    }
    fs.files[file] = text;
    file_of[units.back().module] = file;
  }

  auto claim = [&](std::string file) {
    const std::string stem = file.substr(0, file.size() - 2);
    for (int k = 1; fs.files.count(file); ++k) file = stem + "_" + std::to_string(k) + ".v";
    return file;
  };
  for (const auto& name : order) {
    const Module& m = design.module(name);
    if (in_original.count(name)) {
      // listed once, after the last module of its file
      if (auto it = file_of.find(name); it != file_of.end()) fs.order.push_back(it->second);
      continue;
    }
    if (m.is_grouped()) {
      const std::string f = claim(name + ".v");
      fs.files[f] = codegen::grouped(design, m);
      fs.order.push_back(f);
    } else if (m.format == SourceFormat::opaque) {
      if (m.source.empty()) throw Error("opaque leaf '" + name + "' has no source blob");
      fs.files[name + ".opaque"] = m.source;
      fs.order.push_back(name + ".opaque");
    } else {
      if (m.source.empty()) throw Error("leaf '" + name + "' has no source");
      const std::string f = claim(name + ".v");
      fs.files[f] = m.source;
      fs.order.push_back(f);
    }
  }
  return fs;
}

std::string export_constraints(const DesignIR& design, const VirtualDevice& device, std::vector<Diagnostic>* diags) {
  std::map<std::string, std::vector<std::string>> cells;
  std::function<void(const Module&, const std::string&, const std::optional<std::string>&)> walk =
      [&](const Module& m, const std::string& prefix, const std::optional<std::string>& inherited) {
        if (!m.is_grouped()) return;
        for (const auto& inst : m.submodules) {
          const std::string path = prefix + inst.instance_name;
          std::optional<std::string> slot = inherited;
          if (inst.floorplan) {
            if (!device.has_slot(*inst.floorplan)) {
              throw Error("instance '" + path + "' is assigned to unknown slot '" + *inst.floorplan + "'");
            }
            if (inst.floorplan != inherited) cells[*inst.floorplan].push_back(path);
            slot = inst.floorplan;
          }
          const Module* child = design.find_module(inst.module_name);
          if (child) walk(*child, path + "/", slot);
        }
      };
  walk(design.module(design.top), "", std::nullopt);
  if (cells.empty()) {
    if (diags) diags->push_back({design.top, "constraints", Severity::warning, "no floorplan metadata; constraints are empty"});
    return {};
  }
  std::ostringstream os;
  for (auto& [slot, paths] : cells) {
    std::sort(paths.begin(), paths.end());
    os << "# slot " << slot << "\n";
    os << "create_pblock " << slot << "\n";
    std::string ranges;
    for (const auto& r : device.slot(slot).pblock_ranges) ranges += (ranges.empty() ? "" : " ") + r;
    if (!ranges.empty()) os << "resize_pblock [get_pblocks " << slot << "] -add {" << ranges << "}\n";
    os << "add_cells_to_pblock [get_pblocks " << slot << "] [get_cells {";
    for (size_t i = 0; i < paths.size(); ++i) os << (i ? " " : "") << paths[i];
    os << "}]\n\n";
  }
  return os.str();
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string export_dot(const DesignIR& design) {
  const Module& top = design.module(design.top);
  std::ostringstream os;
  os << "digraph " << quote(design.top) << " {\n  rankdir=LR;\n  node [shape=box];\n";
  if (top.is_grouped()) {
    std::map<std::string, std::vector<const Instance*>> by_slot;
    for (const auto& inst : top.submodules) by_slot[inst.floorplan.value_or("")].push_back(&inst);
    for (const auto& [slot, insts] : by_slot) {
      std::string indent = "  ";
      if (!slot.empty()) {
        os << "  subgraph " << quote("cluster_" + slot) << " {\n    label=" << quote(slot) << ";\n";
        indent = "    ";
      }
      for (const Instance* i : insts) {
        os << indent << quote(i->instance_name) << " [label=" << quote(i->instance_name + "\\n" + i->module_name)
           << "];\n";
      }
      if (!slot.empty()) os << "  }\n";
    }
    std::map<std::tuple<std::string, std::string, std::string>, int> edges;
    for (const auto& [net, ends] : build_nets(top)) {
      std::optional<Endpoint> driver;
      for (const auto& e : ends) {
        auto dir = driving_direction(design, top, e);
        if (dir && *dir == Direction::out) driver = e;
      }
      if (!driver) continue;
      const std::string from = driver->is_parent() ? "" : driver->instance;
      std::string type = "wire";
      if (!driver->is_parent()) {
        const Module& dm = design.module(top.find_instance(driver->instance)->module_name);
        if (const InterfaceSpec* iface = dm.interface_of(driver->port)) type = std::string(to_string(iface->type));
      }
      for (const auto& e : ends) {
        if (e == *driver) continue;
        const std::string to = e.is_parent() ? "" : e.instance;
        if (from.empty() || to.empty() || from == to) continue;
        std::string t = type;
        if (t == "wire") {
          const Module& sm = design.module(top.find_instance(e.instance)->module_name);
          if (const InterfaceSpec* iface = sm.interface_of(e.port)) t = std::string(to_string(iface->type));
        }
        ++edges[{from, to, t}];
      }
    }
    for (const auto& [key, n] : edges) {
      const auto& [from, to, type] = key;
      os << "  " << quote(from) << " -> " << quote(to) << " [label=" << quote(type + (n > 1 ? " x" + std::to_string(n) : ""))
         << (type == "handshake" || type == "feedforward" ? "" : ", style=dashed") << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

void write_files(const FileSet& files, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, text] : files.files) {
    std::ofstream os(fs::path(dir) / name, std::ios::binary);
    if (!os) throw Error("cannot write '" + (fs::path(dir) / name).string() + "'");
    os << text;
  }
  std::ofstream list(fs::path(dir) / "filelist.f");
  for (const auto& f : files.order) list << f << "\n";
}

}  // namespace hlps::exporter
