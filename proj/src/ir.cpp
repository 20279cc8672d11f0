// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/ir.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>

#include "hlps/verilog.hpp"

namespace hlps {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::in: return "in";
    case Direction::out: return "out";
    case Direction::inout: return "inout";
  }
  return "in";
}

Direction direction_from_string(std::string_view s) {
  if (s == "in" || s == "input") return Direction::in;
  if (s == "out" || s == "output") return Direction::out;
  if (s == "inout") return Direction::inout;
  throw Error("unknown port direction '" + std::string(s) + "'");
}

Direction flip(Direction d) {
  if (d == Direction::in) return Direction::out;
  if (d == Direction::out) return Direction::in;
  return Direction::inout;
}

std::string_view to_string(InterfaceType t) {
  switch (t) {
    case InterfaceType::handshake: return "handshake";
    case InterfaceType::feedforward: return "feedforward";
    case InterfaceType::clock: return "clock";
    case InterfaceType::reset: return "reset";
    case InterfaceType::false_path: return "false_path";
  }
  return "handshake";
}

InterfaceType interface_type_from_string(std::string_view s) {
  if (s == "handshake") return InterfaceType::handshake;
  if (s == "feedforward") return InterfaceType::feedforward;
  if (s == "clock") return InterfaceType::clock;
  if (s == "reset") return InterfaceType::reset;
  if (s == "false_path") return InterfaceType::false_path;
  throw Error("unknown interface type '" + std::string(s) + "'");
}

std::vector<std::string> InterfaceSpec::members() const {
  std::vector<std::string> out = data;
  if (!valid.empty()) out.push_back(valid);
  if (!ready.empty()) out.push_back(ready);
  out.insert(out.end(), ports.begin(), ports.end());
  return out;
}

std::vector<std::string> InterfaceSpec::all_ports() const {
  std::vector<std::string> out = members();
  if (!clk.empty()) out.push_back(clk);
  return out;
}

std::string_view to_string(ResourceKind k) {
  switch (k) {
    case ResourceKind::LUT: return "LUT";
    case ResourceKind::FF: return "FF";
    case ResourceKind::BRAM: return "BRAM";
    case ResourceKind::DSP: return "DSP";
    case ResourceKind::URAM: return "URAM";
  }
  return "LUT";
}

std::optional<ResourceKind> resource_kind_from_string(std::string_view s) {
  for (ResourceKind k : kResourceKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(SourceFormat f) {
  return f == SourceFormat::verilog ? "verilog" : "opaque";
}

const Port* Module::find_port(std::string_view port) const {
  for (const auto& p : ports) {
    if (p.name == port) return &p;
  }
  return nullptr;
}

const Wire* Module::find_wire(std::string_view wire) const {
  for (const auto& w : wires) {
    if (w.name == wire) return &w;
  }
  return nullptr;
}

const Instance* Module::find_instance(std::string_view inst) const {
  for (const auto& i : submodules) {
    if (i.instance_name == inst) return &i;
  }
  return nullptr;
}

Instance* Module::find_instance(std::string_view inst) {
  for (auto& i : submodules) {
    if (i.instance_name == inst) return &i;
  }
  return nullptr;
}

const InterfaceSpec* Module::interface_of(std::string_view port) const {
  for (const auto& iface : interfaces) {
    for (const auto& m : iface.members()) {
      if (m == port) return &iface;
    }
  }
  return nullptr;
}

std::string Module::role() const {
  if (metadata.extra.is_object() && metadata.extra.contains("role") &&
      metadata.extra["role"].is_string()) {
    return metadata.extra["role"].get<std::string>();
  }
  return {};
}

const Module& DesignIR::module(std::string_view name) const {
  auto it = modules.find(std::string(name));
  if (it == modules.end()) throw Error("unknown module '" + std::string(name) + "'");
  return it->second;
}

Module& DesignIR::module(std::string_view name) {
  auto it = modules.find(std::string(name));
  if (it == modules.end()) throw Error("unknown module '" + std::string(name) + "'");
  return it->second;
}

const Module* DesignIR::find_module(std::string_view name) const {
  auto it = modules.find(std::string(name));
  return it == modules.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------

std::optional<int> constant_width(std::string_view text) {
  size_t q = text.find('\'');
  if (q == 0 || q == std::string_view::npos) return std::nullopt;
  int width = 0;
  for (size_t i = 0; i < q; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
    width = width * 10 + (text[i] - '0');
    if (width > 1 << 20) return std::nullopt;
  }
  if (width < 1) return std::nullopt;
  size_t i = q + 1;
  if (i < text.size() && (text[i] == 's' || text[i] == 'S')) ++i;
  if (i >= text.size()) return std::nullopt;
  const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
  std::string_view digits;
  switch (base) {
    case 'b': digits = "01xz?_"; break;
    case 'o': digits = "01234567xz?_"; break;
    case 'd': digits = "0123456789_"; break;
    case 'h': digits = "0123456789abcdefxz?_"; break;
    default: return std::nullopt;
  }
  ++i;
  if (i >= text.size()) return std::nullopt;
  for (; i < text.size(); ++i) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    if (digits.find(c) == std::string_view::npos) return std::nullopt;
  }
  return width;
}

bool is_sized_constant(std::string_view text) { return constant_width(text).has_value(); }

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(text[0])) || text[0] == '_')) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
  });
}

std::string element_id(std::string_view module, std::string_view instance) {
  return std::string(module) + "/" + std::string(instance);
}

std::string provenance_root(const DesignIR& design, const std::string& id) {
  std::string cur = id;
  std::set<std::string> seen;
  while (true) {
    auto it = design.provenance.find(cur);
    if (it == design.provenance.end() || it->second == cur || !seen.insert(cur).second) return cur;
    cur = it->second;
  }
}

void record_provenance(DesignIR& design, const std::string& created, const std::string& origin) {
  std::string root = provenance_root(design, origin);
  if (root != created) design.provenance[created] = root;
}

std::vector<std::string> element_ids(const DesignIR& design) {
  std::vector<std::string> out;
  for (const auto& [name, m] : design.modules) {
    out.push_back(name);
    for (const auto& inst : m.submodules) out.push_back(element_id(name, inst.instance_name));
    if (m.is_leaf() && m.format == SourceFormat::verilog && !m.source.empty()) {
      try {
        for (const auto& inst : verilog::extract_instantiations(m).instantiations) {
          out.push_back(element_id(name, inst.instance_name));
        }
      } catch (const Error&) {
        // unparseable leaves contribute only their own id
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void prune_provenance(DesignIR& design) {
  auto ids = element_ids(design);
  std::set<std::string> live(ids.begin(), ids.end());
  std::erase_if(design.provenance, [&](const auto& kv) { return !live.count(kv.first); });
}

std::vector<std::string> reachable_modules(const DesignIR& design) {
  std::vector<std::string> order;
  if (!design.has_module(design.top)) return order;
  std::set<std::string> seen{design.top};
  std::deque<std::string> queue{design.top};
  while (!queue.empty()) {
    std::string name = queue.front();
    queue.pop_front();
    order.push_back(name);
    const Module& m = design.module(name);
    std::vector<std::string> children;
    for (const auto& inst : m.submodules) children.push_back(inst.module_name);
    if (m.is_leaf() && m.format == SourceFormat::verilog && !m.source.empty()) {
      try {
        for (const auto& inst : verilog::extract_instantiations(m).instantiations) {
          children.push_back(inst.module_name);
        }
      } catch (const Error&) {
      }
    }
    for (const auto& c : children) {
      if (design.has_module(c) && seen.insert(c).second) queue.push_back(c);
    }
  }
  return order;
}

void prune_unreferenced(DesignIR& design) {
  auto keep = reachable_modules(design);
  std::set<std::string> live(keep.begin(), keep.end());
  std::erase_if(design.modules, [&](const auto& kv) { return !live.count(kv.first); });
}

std::string fresh_name(const std::string& base, const std::vector<std::string>& taken) {
  auto used = [&](const std::string& s) {
    return std::find(taken.begin(), taken.end(), s) != taken.end();
  };
  if (!used(base)) return base;
  for (int n = 1;; ++n) {
    std::string candidate = base + "_" + std::to_string(n);
    if (!used(candidate)) return candidate;
  }
}

}  // namespace hlps
