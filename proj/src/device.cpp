// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/device.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>

#include "hlps/ir.hpp"

namespace hlps {

std::string CutLine::name() const {
  const char axis = vertical ? 'X' : 'Y';
  return std::string(1, axis) + std::to_string(index) + "|" + axis + std::to_string(index + 1);
}

std::string slot_name(int col, int row) {
  return "SLOT_X" + std::to_string(col) + "Y" + std::to_string(row);
}

std::optional<std::pair<int, int>> parse_slot_name(std::string_view name) {
  static const std::regex re(R"(SLOT_X(\d+)Y(\d+))");
  std::cmatch m;
  if (!std::regex_match(name.begin(), name.end(), m, re)) return std::nullopt;
  return std::make_pair(std::stoi(m[1].str()), std::stoi(m[2].str()));
}

namespace {

std::pair<std::string, std::string> canonical_pair(std::string_view a, std::string_view b) {
  std::string x(a), y(b);
  if (y < x) std::swap(x, y);
  return {x, y};
}

std::array<double, 5> parse_resources(const nlohmann::json& j, const std::string& where) {
  std::array<double, 5> out{};
  if (!j.is_object()) throw Error(where + ": resources must be an object");
  for (const auto& [key, value] : j.items()) {
    auto kind = resource_kind_from_string(key);
    if (!kind) throw Error(where + ": unknown resource kind '" + key + "'");
    if (!value.is_number()) throw Error(where + "." + key + ": expected a number");
    double v = value.get<double>();
    if (v < 0) throw Error(where + "." + key + ": capacity must be non-negative");
    out[static_cast<size_t>(*kind)] = v;
  }
  return out;
}

}  // namespace

const Slot& VirtualDevice::slot(std::string_view name) const {
  auto it = slots_.find(std::string(name));
  if (it == slots_.end()) throw Error("unknown slot '" + std::string(name) + "'");
  return it->second;
}

const Slot& VirtualDevice::slot_at(int col, int row) const { return slot(slot_name(col, row)); }

bool VirtualDevice::has_slot(std::string_view name) const {
  return slots_.count(std::string(name)) != 0;
}

std::optional<double> VirtualDevice::capacity(std::string_view a, std::string_view b) const {
  auto it = capacities_.find(canonical_pair(a, b));
  if (it == capacities_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, std::string>> VirtualDevice::adjacent_pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (int c = 0; c < cols_; ++c) {
    for (int r = 0; r < rows_; ++r) {
      if (c + 1 < cols_) out.push_back(canonical_pair(slot_name(c, r), slot_name(c + 1, r)));
      if (r + 1 < rows_) out.push_back(canonical_pair(slot_name(c, r), slot_name(c, r + 1)));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CutLine> VirtualDevice::cut_lines() const {
  std::vector<CutLine> out;
  for (int c = 0; c + 1 < cols_; ++c) out.push_back({true, c});
  for (int r = 0; r + 1 < rows_; ++r) out.push_back({false, r});
  return out;
}

std::optional<double> VirtualDevice::line_capacity(const CutLine& line) const {
  double total = 0;
  const int span = line.vertical ? rows_ : cols_;
  for (int k = 0; k < span; ++k) {
    std::optional<double> cap =
        line.vertical ? capacity(slot_name(line.index, k), slot_name(line.index + 1, k))
                      : capacity(slot_name(k, line.index), slot_name(k, line.index + 1));
    if (!cap) return std::nullopt;
    total += *cap;
  }
  return total;
}

bool VirtualDevice::crosses(const CutLine& line, std::string_view a, std::string_view b) const {
  const Slot& sa = slot(a);
  const Slot& sb = slot(b);
  int pa = line.vertical ? sa.col : sa.row;
  int pb = line.vertical ? sb.col : sb.row;
  return (pa <= line.index) != (pb <= line.index);
}

nlohmann::json VirtualDevice::to_json() const {
  nlohmann::json j;
  j["part"] = part_;
  j["cols"] = cols_;
  j["rows"] = rows_;
  nlohmann::json slots = nlohmann::json::object();
  for (const auto& [name, s] : slots_) {
    nlohmann::json res = nlohmann::json::object();
    for (ResourceKind k : kResourceKinds) res[std::string(to_string(k))] = s.capacity[static_cast<size_t>(k)];
    slots[name] = {{"resources", res}, {"pblock_ranges", s.pblock_ranges}};
  }
  j["slots"] = slots;
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& [pair, cap] : capacities_) {
    bounds.push_back({{"a", pair.first}, {"b", pair.second}, {"capacity", cap}});
  }
  j["boundaries"] = bounds;
  return j;
}

VirtualDevice VirtualDevice::from_json(const nlohmann::json& j, std::vector<std::string>* warnings) {
  return define_device(j, warnings);
}

VirtualDevice define_device(const nlohmann::json& spec, std::vector<std::string>* warnings) {
  if (!spec.is_object()) throw Error("device: expected an object");
  VirtualDevice dev;
  dev.part_ = spec.value("part", std::string());
  if (!spec.contains("cols") || !spec.contains("rows") || !spec["cols"].is_number_integer() ||
      !spec["rows"].is_number_integer()) {
    throw Error("device: 'cols' and 'rows' must be integers");
  }
  dev.cols_ = spec["cols"].get<int>();
  dev.rows_ = spec["rows"].get<int>();
  if (dev.cols_ < 1 || dev.rows_ < 1) throw Error("device: grid dimensions must be positive");

  std::optional<std::array<double, 5>> defaults;
  if (spec.contains("default_resources")) {
    defaults = parse_resources(spec["default_resources"], "device.default_resources");
  }
  const nlohmann::json slots =
      spec.contains("slots") ? spec["slots"] : nlohmann::json::object();
  if (!slots.is_object()) throw Error("device.slots: expected an object");
  for (const auto& [name, _] : slots.items()) {
    auto pos = parse_slot_name(name);
    if (!pos || pos->first >= dev.cols_ || pos->second >= dev.rows_) {
      throw Error("device.slots: slot '" + name + "' is outside the " + std::to_string(dev.cols_) +
                  "x" + std::to_string(dev.rows_) + " grid");
    }
  }
  for (int c = 0; c < dev.cols_; ++c) {
    for (int r = 0; r < dev.rows_; ++r) {
      Slot s;
      s.name = slot_name(c, r);
      s.col = c;
      s.row = r;
      if (slots.contains(s.name)) {
        const auto& js = slots[s.name];
        if (js.contains("resources")) {
          s.capacity = parse_resources(js["resources"], "device.slots." + s.name + ".resources");
        } else if (defaults) {
          s.capacity = *defaults;
        } else {
          throw Error("device.slots." + s.name + ": missing resource table");
        }
        if (js.contains("pblock_ranges")) {
          for (const auto& r : js["pblock_ranges"]) s.pblock_ranges.push_back(r.get<std::string>());
        }
      } else if (defaults) {
        s.capacity = *defaults;
      } else {
        throw Error("device: missing resource table for slot " + s.name);
      }
      dev.slots_[s.name] = s;
    }
  }

  std::optional<double> default_cap;
  if (spec.contains("default_boundary_capacity")) {
    default_cap = spec["default_boundary_capacity"].get<double>();
  }
  if (spec.contains("boundaries")) {
    for (const auto& b : spec["boundaries"]) {
      std::string a = b.at("a").get<std::string>();
      std::string c = b.at("b").get<std::string>();
      auto pa = parse_slot_name(a);
      auto pc = parse_slot_name(c);
      if (!pa || !pc || !dev.has_slot(a) || !dev.has_slot(c)) {
        throw Error("device.boundaries: unknown slot in pair " + a + "/" + c);
      }
      if (std::abs(pa->first - pc->first) + std::abs(pa->second - pc->second) != 1) {
        throw Error("device.boundaries: slots " + a + " and " + c + " are not adjacent");
      }
      double cap = b.at("capacity").get<double>();
      if (cap < 0) throw Error("device.boundaries: negative capacity for " + a + "/" + c);
      dev.capacities_[canonical_pair(a, c)] = cap;
    }
  }
  for (const auto& pair : dev.adjacent_pairs()) {
    if (dev.capacities_.count(pair)) continue;
    if (default_cap) {
      dev.capacities_[pair] = *default_cap;
    } else if (warnings) {
      warnings->push_back("boundary " + pair.first + "/" + pair.second +
                          " has no capacity; treated as unlimited");
    }
  }
  return dev;
}

int distance(const VirtualDevice& device, std::string_view a, std::string_view b) {
  const Slot& sa = device.slot(a);
  const Slot& sb = device.slot(b);
  return std::abs(sa.col - sb.col) + std::abs(sa.row - sb.row);
}

}  // namespace hlps
