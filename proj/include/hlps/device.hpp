// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hlps {

struct Slot {
  std::string name;
  int col = 0;
  int row = 0;
  /// capacity per resource kind, in `ResourceKind` order (LUT, FF, BRAM, DSP, URAM)
  std::array<double, 5> capacity{};
  std::vector<std::string> pblock_ranges;

  friend bool operator==(const Slot&, const Slot&) = default;
};

/// A straight grid line between two adjacent columns or rows. Wires whose
/// endpoints lie on opposite sides of the line cross it.
struct CutLine {
  bool vertical = true;  // true: between column `index` and `index + 1`
  int index = 0;

  std::string name() const;  // "X0|X1" or "Y1|Y2"
  friend auto operator<=>(const CutLine&, const CutLine&) = default;
};

/// Rectangular slot grid with per-slot resources and per-boundary wire
/// capacities. Capacities are keyed by adjacent slot pairs in canonical
/// (lexicographically ordered) form; a missing pair is unlimited.
class VirtualDevice {
 public:
  VirtualDevice() = default;

  const std::string& part() const { return part_; }
  int cols() const { return cols_; }
  int rows() const { return rows_; }
  const std::map<std::string, Slot>& slots() const { return slots_; }
  const std::map<std::pair<std::string, std::string>, double>& boundary_capacities() const {
    return capacities_;
  }

  const Slot& slot(std::string_view name) const;
  const Slot& slot_at(int col, int row) const;
  bool has_slot(std::string_view name) const;

  /// Capacity of the boundary between two adjacent slots (nullopt: unlimited).
  std::optional<double> capacity(std::string_view a, std::string_view b) const;
  /// All adjacent slot pairs, canonical order.
  std::vector<std::pair<std::string, std::string>> adjacent_pairs() const;
  /// All interior cut lines: vertical lines first, then horizontal.
  std::vector<CutLine> cut_lines() const;
  /// Sum of pair capacities along a line (nullopt if any pair is unlimited).
  std::optional<double> line_capacity(const CutLine& line) const;
  /// True when slots `a` and `b` lie on opposite sides of `line`.
  bool crosses(const CutLine& line, std::string_view a, std::string_view b) const;

  nlohmann::json to_json() const;
  static VirtualDevice from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr);

  friend bool operator==(const VirtualDevice&, const VirtualDevice&) = default;

 private:
  friend VirtualDevice define_device(const nlohmann::json& spec, std::vector<std::string>* warnings);

  std::string part_;
  int cols_ = 0;
  int rows_ = 0;
  std::map<std::string, Slot> slots_;
  std::map<std::pair<std::string, std::string>, double> capacities_;
};

std::string slot_name(int col, int row);
/// Parses "SLOT_X<c>Y<r>"; nullopt if malformed.
std::optional<std::pair<int, int>> parse_slot_name(std::string_view name);

/// Builds and validates a device from a spec document:
///
///   { "part": "...", "cols": 2, "rows": 4,
///     "default_resources": {"LUT": 100000, ...},          (optional)
///     "slots": { "SLOT_X0Y0": { "resources": {...}, "pblock_ranges": [...] }, ... },
///     "boundaries": [ { "a": "SLOT_X0Y0", "b": "SLOT_X1Y0", "capacity": 5000 }, ... ],
///     "default_boundary_capacity": 5000 }                (optional)
///
/// Missing boundary capacities are unlimited; one warning is appended per
/// missing pair when `warnings` is given.
VirtualDevice define_device(const nlohmann::json& spec, std::vector<std::string>* warnings = nullptr);

/// Manhattan distance between two slots.
int distance(const VirtualDevice& device, std::string_view a, std::string_view b);

}  // namespace hlps
