// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hlps/device.hpp"

namespace hlps {

/// Raised for malformed input or a violated operation precondition.
/// Rule violations found by DRC are reported as Diagnostic values instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Direction { in, out, inout };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);
Direction flip(Direction d);

struct Port {
  std::string name;
  Direction direction = Direction::in;
  int width = 1;

  friend bool operator==(const Port&, const Port&) = default;
};

struct Wire {
  std::string name;
  int width = 1;

  friend bool operator==(const Wire&, const Wire&) = default;
};

enum class InterfaceType { handshake, feedforward, clock, reset, false_path };

std::string_view to_string(InterfaceType t);
InterfaceType interface_type_from_string(std::string_view s);

/// A pipeline strategy over a set of ports.
///
/// Handshake interfaces use `data`, `valid`, `ready` and optionally `clk`.
/// Feedforward interfaces use `data` and optionally `clk`. Clock, reset and
/// false-path interfaces list their member ports in `ports`. The `clk` role
/// only references a clock; it does not make that port a member.
struct InterfaceSpec {
  InterfaceType type = InterfaceType::handshake;
  std::vector<std::string> data;
  std::string valid;
  std::string ready;
  std::string clk;
  std::vector<std::string> ports;
  std::string active;  // reset polarity: "high", "low" or empty

  /// Member ports (every role except `clk`), in role order.
  std::vector<std::string> members() const;
  /// Member ports plus the `clk` reference, if any.
  std::vector<std::string> all_ports() const;
  bool pipelinable() const {
    return type == InterfaceType::handshake || type == InterfaceType::feedforward;
  }

  friend bool operator==(const InterfaceSpec&, const InterfaceSpec&) = default;
};

enum class ResourceKind { LUT, FF, BRAM, DSP, URAM };
inline constexpr std::array<ResourceKind, 5> kResourceKinds = {
    ResourceKind::LUT, ResourceKind::FF, ResourceKind::BRAM, ResourceKind::DSP, ResourceKind::URAM};

std::string_view to_string(ResourceKind k);
std::optional<ResourceKind> resource_kind_from_string(std::string_view s);

/// Per-kind resource amounts. Index with `ResourceKind`.
struct Resources {
  std::array<double, 5> amount{};

  double& operator[](ResourceKind k) { return amount[static_cast<size_t>(k)]; }
  double operator[](ResourceKind k) const { return amount[static_cast<size_t>(k)]; }
  Resources& operator+=(const Resources& o) {
    for (size_t i = 0; i < amount.size(); ++i) amount[i] += o.amount[i];
    return *this;
  }
  friend Resources operator+(Resources a, const Resources& b) { return a += b; }
  friend bool operator==(const Resources&, const Resources&) = default;
};

struct Metadata {
  std::optional<Resources> resource;
  std::optional<std::string> floorplan;
  nlohmann::json extra = nlohmann::json::object();

  friend bool operator==(const Metadata&, const Metadata&) = default;
};

struct Instance {
  std::string instance_name;
  std::string module_name;
  /// port name -> identifier (wire or parent port) or sized constant literal
  std::map<std::string, std::string> connections;
  std::optional<std::string> floorplan;

  friend bool operator==(const Instance&, const Instance&) = default;
};

enum class ModuleKind { leaf, grouped };
enum class SourceFormat { verilog, opaque };

std::string_view to_string(SourceFormat f);

/// A leaf (atomic source blob) or grouped (instances + point-to-point wires)
/// module. Leaf-only and grouped-only fields are empty for the other kind.
struct Module {
  std::string name;
  ModuleKind kind = ModuleKind::leaf;
  std::vector<Port> ports;
  std::vector<InterfaceSpec> interfaces;
  Metadata metadata;

  // leaf
  std::string source;
  SourceFormat format = SourceFormat::verilog;

  // grouped
  std::vector<Wire> wires;
  std::vector<Instance> submodules;

  bool is_leaf() const { return kind == ModuleKind::leaf; }
  bool is_grouped() const { return kind == ModuleKind::grouped; }

  const Port* find_port(std::string_view port) const;
  const Wire* find_wire(std::string_view wire) const;
  const Instance* find_instance(std::string_view inst) const;
  Instance* find_instance(std::string_view inst);
  /// Interface containing `port` as a member, if any.
  const InterfaceSpec* interface_of(std::string_view port) const;
  /// Generated-module role tag stored in `metadata.extra["role"]` ("aux",
  /// "split", "broadcast", "helper", "wrapper", "group"), or empty.
  std::string role() const;

  friend bool operator==(const Module&, const Module&) = default;
};

struct DesignIR {
  std::map<std::string, Module> modules;
  std::string top;
  std::optional<VirtualDevice> device;
  /// current element id -> original element id
  std::map<std::string, std::string> provenance;

  const Module& module(std::string_view name) const;
  Module& module(std::string_view name);
  const Module* find_module(std::string_view name) const;
  bool has_module(std::string_view name) const { return find_module(name) != nullptr; }

  friend bool operator==(const DesignIR&, const DesignIR&) = default;
};

// ---------------------------------------------------------------------------
// literals and identifiers

/// True for sized Verilog literals such as `1'b0`, `8'hFF`, `4'd3`.
bool is_sized_constant(std::string_view text);
/// Width of a sized literal; nullopt when `text` is not one.
std::optional<int> constant_width(std::string_view text);
bool is_identifier(std::string_view text);

/// Element id of an instance: "<module>/<instance>".
std::string element_id(std::string_view module, std::string_view instance);

/// Provenance root of `id`: follows the map until a fixpoint.
std::string provenance_root(const DesignIR& design, const std::string& id);
/// Records that `created` derives from `origin` (stored as origin's root).
void record_provenance(DesignIR& design, const std::string& created, const std::string& origin);
/// Drops entries whose key is no longer an element of the design.
void prune_provenance(DesignIR& design);
/// Element ids present in the design: module names and instance ids.
std::vector<std::string> element_ids(const DesignIR& design);

/// Modules reachable from `top` through grouped instances and through the
/// instantiations found in Verilog leaf sources, top first.
std::vector<std::string> reachable_modules(const DesignIR& design);
/// Removes modules that are not reachable from the top module.
void prune_unreferenced(DesignIR& design);

/// Name not present in `taken`, derived from `base` by appending `_<n>`.
std::string fresh_name(const std::string& base, const std::vector<std::string>& taken);

}  // namespace hlps
