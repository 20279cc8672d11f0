// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hlps/ir.hpp"

namespace hlps {

enum class Format { json, yaml };

/// Raised by deserialization; `path()` locates the offending value
/// ("modules[2].module_ports[0].width").
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

nlohmann::json to_json(const DesignIR& design);
nlohmann::json to_json(const Module& module);
nlohmann::json to_json(const InterfaceSpec& iface);
/// Accepts the document form ({modules, top, device, provenance}) or a bare
/// list of modules, in which case the single uninstantiated module is top.
DesignIR design_from_json(const nlohmann::json& doc);
Module module_from_json(const nlohmann::json& j, const std::string& path = "module");
InterfaceSpec interface_from_json(const nlohmann::json& j, const std::string& path = "iface");

std::string serialize(const DesignIR& design, Format format);
DesignIR deserialize(std::string_view text, Format format);

/// Format from a file extension (.json, .yaml, .yml).
Format format_for_path(const std::string& path);
DesignIR load_design(const std::string& path);
void save_design(const DesignIR& design, const std::string& path);

/// Generic YAML <-> JSON value conversion (quoted YAML scalars stay strings).
nlohmann::json yaml_to_json(std::string_view yaml);
std::string json_to_yaml(const nlohmann::json& j);

/// The JSON Schema document describing the IR file format.
const nlohmann::json& design_schema();

struct EqualOptions {
  /// Compare interfaces, metadata, floorplans, provenance and device too.
  bool annotations = true;
};

/// First structural difference, or nullopt when equal. Maps compare
/// order-insensitively; wires compare under the bijection induced by their
/// endpoint sets.
std::optional<std::string> structural_diff(const DesignIR& a, const DesignIR& b,
                                           const EqualOptions& options = {});
bool structural_equal(const DesignIR& a, const DesignIR& b, const EqualOptions& options = {});

}  // namespace hlps
