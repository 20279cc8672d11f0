// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/serialize.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "hlps/netlist.hpp"
#include "schema_text.hpp"

namespace hlps {

using nlohmann::json;

namespace {

json number(double v) {
  if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 1e15) return static_cast<long long>(v);
  return v;
}

json ports_json(const std::vector<Port>& ports) {
  json out = json::array();
  for (const auto& p : ports) {
    out.push_back({{"name", p.name}, {"direction", to_string(p.direction)}, {"width", p.width}});
  }
  return out;
}

json metadata_json(const Metadata& m) {
  json out = json::object();
  if (m.resource) {
    json r = json::object();
    for (ResourceKind k : kResourceKinds) r[std::string(to_string(k))] = number((*m.resource)[k]);
    out["resource"] = r;
  }
  if (m.floorplan) out["floorplan"] = *m.floorplan;
  if (!m.extra.is_null() && !(m.extra.is_object() && m.extra.empty())) out["extra"] = m.extra;
  return out;
}

}  // namespace

json to_json(const InterfaceSpec& iface) {
  json ports = json::object();
  if (!iface.data.empty() || iface.type == InterfaceType::handshake ||
      iface.type == InterfaceType::feedforward) {
    ports["data"] = iface.data;
  }
  if (!iface.valid.empty()) ports["valid"] = iface.valid;
  if (!iface.ready.empty()) ports["ready"] = iface.ready;
  if (!iface.clk.empty()) ports["clk"] = iface.clk;
  if (!iface.ports.empty()) ports["ports"] = iface.ports;
  json out = {{"iface_type", to_string(iface.type)}, {"iface_ports", ports}};
  if (!iface.active.empty()) out["active"] = iface.active;
  return out;
}

json to_json(const Module& m) {
  json out = json::object();
  out["module_name"] = m.name;
  out["module_type"] = m.is_leaf() ? "leaf" : "grouped";
  out["module_ports"] = ports_json(m.ports);
  if (m.is_leaf()) {
    out["module_format"] = to_string(m.format);
    out[m.format == SourceFormat::verilog ? "module_verilog" : "module_source"] = m.source;
  } else {
    json wires = json::array();
    for (const auto& w : m.wires) wires.push_back({{"name", w.name}, {"width", w.width}});
    out["module_wires"] = wires;
    json subs = json::array();
    for (const auto& inst : m.submodules) {
      json conns = json::array();
      for (const auto& [port, value] : inst.connections) conns.push_back({{"port", port}, {"value", value}});
      json ji = {{"instance_name", inst.instance_name}, {"module_name", inst.module_name}, {"connections", conns}};
      if (inst.floorplan) ji["floorplan"] = *inst.floorplan;
      subs.push_back(ji);
    }
    out["module_submodules"] = subs;
  }
  json ifaces = json::array();
  for (const auto& i : m.interfaces) ifaces.push_back(to_json(i));
  out["module_interfaces"] = ifaces;
  out["module_metadata"] = metadata_json(m.metadata);
  return out;
}

json to_json(const DesignIR& d) {
  json out = json::object();
  out["version"] = 1;
  out["top"] = d.top;
  json mods = json::array();
  for (const auto& [name, m] : d.modules) mods.push_back(to_json(m));
  out["modules"] = mods;
  if (d.device) out["device"] = d.device->to_json();
  json prov = json::object();
  for (const auto& [k, v] : d.provenance) prov[k] = v;
  out["provenance"] = prov;
  return out;
}

// ---------------------------------------------------------------------------
// reading

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw SchemaError(path, what); }

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) fail(path, std::string("missing required field '") + key + "'");
  return j[key];
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

int positive_int(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !(j.is_number_float() && std::floor(j.get<double>()) == j.get<double>())) {
    fail(path, "expected an integer");
  }
  long long v = j.is_number_integer() ? j.get<long long>() : static_cast<long long>(j.get<double>());
  if (v < 1 || v > (1LL << 30)) fail(path, "expected a positive integer");
  return static_cast<int>(v);
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list");
  return j;
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [k, _] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      fail(path + "." + k, "unknown field");
    }
  }
}

std::vector<std::string> names(const json& j, const std::string& path) {
  std::vector<std::string> out;
  if (j.is_string()) {
    out.push_back(j.get<std::string>());
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) out.push_back(str(j[i], path + "[" + std::to_string(i) + "]"));
  } else {
    fail(path, "expected a port name or list of port names");
  }
  return out;
}

std::string single_name(const json& j, const std::string& path) {
  auto v = names(j, path);
  if (v.size() != 1) fail(path, "expected exactly one port name");
  return v.front();
}

std::vector<Port> ports_from(const json& j, const std::string& path) {
  std::vector<Port> out;
  array(j, path);
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    only_keys(j[i], p, {"name", "direction", "width"});
    Port port;
    port.name = str(need(j[i], "name", p), p + ".name");
    try {
      port.direction = direction_from_string(str(need(j[i], "direction", p), p + ".direction"));
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      fail(p + ".direction", e.what());
    }
    port.width = j[i].contains("width") ? positive_int(j[i]["width"], p + ".width") : 1;
    out.push_back(std::move(port));
  }
  return out;
}

Metadata metadata_from(const json& j, const std::string& path) {
  Metadata m;
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "resource") {
      if (!value.is_object()) fail(path + ".resource", "expected an object");
      Resources r;
      for (const auto& [kind, amount] : value.items()) {
        auto k = resource_kind_from_string(kind);
        if (!k) fail(path + ".resource." + kind, "unknown resource kind");
        if (!amount.is_number()) fail(path + ".resource." + kind, "expected a number");
        r[*k] = amount.get<double>();
      }
      m.resource = r;
    } else if (key == "floorplan") {
      if (!value.is_null()) m.floorplan = str(value, path + ".floorplan");
    } else if (key == "extra") {
      if (!value.is_object()) fail(path + ".extra", "expected an object");
      for (const auto& [k, v] : value.items()) m.extra[k] = v;
    } else {
      m.extra[key] = value;
    }
  }
  return m;
}

}  // namespace

InterfaceSpec interface_from_json(const json& j, const std::string& path) {
  only_keys(j, path, {"iface_type", "iface_ports", "active"});
  InterfaceSpec s;
  try {
    s.type = interface_type_from_string(str(need(j, "iface_type", path), path + ".iface_type"));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    fail(path + ".iface_type", e.what());
  }
  const std::string pp = path + ".iface_ports";
  const json& ports = need(j, "iface_ports", path);
  only_keys(ports, pp, {"data", "valid", "ready", "clk", "ports"});
  if (ports.contains("data")) s.data = names(ports["data"], pp + ".data");
  if (ports.contains("valid")) s.valid = single_name(ports["valid"], pp + ".valid");
  if (ports.contains("ready")) s.ready = single_name(ports["ready"], pp + ".ready");
  if (ports.contains("clk")) s.clk = single_name(ports["clk"], pp + ".clk");
  if (ports.contains("ports")) s.ports = names(ports["ports"], pp + ".ports");
  if (j.contains("active")) {
    s.active = str(j["active"], path + ".active");
    if (s.active != "high" && s.active != "low") fail(path + ".active", "expected 'high' or 'low'");
  }
  return s;
}

Module module_from_json(const json& j, const std::string& path) {
  only_keys(j, path,
            {"module_name", "module_type", "module_ports", "module_wires", "module_submodules",
             "module_verilog", "module_source", "module_format", "module_interfaces",
             "module_metadata"});
  Module m;
  m.name = str(need(j, "module_name", path), path + ".module_name");
  if (j.contains("module_type")) {
    std::string t = str(j["module_type"], path + ".module_type");
    if (t == "leaf") {
      m.kind = ModuleKind::leaf;
    } else if (t == "grouped") {
      m.kind = ModuleKind::grouped;
    } else {
      fail(path + ".module_type", "expected 'leaf' or 'grouped'");
    }
  } else {
    m.kind = (j.contains("module_submodules") || j.contains("module_wires")) ? ModuleKind::grouped
                                                                             : ModuleKind::leaf;
  }
  if (j.contains("module_ports")) m.ports = ports_from(j["module_ports"], path + ".module_ports");
  if (m.is_leaf()) {
    if (j.contains("module_wires") || j.contains("module_submodules")) {
      fail(path, "leaf modules cannot have wires or submodules");
    }
    std::string fmt = j.contains("module_format") ? str(j["module_format"], path + ".module_format") : "";
    if (fmt.empty()) fmt = j.contains("module_source") && !j.contains("module_verilog") ? "opaque" : "verilog";
    if (fmt == "verilog") {
      m.format = SourceFormat::verilog;
      if (j.contains("module_source")) fail(path + ".module_source", "verilog leaves use module_verilog");
      if (j.contains("module_verilog")) m.source = str(j["module_verilog"], path + ".module_verilog");
    } else if (fmt == "opaque") {
      m.format = SourceFormat::opaque;
      if (j.contains("module_verilog")) fail(path + ".module_verilog", "opaque leaves use module_source");
      if (j.contains("module_source")) m.source = str(j["module_source"], path + ".module_source");
    } else {
      fail(path + ".module_format", "expected 'verilog' or 'opaque'");
    }
  } else {
    for (const char* k : {"module_verilog", "module_source", "module_format"}) {
      if (j.contains(k)) fail(path + "." + k, "grouped modules carry no source");
    }
    if (j.contains("module_wires")) {
      const std::string wp = path + ".module_wires";
      const json& ws = array(j["module_wires"], wp);
      for (size_t i = 0; i < ws.size(); ++i) {
        const std::string p = wp + "[" + std::to_string(i) + "]";
        only_keys(ws[i], p, {"name", "width"});
        m.wires.push_back({str(need(ws[i], "name", p), p + ".name"),
                           ws[i].contains("width") ? positive_int(ws[i]["width"], p + ".width") : 1});
      }
    }
    if (j.contains("module_submodules")) {
      const std::string sp = path + ".module_submodules";
      const json& ss = array(j["module_submodules"], sp);
      for (size_t i = 0; i < ss.size(); ++i) {
        const std::string p = sp + "[" + std::to_string(i) + "]";
        only_keys(ss[i], p, {"instance_name", "module_name", "connections", "floorplan"});
        Instance inst;
        inst.instance_name = str(need(ss[i], "instance_name", p), p + ".instance_name");
        inst.module_name = str(need(ss[i], "module_name", p), p + ".module_name");
        if (ss[i].contains("connections")) {
          const json& cs = ss[i]["connections"];
          const std::string cp = p + ".connections";
          if (cs.is_object()) {
            for (const auto& [port, value] : cs.items()) inst.connections[port] = str(value, cp + "." + port);
          } else {
            array(cs, cp);
            for (size_t k = 0; k < cs.size(); ++k) {
              const std::string c = cp + "[" + std::to_string(k) + "]";
              only_keys(cs[k], c, {"port", "value"});
              std::string port = str(need(cs[k], "port", c), c + ".port");
              if (inst.connections.count(port)) fail(c + ".port", "port '" + port + "' connected twice");
              inst.connections[port] = str(need(cs[k], "value", c), c + ".value");
            }
          }
        }
        if (ss[i].contains("floorplan") && !ss[i]["floorplan"].is_null()) {
          inst.floorplan = str(ss[i]["floorplan"], p + ".floorplan");
        }
        m.submodules.push_back(std::move(inst));
      }
    }
  }
  if (j.contains("module_interfaces")) {
    const std::string ip = path + ".module_interfaces";
    const json& is = array(j["module_interfaces"], ip);
    for (size_t i = 0; i < is.size(); ++i) {
      m.interfaces.push_back(interface_from_json(is[i], ip + "[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("module_metadata")) m.metadata = metadata_from(j["module_metadata"], path + ".module_metadata");
  return m;
}

DesignIR design_from_json(const json& doc) {
  DesignIR d;
  json modules;
  if (doc.is_array()) {
    modules = doc;
  } else if (doc.is_object()) {
    only_keys(doc, "$", {"version", "top", "modules", "device", "provenance"});
    if (doc.contains("version") && doc["version"] != 1) fail("version", "unsupported version");
    modules = doc.contains("modules") ? doc["modules"] : json::array();
    if (doc.contains("top")) d.top = str(doc["top"], "top");
  } else {
    fail("$", "expected a design object or a list of modules");
  }
  auto add = [&](const json& j, const std::string& path) {
    Module m = module_from_json(j, path);
    if (d.modules.count(m.name)) fail(path + ".module_name", "duplicate module '" + m.name + "'");
    std::string name = m.name;
    d.modules.emplace(name, std::move(m));
  };
  if (modules.is_array()) {
    for (size_t i = 0; i < modules.size(); ++i) add(modules[i], "modules[" + std::to_string(i) + "]");
  } else if (modules.is_object()) {
    for (const auto& [k, v] : modules.items()) {
      json copy = v;
      if (!copy.is_object()) fail("modules." + k, "expected an object");
      if (!copy.contains("module_name")) copy["module_name"] = k;
      if (copy["module_name"] != k) fail("modules." + k + ".module_name", "does not match its key");
      add(copy, "modules." + k);
    }
  } else {
    fail("modules", "expected a list or object");
  }
  if (doc.is_object() && doc.contains("device") && !doc["device"].is_null()) {
    try {
      d.device = VirtualDevice::from_json(doc["device"]);
    } catch (const Error& e) {
      fail("device", e.what());
    }
  }
  if (doc.is_object() && doc.contains("provenance")) {
    if (!doc["provenance"].is_object()) fail("provenance", "expected an object");
    for (const auto& [k, v] : doc["provenance"].items()) d.provenance[k] = str(v, "provenance." + k);
  }
  if (d.top.empty() && doc.is_array() && !d.modules.empty()) {
    std::set<std::string> instantiated;
    for (const auto& [_, m] : d.modules) {
      for (const auto& inst : m.submodules) instantiated.insert(inst.module_name);
    }
    std::vector<std::string> roots;
    for (const auto& [name, _] : d.modules) {
      if (!instantiated.count(name)) roots.push_back(name);
    }
    if (roots.size() == 1) d.top = roots.front();
  }
  return d;
}

// ---------------------------------------------------------------------------
// YAML

namespace {

json yaml_node_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (const auto& c : n) out.push_back(yaml_node_to_json(c));
      return out;
    }
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& kv : n) out[kv.first.as<std::string>()] = yaml_node_to_json(kv.second);
      return out;
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = n.Scalar();
      if (n.Tag() == "!") return s;  // quoted
      static const std::regex int_re(R"([-+]?[0-9]+)");
      static const std::regex float_re(R"([-+]?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)([eE][-+]?[0-9]+)?)");
      if (std::regex_match(s, int_re)) {
        try {
          return std::stoll(s);
        } catch (const std::out_of_range&) {
          return std::stod(s);
        }
      }
      if (std::regex_match(s, float_re)) return std::stod(s);
      if (s == "true" || s == "True") return true;
      if (s == "false" || s == "False") return false;
      if (s == "~" || s == "null" || s == "Null") return nullptr;
      return s;
    }
  }
  return nullptr;
}

void emit(YAML::Emitter& out, const json& j) {
  switch (j.type()) {
    case json::value_t::object:
      if (j.empty()) {
        out << YAML::Flow << YAML::BeginMap << YAML::EndMap;
        break;
      }
      out << YAML::BeginMap;
      for (const auto& [k, v] : j.items()) {
        out << YAML::Key << YAML::DoubleQuoted << k << YAML::Value;
        emit(out, v);
      }
      out << YAML::EndMap;
      break;
    case json::value_t::array:
      if (j.empty()) {
        out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
        break;
      }
      out << YAML::BeginSeq;
      for (const auto& v : j) emit(out, v);
      out << YAML::EndSeq;
      break;
    case json::value_t::string:
      out << YAML::DoubleQuoted << j.get<std::string>();
      break;
    case json::value_t::null:
      out << YAML::Null;
      break;
    default:
      out << j.dump();  // numbers and booleans, shortest round-trip form
      break;
  }
}

}  // namespace

json yaml_to_json(std::string_view yaml) {
  try {
    return yaml_node_to_json(YAML::Load(std::string(yaml)));
  } catch (const YAML::Exception& e) {
    throw Error(std::string("YAML: ") + e.what());
  }
}

std::string json_to_yaml(const json& j) {
  YAML::Emitter out;
  out.SetIndent(2);
  emit(out, j);
  return std::string(out.c_str()) + "\n";
}

std::string serialize(const DesignIR& design, Format format) {
  json j = to_json(design);
  if (format == Format::json) return j.dump(2) + "\n";
  return json_to_yaml(j);
}

DesignIR deserialize(std::string_view text, Format format) {
  json j;
  if (format == Format::json) {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
  } else {
    try {
      j = yaml_to_json(text);
    } catch (const Error& e) {
      throw SchemaError("$", e.what());
    }
  }
  return design_from_json(j);
}

Format format_for_path(const std::string& path) {
  auto ends = [&](std::string_view s) {
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends(".yaml") || ends(".yml")) return Format::yaml;
  return Format::json;
}

DesignIR load_design(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize(ss.str(), format_for_path(path));
  } catch (const SchemaError& e) {
    throw SchemaError(path + ":" + e.path(), e.what());
  }
}

void save_design(const DesignIR& design, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << serialize(design, format_for_path(path));
}

const json& design_schema() {
  static const json schema = json::parse(kDesignSchemaText);
  return schema;
}

// ---------------------------------------------------------------------------
// structural equality

namespace {

using WireKey = std::vector<Endpoint>;

std::map<std::string, WireKey> wire_keys(const Module& m) {
  std::map<std::string, WireKey> out;
  NetMap nets = build_nets(m);
  for (const auto& w : m.wires) {
    WireKey k = nets[w.name];
    std::sort(k.begin(), k.end());
    out[w.name] = k;
  }
  return out;
}

std::string key_str(const WireKey& k) {
  std::string s = "{";
  for (const auto& e : k) s += e.str() + " ";
  return s + "}";
}

std::optional<std::string> module_diff(const Module& a, const Module& b, const EqualOptions& opt) {
  const std::string& n = a.name;
  if (a.kind != b.kind) return n + ": kind differs";
  std::map<std::string, std::pair<Direction, int>> pa, pb;
  for (const auto& p : a.ports) pa[p.name] = {p.direction, p.width};
  for (const auto& p : b.ports) pb[p.name] = {p.direction, p.width};
  if (pa.size() != a.ports.size() || pb.size() != b.ports.size()) return n + ": duplicate ports";
  if (pa != pb) return n + ": ports differ";
  if (opt.annotations) {
    auto sorted = [](const std::vector<InterfaceSpec>& v) {
      std::vector<std::string> s;
      for (const auto& i : v) s.push_back(to_json(i).dump());
      std::sort(s.begin(), s.end());
      return s;
    };
    if (sorted(a.interfaces) != sorted(b.interfaces)) return n + ": interfaces differ";
    if (!(a.metadata == b.metadata)) return n + ": metadata differs";
  }
  if (a.is_leaf()) {
    if (a.format != b.format) return n + ": source format differs";
    if (a.source != b.source) return n + ": source differs";
    return std::nullopt;
  }
  auto ka = wire_keys(a);
  auto kb = wire_keys(b);
  std::map<WireKey, int> wa, wb;
  std::multiset<int> loose_a, loose_b;
  for (const auto& w : a.wires) {
    if (ka[w.name].empty()) loose_a.insert(w.width);
    else wa[ka[w.name]] = w.width;
  }
  for (const auto& w : b.wires) {
    if (kb[w.name].empty()) loose_b.insert(w.width);
    else wb[kb[w.name]] = w.width;
  }
  if (a.wires.size() != b.wires.size()) return n + ": wire count differs";
  if (loose_a != loose_b) return n + ": unconnected wires differ";
  for (const auto& [k, w] : wa) {
    auto it = wb.find(k);
    if (it == wb.end()) return n + ": no wire matching endpoints " + key_str(k);
    if (it->second != w) return n + ": width differs for wire on " + key_str(k);
  }
  if (a.submodules.size() != b.submodules.size()) return n + ": submodule count differs";
  for (const auto& ia : a.submodules) {
    const Instance* ib = b.find_instance(ia.instance_name);
    if (!ib) return n + ": missing instance " + ia.instance_name;
    const std::string ip = n + "/" + ia.instance_name;
    if (ia.module_name != ib->module_name) return ip + ": module differs";
    if (opt.annotations && ia.floorplan != ib->floorplan) return ip + ": floorplan differs";
    if (ia.connections.size() != ib->connections.size()) return ip + ": connection count differs";
    for (const auto& [port, va] : ia.connections) {
      auto it = ib->connections.find(port);
      if (it == ib->connections.end()) return ip + "." + port + ": missing connection";
      const std::string& vb = it->second;
      const bool wire_a = a.find_wire(va) != nullptr;
      const bool wire_b = b.find_wire(vb) != nullptr;
      if (wire_a != wire_b) return ip + "." + port + ": wire vs non-wire connection";
      if (wire_a) {
        if (ka[va] != kb[vb]) return ip + "." + port + ": wire endpoints differ";
      } else if (va != vb) {
        return ip + "." + port + ": connection differs (" + va + " vs " + vb + ")";
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> structural_diff(const DesignIR& a, const DesignIR& b, const EqualOptions& opt) {
  if (a.top != b.top) return "top differs (" + a.top + " vs " + b.top + ")";
  if (a.modules.size() != b.modules.size()) {
    return "module count differs (" + std::to_string(a.modules.size()) + " vs " +
           std::to_string(b.modules.size()) + ")";
  }
  for (const auto& [name, ma] : a.modules) {
    const Module* mb = b.find_module(name);
    if (!mb) return "missing module " + name;
    if (auto d = module_diff(ma, *mb, opt)) return d;
  }
  if (opt.annotations) {
    if (a.provenance != b.provenance) return "provenance differs";
    if (a.device != b.device) return "device differs";
  }
  return std::nullopt;
}

bool structural_equal(const DesignIR& a, const DesignIR& b, const EqualOptions& options) {
  return !structural_diff(a, b, options).has_value();
}

}  // namespace hlps
