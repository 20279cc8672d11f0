// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hlps/ir.hpp"
#include "hlps/passes.hpp"

namespace hlps::passes::detail {

class UnionFind {
 public:
  const std::string& find(const std::string& x) {
    auto it = parent_.find(x);
    if (it == parent_.end()) it = parent_.emplace(x, x).first;
    if (it->second == x) return it->first;
    const std::string& root = find(it->second);
    it->second = root;
    return root;
  }
  void unite(const std::string& a, const std::string& b) {
    std::string ra = find(a);
    std::string rb = find(b);
    if (ra != rb) parent_[ra] = rb;
  }

 private:
  std::map<std::string, std::string> parent_;
};

/// Ports, wires and instance names of a grouped module.
std::vector<std::string> local_names(const Module& m);
std::vector<std::string> module_names(const DesignIR& design);

/// Number of instantiations of `module` in grouped modules and Verilog leaves.
int usage_count(const DesignIR& design, const std::string& module);

/// Removes unreachable modules and stale provenance keys.
void tidy(DesignIR& design);

void set_role(Module& m, const std::string& role);

/// Gives `g` the specs of child interfaces wired straight to its ports.
bool infer_from_children(DesignIR& d, Module& g, PassReport& report);

}  // namespace hlps::passes::detail
