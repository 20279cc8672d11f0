// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>
#include <vector>

#include "hlps/ir.hpp"

namespace hlps::testing {

/// Passes covered by the property check, in flow order.
inline const std::vector<std::string> kPasses = {"rebuild", "infer_interfaces", "partition", "passthrough",
                                                 "flatten", "wrap", "group"};

struct PassCheck {
  bool applicable = false;  // the random design offered a target
  bool canonical = false;   // no DRC errors after the pass
  bool connected = false;   // flattened connectivity preserved
  std::string detail;
  bool ok() const { return applicable && canonical && connected; }
};

/// Generates a design from `seed`, runs `pass` on a randomly chosen target
/// and checks canonicity and connectivity preservation against the oracle.
PassCheck check_pass(const std::string& pass, unsigned seed);

}  // namespace hlps::testing
