// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "hlps/device.hpp"
#include "hlps/drc.hpp"
#include "hlps/ir.hpp"

namespace hlps::exporter {

struct FileSet {
  std::map<std::string, std::string> files;  // file name -> contents
  std::vector<std::string> order;            // dependencies first
};

/// Modules in emission order: every module after the modules it
/// instantiates, ties broken by name.
std::vector<std::string> emission_order(const DesignIR& design);

/// Verilog for every module reachable from the top. Leaves imported from a
/// file (`metadata.extra.source_file`, `source_unit`, `source_units`) whose
/// modules all survive as leaves reproduce that file byte for byte; other
/// leaves keep their own source text in `<module>.v`. Grouped modules are
/// rendered as structural Verilog in `<module>.v`. Opaque leaves are copied
/// to `<module>.opaque`.
FileSet export_verilog(const DesignIR& design);

/// Pblock constraints, one stanza per used slot, in slot-name order:
///
///   # slot SLOT_X1Y1
///   create_pblock SLOT_X1Y1
///   resize_pblock [get_pblocks SLOT_X1Y1] -add {CLOCKREGION_X4Y2:CLOCKREGION_X7Y3}
///   add_cells_to_pblock [get_pblocks SLOT_X1Y1] [get_cells {FIFO_inst Buffer_inst}]
///
/// Cells are hierarchical instance paths below the top, separated by `/`,
/// sorted. An instance whose nearest floorplanned ancestor names the same
/// slot is not repeated. With no floorplan metadata the text is empty and a
/// warning is appended to `diags`.
std::string export_constraints(const DesignIR& design, const VirtualDevice& device,
                               std::vector<Diagnostic>* diags = nullptr);

/// GraphViz digraph of the top module: instances as nodes, one edge per
/// driver/sink instance pair and interface type, slots as clusters.
std::string export_dot(const DesignIR& design);

/// Writes `files` under `dir` plus `filelist.f` (one file per line, in
/// emission order).
void write_files(const FileSet& files, const std::string& dir);

}  // namespace hlps::exporter
