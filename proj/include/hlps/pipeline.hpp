// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hlps/device.hpp"
#include "hlps/floorplan.hpp"
#include "hlps/ir.hpp"
#include "hlps/passes.hpp"

/// Pipelining of slot-crossing links: flip-flop chains on feedforward
/// interfaces and almost-full FIFO relays on handshake interfaces.
namespace hlps::pipeline {

enum class Scheme { feedforward_ff, handshake_afifo, false_path };

std::string_view to_string(Scheme s);

/// One producer interface feeding one consumer instance across slots.
struct Link {
  std::string producer;       // instance
  int interface = 0;          // index into the producer module's interfaces
  std::string consumer;       // instance
  Scheme scheme = Scheme::feedforward_ff;
  std::string from_slot;
  std::string to_slot;
  int stages = 0;
  int fifo_depth = 0;        // handshake only
  int afull_threshold = 0;   // handshake only
  /// producer data ports, in interface order, with their widths
  std::vector<std::pair<std::string, int>> data;
  std::string valid;  // producer ports (handshake)
  std::string ready;
};

struct Plan {
  std::string module;  // the flat grouped module
  std::vector<Link> links;
};

struct PlanOptions {
  int min_fifo_depth = 0;
  /// stage count per slot pair ("SLOT_X0Y0|SLOT_X1Y0", either order)
  std::map<std::string, int> stage_override;
};

/// Plans every slot-crossing link of `module` (the top if empty) under the
/// instances' floorplan metadata. Stages default to the Manhattan distance
/// of the two slots; fifo depth is max(2·stages + 2, minimum) and the
/// almost-full threshold depth − 2·stages.
Plan plan(const DesignIR& design, const VirtualDevice& device, const std::string& module = {},
          const PlanOptions& options = {});

/// Inserts one helper per planned link: the producer is wrapped together
/// with the helper on the link's interface and the wrapper is inlined, so
/// the helper becomes a sibling `<producer>__<data>_relay` (or `_ff`).
passes::PassResult insert(const DesignIR& design, const Plan& plan);

/// Verilog of `hlps_afifo_relay` / `hlps_ff_chain` helper modules. Each data
/// port keeps its own width. `reset_active` is "high", "low", or empty for no
/// reset port.
Module afifo_relay_module(const std::vector<int>& widths, int stages, int depth,
                          const std::string& reset_active);
Module ff_chain_module(const std::vector<int>& widths, int stages, const std::string& reset_active);

struct StallPattern {
  std::vector<bool> producer;  // producer offers a token in cycle t
  std::vector<bool> consumer;  // consumer accepts in cycle t
  bool producer_tail = true;   // value after the trace ends
  bool consumer_tail = true;
};

struct RelayVerdict {
  bool sequence_equal = false;  // consumed tokens equal the direct-connection sequence
  long sent = 0;
  long consumed = 0;
  long overflows = 0;
  bool deadlock = false;
  long cycles = 0;
  int max_occupancy = 0;
  int final_occupancy = 0;
  int in_flight = 0;  // tokens in forward registers at the end
};

/// Cycle-accurate token model of producer → `stages` forward registers →
/// FIFO of `depth` words with AFull at occupancy ≥ depth − 2·stages →
/// consumer, with AFull returned through `stages` registers as the
/// producer's ready. Runs until `tokens` are consumed, progress stops for
/// depth + 2·stages + 2 cycles while both sides are willing (deadlock), or
/// `max_cycles` elapse.
RelayVerdict simulate_relay(int stages, int depth, const StallPattern& pattern, int tokens = 100,
                            long max_cycles = 100000);

nlohmann::json to_json(const Plan& plan);

}  // namespace hlps::pipeline
