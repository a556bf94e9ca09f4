// Copyright 2026 The mixsolve Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <climits>
#include <optional>
#include <string>
#include <vector>

#include "mixsolve/decomp.hpp"
#include "mixsolve/field.hpp"
#include "mixsolve/transport.hpp"

namespace mixsolve {

enum class Strategy { A2A, NB, ISR };
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

struct SwitchKnobs {
  int n_send_batch = 1;
  int n_send_pending = INT_MAX;
  long stall_bound = 1'000'000;
};

/// A block as seen by one rank, with its place in the staging buffer.
struct BlockSlot {
  int id = 0;  // index in the global block list, used in event records
  BlockTransfer block;
  int peer = 0;
  std::size_t offset = 0;  // doubles into the send or receive buffer
  std::size_t doubles = 0;
};

struct SwitchPlan {
  Topology src, dst;
  int rank = 0;
  int tag = 0;
  std::array<int, 3> common{};
  std::vector<int> send_order;     // peers, ascending from rank+1 and wrapping
  std::vector<BlockSlot> sends;    // remote blocks in send_order
  std::vector<BlockSlot> recvs;    // remote blocks, offsets into the receive buffer
  std::vector<BlockSlot> locals;   // src_rank == dst_rank == rank, staged in the receive buffer
  std::size_t send_doubles = 0;
  std::size_t recv_doubles = 0;
  SwitchKnobs knobs;
};

/// Plans the switch from `src` to `dst` for `rank`. `common` bounds the
/// transferred index box (defaults to the full, identical extents).
SwitchPlan plan_switch(const Topology& src, const Topology& dst, int rank,
                       const SwitchKnobs& knobs = {}, int tag = 0,
                       std::optional<std::array<int, 3>> common = std::nullopt);

/// Linearizes a block of `field` (laid out per `topo`) in source memory order.
void pack(const double* field, const Topology& topo, int rank, const BlockTransfer& b, double* out);
/// Reorders a packed segment from `from`-axis-fastest to `to`-axis-fastest order.
void shuffle(double* segment, const BlockTransfer& b, int from, int to, std::vector<double>& scratch);
/// Copies a segment in `topo`-axis-fastest order into the field region of the block.
void unpack(const double* segment, double* field, const Topology& topo, int rank,
            const BlockTransfer& b);
StridedBlock block_descriptor(const double* field, const Topology& topo, int rank,
                              const BlockTransfer& b);

void execute_switch_a2a(const SwitchPlan& plan, FieldBuffer& field, Transport& transport);
void execute_switch_nb(const SwitchPlan& plan, FieldBuffer& field, Transport& transport);
void execute_switch_isr(const SwitchPlan& plan, FieldBuffer& field, Transport& transport);
void execute_switch(Strategy s, const SwitchPlan& plan, FieldBuffer& field, Transport& transport);

}  // namespace mixsolve
