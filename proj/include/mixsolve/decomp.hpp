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
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mixsolve {

struct OverDecompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Balanced split of N indices over P ranks where the +1 remainders are spread
/// across groups of ranks instead of landing on the first ranks.
struct Distribution1D {
  int n = 0;
  int p = 1;
  int base = 0;    // N div P
  int rem = 0;     // N mod P
  int stride = 0;  // P div R, 0 when R == 0

  Distribution1D() = default;
  Distribution1D(int n, int p);

  int start(int r) const;
  int count(int r) const { return start(r + 1) - start(r); }
  int rank_of(int i) const;
};

int balanced_start_index(int r, int n, int p);
int rank_of_index(int i, int n, int p);

struct Box {
  std::array<int, 3> start{};
  std::array<int, 3> count{};
  std::size_t volume() const {
    return std::size_t(count[0]) * std::size_t(count[1]) * std::size_t(count[2]);
  }
  bool empty() const { return count[0] <= 0 || count[1] <= 0 || count[2] <= 0; }
};

Box intersect(const Box& a, const Box& b);

/// Pencil decomposition: `axis` is fully local, the two other axes are split
/// over a rank grid. Local memory order is axis fastest, then (axis+1)%3, then
/// (axis+2)%3, with `nf` interleaved doubles per element.
struct Topology {
  int axis = 0;
  std::array<int, 3> n{};      // global extents in elements
  int nf = 1;                  // 1 real, 2 complex
  std::array<int, 3> nproc{1, 1, 1};
  int line_pad = 0;            // minimum doubles per pencil line, 0 means tight

  int nranks() const { return nproc[0] * nproc[1] * nproc[2]; }
  std::array<int, 3> rank_coords(int rank) const;
  Distribution1D dist(int dir) const { return Distribution1D(n[dir], nproc[dir]); }
  Box local_box(int rank) const;
  // doubles between consecutive pencil lines on this rank
  std::size_t line_stride(int rank) const;
  std::size_t local_doubles(int rank) const;
  bool is_complex() const { return nf == 2; }
};

bool same_layout(const Topology& a, const Topology& b);

Topology build_pencil_topology(std::array<int, 3> n, int nranks, int axis, int nf = 1);

struct BlockTransfer {
  int src_rank = 0;
  int dst_rank = 0;
  std::array<int, 3> origin{};  // global index of the first element
  std::array<int, 3> shape{};
  int nf = 1;
  std::size_t doubles() const {
    return std::size_t(shape[0]) * std::size_t(shape[1]) * std::size_t(shape[2]) * nf;
  }
};

/// Blocks moving data from `src` to `dst`. Both topologies must share global extents.
std::vector<BlockTransfer> intersect_blocks(const Topology& src, const Topology& dst);

/// Same, restricted to the index box [0, common). Used when a switch grows or
/// shrinks a direction for domain doubling.
std::vector<BlockTransfer> intersect_blocks(const Topology& src, const Topology& dst,
                                            std::array<int, 3> common);

}  // namespace mixsolve
