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

#include <vector>

#include "mixsolve/decomp.hpp"

namespace mixsolve {

/// Per-rank slice of a distributed field. `data` holds the local block of
/// `topo` with pencil lines `topo.line_stride(rank)` doubles apart.
struct FieldBuffer {
  Topology topo;
  int rank = 0;
  std::vector<double> data;

  FieldBuffer() = default;
  FieldBuffer(const Topology& t, int r, std::size_t capacity = 0);

  Box box() const { return topo.local_box(rank); }
  std::size_t line_stride() const { return topo.line_stride(rank); }
  // offset in doubles of local element (i0, i1, i2), indices local along x, y, z
  std::size_t offset(int i0, int i1, int i2) const;
  // doubles used by the current topology
  std::size_t used() const { return topo.local_doubles(rank); }
};

}  // namespace mixsolve
