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

#include "mixsolve/decomp.hpp"

#include <algorithm>
#include <string>

namespace mixsolve {

Distribution1D::Distribution1D(int n_, int p_) : n(n_), p(p_) {
  if (p < 1) throw std::invalid_argument("rank count must be positive");
  if (n < 0) throw std::invalid_argument("index count must be non-negative");
  if (p > n)
    throw OverDecompositionError("cannot split " + std::to_string(n) + " indices over " +
                                 std::to_string(p) + " ranks");
  base = n / p;
  rem = n % p;
  stride = rem > 0 ? p / rem : 0;
}

int Distribution1D::start(int r) const {
  if (r < 0 || r > p) throw std::out_of_range("rank out of range");
  if (r == p) return n;
  if (rem == 0) return r * base;
  return r * base + std::min(r / stride, rem);
}

int Distribution1D::rank_of(int i) const {
  if (i < 0 || i >= n) throw std::out_of_range("index out of range");
  if (rem == 0) return i / base;
  // groups of `stride` ranks, each group holding stride*base + 1 indices except the last
  const int group_size = stride * base + 1;
  const int g = std::min(i / group_size, rem);
  const int il = i - g * group_size;
  int rl = il / base;
  if (g < rem) rl = std::min(rl, stride - 1);
  return g * stride + rl;
}

int balanced_start_index(int r, int n, int p) { return Distribution1D(n, p).start(r); }
int rank_of_index(int i, int n, int p) { return Distribution1D(n, p).rank_of(i); }

Box intersect(const Box& a, const Box& b) {
  Box out;
  for (int d = 0; d < 3; ++d) {
    out.start[d] = std::max(a.start[d], b.start[d]);
    const int end = std::min(a.start[d] + a.count[d], b.start[d] + b.count[d]);
    out.count[d] = std::max(0, end - out.start[d]);
  }
  return out;
}

std::array<int, 3> Topology::rank_coords(int rank) const {
  if (rank < 0 || rank >= nranks()) throw std::out_of_range("rank out of range");
  const int b = (axis + 1) % 3, c = (axis + 2) % 3;
  std::array<int, 3> rc{0, 0, 0};
  rc[b] = rank % nproc[b];
  rc[c] = rank / nproc[b];
  return rc;
}

Box Topology::local_box(int rank) const {
  const auto rc = rank_coords(rank);
  Box box;
  for (int d = 0; d < 3; ++d) {
    const Distribution1D dd = dist(d);
    box.start[d] = dd.start(rc[d]);
    box.count[d] = dd.count(rc[d]);
  }
  return box;
}

std::size_t Topology::line_stride(int rank) const {
  const Box box = local_box(rank);
  return std::max<std::size_t>(std::size_t(box.count[axis]) * nf, std::size_t(line_pad));
}

std::size_t Topology::local_doubles(int rank) const {
  const Box box = local_box(rank);
  const int b = (axis + 1) % 3, c = (axis + 2) % 3;
  return line_stride(rank) * std::size_t(box.count[b]) * std::size_t(box.count[c]);
}

bool same_layout(const Topology& a, const Topology& b) {
  return a.axis == b.axis && a.n == b.n && a.nf == b.nf && a.nproc == b.nproc &&
         a.line_pad == b.line_pad;
}

Topology build_pencil_topology(std::array<int, 3> n, int nranks, int axis, int nf) {
  if (nranks < 1) throw std::invalid_argument("rank count must be positive");
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis out of range");
  if (nf != 1 && nf != 2) throw std::invalid_argument("nf must be 1 or 2");
  const int b = (axis + 1) % 3, c = (axis + 2) % 3;

  // factor pairs (pb, pc), most square first, more ranks on the slower axis c on ties
  std::vector<std::array<int, 2>> pairs;
  for (int f = 1; f <= nranks; ++f)
    if (nranks % f == 0) pairs.push_back({f, nranks / f});
  std::stable_sort(pairs.begin(), pairs.end(), [](auto x, auto y) {
    const int dx = std::abs(x[0] - x[1]), dy = std::abs(y[0] - y[1]);
    if (dx != dy) return dx < dy;
    return x[1] > y[1];
  });
  for (const auto& pr : pairs) {
    if (pr[0] > n[b] || pr[1] > n[c]) continue;
    Topology t;
    t.axis = axis;
    t.n = n;
    t.nf = nf;
    t.nproc = {1, 1, 1};
    t.nproc[b] = pr[0];
    t.nproc[c] = pr[1];
    return t;
  }
  throw OverDecompositionError("no rank grid of " + std::to_string(nranks) + " ranks fits extents " +
                               std::to_string(n[b]) + "x" + std::to_string(n[c]));
}

std::vector<BlockTransfer> intersect_blocks(const Topology& src, const Topology& dst) {
  if (src.n != dst.n) throw std::invalid_argument("intersect_blocks: mismatched global extents");
  return intersect_blocks(src, dst, src.n);
}

std::vector<BlockTransfer> intersect_blocks(const Topology& src, const Topology& dst,
                                            std::array<int, 3> common) {
  if (src.nf != dst.nf) throw std::invalid_argument("intersect_blocks: mismatched payload kind");
  if (src.nranks() != dst.nranks()) throw std::invalid_argument("intersect_blocks: rank count differs");
  for (int d = 0; d < 3; ++d)
    if (common[d] > src.n[d] || common[d] > dst.n[d])
      throw std::invalid_argument("intersect_blocks: common box exceeds a topology");
  const Box limit{{0, 0, 0}, common};
  const int p = src.nranks();
  std::vector<Box> sboxes(p);
  for (int r = 0; r < p; ++r) sboxes[r] = intersect(src.local_box(r), limit);

  std::vector<BlockTransfer> out;
  for (int rd = 0; rd < p; ++rd) {
    const Box dbox = intersect(dst.local_box(rd), limit);
    for (int rs = 0; rs < p; ++rs) {
      const Box ib = intersect(sboxes[rs], dbox);
      if (ib.empty()) continue;
      out.push_back({rs, rd, ib.start, ib.count, src.nf});
    }
  }
  return out;
}

}  // namespace mixsolve
