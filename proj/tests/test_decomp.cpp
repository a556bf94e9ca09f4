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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mixsolve/decomp.hpp"

using namespace mixsolve;

TEST(Distribution, RemainderSevenRanks) {
  const std::vector<int> starts{0, 5, 10, 15, 20, 24, 28};
  const std::vector<int> counts{5, 5, 5, 5, 4, 4, 4};
  Distribution1D d(32, 7);
  for (int r = 0; r < 7; ++r) {
    EXPECT_EQ(balanced_start_index(r, 32, 7), starts[r]);
    EXPECT_EQ(d.count(r), counts[r]);
  }
  EXPECT_EQ(d.start(7), 32);
}

TEST(Distribution, RankOfIndexExamples) {
  EXPECT_EQ(rank_of_index(14, 32, 7), 2);
  EXPECT_EQ(rank_of_index(27, 32, 7), 5);
  for (int n : {1, 7, 32, 100})
    for (int p = 1; p <= n; p += 3) EXPECT_EQ(rank_of_index(0, n, p), 0);
}

TEST(Distribution, UniformCase) { EXPECT_EQ(balanced_start_index(3, 32, 8), 12); }

TEST(Distribution, SixRanks) {
  const std::vector<int> starts{0, 5, 10, 16, 21, 26};
  for (int r = 0; r < 6; ++r) EXPECT_EQ(balanced_start_index(r, 32, 6), starts[r]);
}

TEST(Distribution, Errors) {
  EXPECT_THROW(Distribution1D(4, 5), OverDecompositionError);
  EXPECT_THROW(balanced_start_index(0, 3, 4), OverDecompositionError);
  EXPECT_THROW(rank_of_index(32, 32, 7), std::out_of_range);
  EXPECT_THROW(rank_of_index(-1, 32, 7), std::out_of_range);
}

TEST(Distribution, ExhaustiveInverseAndBalance) {
  for (int n = 1; n <= 128; ++n)
    for (int p = 1; p <= n; ++p) {
      Distribution1D d(n, p);
      int lo = n, hi = 0, total = 0;
      for (int r = 0; r < p; ++r) {
        const int s = balanced_start_index(r, n, p);
        const int c = d.count(r);
        ASSERT_GE(c, 0);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        total += c;
        for (int j = 0; j < c; ++j) ASSERT_EQ(rank_of_index(s + j, n, p), r) << n << " " << p;
      }
      ASSERT_EQ(total, n);
      ASSERT_LE(hi - lo, 1) << n << " " << p;
      ASSERT_EQ(d.start(0), 0);
    }
}

TEST(Topology, FourRanksSquareGrid) {
  const Topology t = build_pencil_topology({64, 64, 64}, 4, 0);
  EXPECT_EQ(t.nproc, (std::array<int, 3>{1, 2, 2}));
  for (int r = 0; r < 4; ++r)
    EXPECT_EQ(t.local_box(r).count, (std::array<int, 3>{64, 32, 32}));
}

TEST(Topology, SevenRanksAlongOneAxis) {
  const Topology t = build_pencil_topology({33, 33, 33}, 7, 1);
  EXPECT_EQ(t.nproc[1], 1);
  EXPECT_EQ(t.nproc[0] * t.nproc[2], 7);
  const int split = t.nproc[0] == 7 ? 0 : 2;
  const std::vector<int> counts{5, 5, 5, 5, 5, 4, 4};
  std::vector<int> got;
  for (int r = 0; r < 7; ++r) {
    const Box b = t.local_box(r);
    EXPECT_EQ(b.count[1], 33);
    got.push_back(b.count[split]);
  }
  std::sort(got.begin(), got.end(), std::greater<>());
  EXPECT_EQ(got, counts);
}

TEST(Topology, SingleRankOwnsAll) {
  const Topology t = build_pencil_topology({96, 96, 96}, 1, 2);
  EXPECT_EQ(t.local_box(0).count, (std::array<int, 3>{96, 96, 96}));
}

TEST(Topology, PencilAxisLocal) {
  for (int axis = 0; axis < 3; ++axis)
    for (int p : {1, 2, 3, 4, 6, 8, 12}) {
      const Topology t = build_pencil_topology({13, 17, 11}, p, axis);
      EXPECT_EQ(t.nranks(), p);
      EXPECT_EQ(t.nproc[axis], 1);
      std::size_t vol = 0;
      for (int r = 0; r < p; ++r) {
        const Box b = t.local_box(r);
        EXPECT_EQ(b.count[axis], t.n[axis]);
        vol += b.volume();
      }
      EXPECT_EQ(vol, 13u * 17u * 11u);
    }
}

TEST(Topology, Deterministic) {
  const Topology a = build_pencil_topology({40, 30, 20}, 6, 0);
  const Topology b = build_pencil_topology({40, 30, 20}, 6, 0);
  EXPECT_TRUE(same_layout(a, b));
}

TEST(Topology, OverDecomposition) {
  EXPECT_THROW(build_pencil_topology({4, 2, 2}, 5, 0), OverDecompositionError);
  EXPECT_THROW(build_pencil_topology({8, 8, 8}, 100, 0), OverDecompositionError);
}

TEST(Intersect, IdentityBlocks) {
  const Topology t = build_pencil_topology({12, 10, 9}, 6, 1);
  const auto blocks = intersect_blocks(t, t);
  ASSERT_EQ(blocks.size(), 6u);
  for (const BlockTransfer& b : blocks) {
    EXPECT_EQ(b.src_rank, b.dst_rank);
    const Box box = t.local_box(b.src_rank);
    EXPECT_EQ(b.origin, box.start);
    EXPECT_EQ(b.shape, box.count);
  }
}

TEST(Intersect, TwoRanksCrossSplit) {
  // x pencils split along y, y pencils split along x
  Topology src;
  src.axis = 0;
  src.n = {8, 8, 8};
  src.nproc = {1, 2, 1};
  Topology dst = src;
  dst.axis = 1;
  dst.nproc = {2, 1, 1};
  const auto blocks = intersect_blocks(src, dst);
  ASSERT_EQ(blocks.size(), 4u);
  for (const BlockTransfer& b : blocks) {
    EXPECT_EQ(b.shape, (std::array<int, 3>{4, 4, 8}));
    EXPECT_EQ(b.doubles(), 128u);
  }
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    const auto& a = blocks[i - 1];
    const auto& b = blocks[i];
    EXPECT_TRUE(a.dst_rank < b.dst_rank || (a.dst_rank == b.dst_rank && a.src_rank < b.src_rank));
  }
}

TEST(Intersect, BuiltTopologiesTwoRanks) {
  const Topology src = build_pencil_topology({8, 8, 8}, 2, 0);
  const Topology dst = build_pencil_topology({8, 8, 8}, 2, 1);
  std::size_t vol = 0;
  for (const BlockTransfer& b : intersect_blocks(src, dst)) vol += b.doubles();
  EXPECT_EQ(vol, 512u);
}

TEST(Intersect, PartitionExhaustive) {
  const std::array<int, 3> n{7, 6, 5};
  for (int p : {1, 2, 3, 4, 5, 6})
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const Topology src = build_pencil_topology(n, p, a, 2);
        const Topology dst = build_pencil_topology(n, p, b, 2);
        std::vector<int> hits(7 * 6 * 5, 0);
        for (const BlockTransfer& t : intersect_blocks(src, dst)) {
          const Box sb = src.local_box(t.src_rank), db = dst.local_box(t.dst_rank);
          for (int d = 0; d < 3; ++d) {
            EXPECT_GE(t.origin[d], sb.start[d]);
            EXPECT_LE(t.origin[d] + t.shape[d], sb.start[d] + sb.count[d]);
            EXPECT_GE(t.origin[d], db.start[d]);
            EXPECT_LE(t.origin[d] + t.shape[d], db.start[d] + db.count[d]);
          }
          EXPECT_EQ(t.nf, 2);
          for (int k = 0; k < t.shape[2]; ++k)
            for (int j = 0; j < t.shape[1]; ++j)
              for (int i = 0; i < t.shape[0]; ++i)
                ++hits[(t.origin[0] + i) + 7 * ((t.origin[1] + j) + 6 * (t.origin[2] + k))];
        }
        for (int h : hits) ASSERT_EQ(h, 1) << p << " " << a << " " << b;
      }
}

TEST(Intersect, RandomVolumes) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> ext(8, 30);
  for (int p : {2, 3, 5, 7})
    for (int trial = 0; trial < 5; ++trial) {
      const std::array<int, 3> n{ext(rng), ext(rng), ext(rng)};
      const Topology src = build_pencil_topology(n, p, trial % 3);
      const Topology dst = build_pencil_topology(n, p, (trial + 1) % 3);
      std::size_t send = 0;
      std::vector<std::size_t> per_src(p, 0), per_dst(p, 0);
      for (const BlockTransfer& b : intersect_blocks(src, dst)) {
        send += b.doubles();
        per_src[b.src_rank] += b.doubles();
        per_dst[b.dst_rank] += b.doubles();
      }
      EXPECT_EQ(send, std::size_t(n[0]) * n[1] * n[2]);
      for (int r = 0; r < p; ++r) {
        EXPECT_EQ(per_src[r], src.local_box(r).volume());
        EXPECT_EQ(per_dst[r], dst.local_box(r).volume());
      }
    }
}

TEST(Intersect, CommonBoxClips) {
  const Topology src = build_pencil_topology({8, 8, 8}, 2, 0);
  const Topology dst = build_pencil_topology({16, 8, 8}, 2, 1);
  EXPECT_THROW(intersect_blocks(src, dst), std::invalid_argument);
  std::size_t vol = 0;
  for (const BlockTransfer& b : intersect_blocks(src, dst, {8, 8, 8})) vol += b.doubles();
  EXPECT_EQ(vol, 512u);
}

TEST(Intersect, MismatchedRanks) {
  const Topology src = build_pencil_topology({8, 8, 8}, 2, 0);
  const Topology dst = build_pencil_topology({8, 8, 8}, 4, 1);
  EXPECT_THROW(intersect_blocks(src, dst), std::invalid_argument);
}
