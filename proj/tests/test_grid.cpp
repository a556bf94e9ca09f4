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

#include <set>

#include "mixsolve/grid.hpp"

using namespace mixsolve;

namespace {
Domain cube(int n, double L, Layout l) {
  return Domain({n, n, n}, {L, L, L}, l, {bcs::PP, bcs::PP, bcs::PP});
}
}  // namespace

TEST(Coordinate, CellCenteredFirst) {
  EXPECT_DOUBLE_EQ(coordinate(cube(4, 1.0, Layout::CellCentered), 0, 0), 0.125);
}

TEST(Coordinate, NodeCenteredLast) {
  EXPECT_DOUBLE_EQ(coordinate(cube(4, 1.0, Layout::NodeCentered), 1, 4), 1.0);
}

TEST(Coordinate, CellCenteredLast) {
  const Domain d = cube(8, 2.0, Layout::CellCentered);
  EXPECT_DOUBLE_EQ(coordinate(d, 2, 7), (7 + 0.5) * (2.0 / 8));
}

TEST(Coordinate, OutOfRange) {
  const Domain d = cube(4, 1.0, Layout::CellCentered);
  EXPECT_THROW(coordinate(d, 0, 4), std::out_of_range);
  EXPECT_THROW(coordinate(d, 0, -1), std::out_of_range);
  EXPECT_THROW(coordinate(cube(4, 1.0, Layout::NodeCentered), 0, 5), std::out_of_range);
}

TEST(SampleCount, Layouts) {
  EXPECT_EQ(sample_count(cube(4, 1.0, Layout::CellCentered), 0), 4);
  EXPECT_EQ(sample_count(cube(4, 1.0, Layout::NodeCentered), 0), 5);
  EXPECT_EQ(sample_count(cube(96, 1.0, Layout::NodeCentered), 2), 97);
}

TEST(Domain, SpacingTimesCells) {
  for (int n : {4, 5, 7, 33, 96, 129})
    for (double L : {1.0, 2.0, 0.3, 6.283185307179586}) {
      const Domain d = cube(n, L, Layout::NodeCentered);
      EXPECT_NEAR(d.h(0) * n, L, 2 * std::numeric_limits<double>::epsilon() * L);
    }
}

TEST(Domain, Anisotropic) {
  const Domain d({4, 8, 16}, {1.0, 4.0, 2.0}, Layout::CellCentered, {bcs::EE, bcs::OO, bcs::PP});
  EXPECT_DOUBLE_EQ(d.h(0), 0.25);
  EXPECT_DOUBLE_EQ(d.h(1), 0.5);
  EXPECT_DOUBLE_EQ(d.h(2), 0.125);
  EXPECT_EQ(sample_counts(d), (std::array<int, 3>{4, 8, 16}));
}

TEST(Domain, RejectsBadExtents) {
  EXPECT_THROW(Domain({0, 4, 4}, {1, 1, 1}, Layout::CellCentered, {bcs::PP, bcs::PP, bcs::PP}),
               std::invalid_argument);
  EXPECT_THROW(Domain({4, 4, 4}, {1, -1, 1}, Layout::CellCentered, {bcs::PP, bcs::PP, bcs::PP}),
               std::invalid_argument);
}

TEST(Coordinate, BoundsProperty) {
  for (Layout l : {Layout::CellCentered, Layout::NodeCentered})
    for (int n = 1; n <= 40; ++n) {
      const Domain d = cube(n, 1.7, l);
      const int last = sample_count(d, 0) - 1;
      EXPECT_GE(coordinate(d, 0, 0), 0.0);
      EXPECT_LE(coordinate(d, 0, last), 1.7);
      if (l == Layout::NodeCentered) EXPECT_EQ(coordinate(d, 0, last), 1.7);
    }
}

TEST(BCPair, TenLegalPairs) {
  std::set<std::string> names;
  for (const BCPair& p : all_bc_pairs()) names.insert(p.name());
  EXPECT_EQ(names.size(), 10u);
  int legal = 0;
  for (BC a : {BC::Even, BC::Odd, BC::Periodic, BC::Unbounded})
    for (BC b : {BC::Even, BC::Odd, BC::Periodic, BC::Unbounded}) {
      try {
        BCPair p(a, b);
        ++legal;
        EXPECT_TRUE(names.count(p.name()));
      } catch (const std::invalid_argument&) {
      }
    }
  EXPECT_EQ(legal, 10);
}

TEST(BCPair, PeriodicOnlyWithPeriodic) {
  EXPECT_THROW(BCPair(BC::Periodic, BC::Even), std::invalid_argument);
  EXPECT_THROW(BCPair(BC::Unbounded, BC::Periodic), std::invalid_argument);
  EXPECT_NO_THROW(BCPair(BC::Periodic, BC::Periodic));
}

TEST(BCPair, Predicates) {
  EXPECT_TRUE(bcs::UU.is_unbounded());
  EXPECT_TRUE(bcs::EU.is_semi_unbounded());
  EXPECT_TRUE(bcs::UO.has_unbounded());
  EXPECT_FALSE(bcs::UU.is_semi_unbounded());
  EXPECT_TRUE(bcs::EO.is_symmetric());
  EXPECT_FALSE(bcs::PP.is_symmetric());
  EXPECT_TRUE(bcs::PP.is_spectral());
  EXPECT_FALSE(bcs::OU.is_spectral());
}

TEST(BCPair, ParseRoundTrip) {
  for (const BCPair& p : all_bc_pairs()) EXPECT_EQ(BCPair::parse(p.name()), p);
  EXPECT_EQ(BCPair::parse("eu"), bcs::EU);
  EXPECT_THROW(BCPair::parse("XQ"), std::invalid_argument);
  EXPECT_THROW(BCPair::parse("PE"), std::invalid_argument);
}

TEST(Layout, Names) {
  EXPECT_EQ(parse_layout("node"), Layout::NodeCentered);
  EXPECT_EQ(parse_layout("cell"), Layout::CellCentered);
  EXPECT_EQ(to_string(Layout::CellCentered), "cell");
  EXPECT_THROW(parse_layout("edge"), std::invalid_argument);
}
