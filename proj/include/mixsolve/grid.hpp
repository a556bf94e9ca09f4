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
#include <stdexcept>
#include <string>

namespace mixsolve {

enum class Layout { CellCentered, NodeCentered };

enum class BC { Even, Odd, Periodic, Unbounded };

/// Boundary conditions on the left (x=0) and right (x=L) faces of one direction.
class BCPair {
 public:
  BCPair() = default;
  BCPair(BC left, BC right);

  BC left() const { return left_; }
  BC right() const { return right_; }

  bool is_periodic() const { return left_ == BC::Periodic; }
  bool is_unbounded() const { return left_ == BC::Unbounded && right_ == BC::Unbounded; }
  bool is_semi_unbounded() const { return (left_ == BC::Unbounded) != (right_ == BC::Unbounded); }
  bool has_unbounded() const { return left_ == BC::Unbounded || right_ == BC::Unbounded; }
  bool is_symmetric() const { return !is_periodic() && !has_unbounded(); }
  // Fourier spectral direction, as opposed to one that needs a kernel in physical space.
  bool is_spectral() const { return !has_unbounded(); }

  std::string name() const;
  static BCPair parse(const std::string& s);

  friend bool operator==(const BCPair&, const BCPair&) = default;

 private:
  BC left_ = BC::Periodic;
  BC right_ = BC::Periodic;
};

namespace bcs {
inline const BCPair EE{BC::Even, BC::Even};
inline const BCPair EO{BC::Even, BC::Odd};
inline const BCPair OE{BC::Odd, BC::Even};
inline const BCPair OO{BC::Odd, BC::Odd};
inline const BCPair PP{BC::Periodic, BC::Periodic};
inline const BCPair UU{BC::Unbounded, BC::Unbounded};
inline const BCPair EU{BC::Even, BC::Unbounded};
inline const BCPair UE{BC::Unbounded, BC::Even};
inline const BCPair OU{BC::Odd, BC::Unbounded};
inline const BCPair UO{BC::Unbounded, BC::Odd};
}  // namespace bcs

/// All ten legal pairs, in a fixed order.
std::array<BCPair, 10> all_bc_pairs();

struct Domain {
  std::array<int, 3> cells{};
  std::array<double, 3> length{};
  Layout layout = Layout::NodeCentered;
  std::array<BCPair, 3> bcs{};

  Domain() = default;
  Domain(std::array<int, 3> cells, std::array<double, 3> length, Layout layout,
         std::array<BCPair, 3> bcs);

  double h(int dir) const { return length.at(dir) / cells.at(dir); }
};

int sample_count(const Domain& d, int dir);
std::array<int, 3> sample_counts(const Domain& d);
double coordinate(const Domain& d, int dir, int j);

std::string to_string(Layout l);
Layout parse_layout(const std::string& s);

}  // namespace mixsolve
