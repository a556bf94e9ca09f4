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

#include "mixsolve/grid.hpp"

namespace mixsolve {

BCPair::BCPair(BC left, BC right) : left_(left), right_(right) {
  if ((left == BC::Periodic) != (right == BC::Periodic))
    throw std::invalid_argument("periodic boundary must be paired with periodic");
}

static char bc_letter(BC b) {
  switch (b) {
    case BC::Even: return 'E';
    case BC::Odd: return 'O';
    case BC::Periodic: return 'P';
    case BC::Unbounded: return 'U';
  }
  return '?';
}

static BC bc_from_letter(char c) {
  switch (c) {
    case 'E': case 'e': return BC::Even;
    case 'O': case 'o': return BC::Odd;
    case 'P': case 'p': return BC::Periodic;
    case 'U': case 'u': return BC::Unbounded;
  }
  throw std::invalid_argument(std::string("unknown boundary condition '") + c + "'");
}

std::string BCPair::name() const { return {bc_letter(left_), bc_letter(right_)}; }

BCPair BCPair::parse(const std::string& s) {
  if (s.size() != 2) throw std::invalid_argument("boundary pair must have two letters: " + s);
  return BCPair(bc_from_letter(s[0]), bc_from_letter(s[1]));
}

std::array<BCPair, 10> all_bc_pairs() {
  using namespace bcs;
  return {EE, EO, OE, OO, PP, UU, EU, UE, OU, UO};
}

Domain::Domain(std::array<int, 3> c, std::array<double, 3> l, Layout lay, std::array<BCPair, 3> b)
    : cells(c), length(l), layout(lay), bcs(b) {
  for (int d = 0; d < 3; ++d) {
    if (cells[d] < 1) throw std::invalid_argument("cell count must be positive");
    if (!(length[d] > 0)) throw std::invalid_argument("domain length must be positive");
  }
}

int sample_count(const Domain& d, int dir) {
  if (dir < 0 || dir > 2) throw std::out_of_range("axis out of range");
  return d.layout == Layout::NodeCentered ? d.cells[dir] + 1 : d.cells[dir];
}

std::array<int, 3> sample_counts(const Domain& d) {
  return {sample_count(d, 0), sample_count(d, 1), sample_count(d, 2)};
}

double coordinate(const Domain& d, int dir, int j) {
  if (j < 0 || j >= sample_count(d, dir)) throw std::out_of_range("sample index out of range");
  const double h = d.h(dir);
  if (d.layout == Layout::NodeCentered) return j == d.cells[dir] ? d.length[dir] : j * h;
  return (j + 0.5) * h;
}

std::string to_string(Layout l) { return l == Layout::NodeCentered ? "node" : "cell"; }

Layout parse_layout(const std::string& s) {
  if (s == "node") return Layout::NodeCentered;
  if (s == "cell") return Layout::CellCentered;
  throw std::invalid_argument("unknown layout: " + s);
}

}  // namespace mixsolve
