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
#include <string>
#include <vector>

#include "mixsolve/decomp.hpp"
#include "mixsolve/fft1d.hpp"
#include "mixsolve/field.hpp"
#include "mixsolve/grid.hpp"

namespace mixsolve {

struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KernelId {
  enum class Kind { CHAT2, HEJ0, HEJ2, HEJ4, HEJ6, HEJ8, HEJ10 };
  Kind kind = Kind::CHAT2;
  double sigma_ratio = 2.0;  // sigma / h

  // order of the regularization, 0 for HEJ0 and 2 for CHAT2
  int order() const;
  bool is_hej() const { return kind != Kind::CHAT2; }
  std::string name() const;
  static KernelId parse(const std::string& s, double sigma_ratio = 2.0);

  friend bool operator==(const KernelId&, const KernelId&) = default;
};

enum class ZeroModePolicy { SetZero, Keep };

struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Doubling geometry of a direction that has an unbounded side.
struct ExtensionSpec {
  int dir = 0;
  int n_user = 0;     // samples provided by the user
  int n_ext = 0;      // samples on the extended line
  int pad_start = 0;  // first zero-padded index
  int pad_count = 0;
  int green_mirror = 0;  // G_ext[period - j] == G_ext[j], kernel sampled on 0..green_mirror
  int period = 0;        // DFT-equivalent length of the extended problem
  bool reversed = false; // unbounded side on the left
};

ExtensionSpec extension_geometry(const Domain& domain, int dir);

/// The kernel sampled on the full periodic extension, length ext.period.
std::vector<double> extended_kernel_line(const KernelId& kernel, const ExtensionSpec& ext, double h,
                                         double sigma);

/// zeta_m(s) = exp(-s) sum_{j < m/2} s^j / j!
double hej_zeta(int m, double s);

double spectral_green_value(const KernelId& kernel, std::array<double, 3> omega,
                            std::array<double, 3> h,
                            ZeroModePolicy policy = ZeroModePolicy::SetZero);

/// Free-space 3D kernel at distance r. `h` is the largest grid spacing; it sets
/// the HEJ0 cutoff and the CHAT2 value at r = 0 (cube of side h).
double unbounded_kernel_value(const KernelId& kernel, double r, double sigma, double h);

/// CHAT2 value at r = 0 for an anisotropic cell.
double chat2_origin_value(std::array<double, 3> h);

/// Kernels for one unbounded direction and a transverse spectral wavenumber kappa.
double screened_kernel_1d(const KernelId& kernel, double kappa, double x, double sigma);
/// Two unbounded directions: distance r in the unbounded plane, `hcell` the cell
/// sides used for the r = 0 cell average of the CHAT2 kernel.
double screened_kernel_2d(const KernelId& kernel, double kappa, double r, double sigma,
                          std::array<double, 2> hcell);

/// Green's function in mode space, stored compactly: spectral directions by
/// mode slot, unbounded directions by folded frequency index.
struct GreenTable {
  std::array<int, 3> slots{};       // n_store per direction
  std::array<int, 3> period{};      // DFT-equivalent length for unbounded directions, 0 otherwise
  std::array<int, 3> extent{};      // table extent per direction
  std::vector<double> values;       // x fastest

  int fold(int dir, int slot) const;
  double at(int s0, int s1, int s2) const;
};

/// `plans` are the forward plans per direction in the final spectral layout.
GreenTable build_green(const KernelId& kernel, const Domain& domain,
                       const std::array<TransformPlan, 3>& plans,
                       ZeroModePolicy policy = ZeroModePolicy::SetZero);

struct GreenSpectrum {
  Topology topo;
  ZeroModePolicy zero_mode_policy = ZeroModePolicy::SetZero;
  std::vector<std::vector<double>> per_rank;  // one real value per local element
};

GreenSpectrum distribute_green(const GreenTable& table, const Topology& topo);

void multiply_spectrum(FieldBuffer& f_hat, const GreenSpectrum& g_hat);

}  // namespace mixsolve
