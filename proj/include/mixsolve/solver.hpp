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
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mixsolve/decomp.hpp"
#include "mixsolve/exchange.hpp"
#include "mixsolve/fft1d.hpp"
#include "mixsolve/field.hpp"
#include "mixsolve/greens.hpp"
#include "mixsolve/grid.hpp"
#include "mixsolve/profile.hpp"
#include "mixsolve/transport.hpp"

namespace mixsolve {

enum class DerivativeScheme { None, Spectral, FD2, FD4, FD6 };
std::string to_string(DerivativeScheme s);
DerivativeScheme parse_derivative(const std::string& s);
int scheme_order(DerivativeScheme s);  // 0 for spectral and none

std::complex<double> derivative_symbol(DerivativeScheme scheme, double omega, double h);

/// BC pair the derivative of a field with `bc` has along the same direction.
BCPair derivative_bc(BCPair bc);

struct Stage {
  int dir = 0;
  std::optional<ExtensionSpec> ext;
  Topology in;   // samples along dir (extended if unbounded)
  Topology out;  // modes along dir
  std::array<int, 3> common{};  // box shared with the previous topology
};

struct SolvePlan {
  Domain domain;
  KernelId kernel;
  Strategy strategy = Strategy::A2A;
  DerivativeScheme derivative = DerivativeScheme::None;
  int nranks = 1;
  SwitchKnobs knobs;

  Topology user;
  std::vector<Stage> stages;
  // forward[component][stage], one component for Poisson and three for Biot-Savart
  std::vector<std::vector<TransformPlan>> forward;
  // backward[component][stage]
  std::vector<std::vector<TransformPlan>> backward;
  std::vector<std::array<BCPair, 3>> input_bcs;
  std::vector<std::array<BCPair, 3>> output_bcs;

  std::shared_ptr<const GreenTable> green_table;
  GreenSpectrum green;
  double normalization = 1.0;
  std::vector<std::size_t> capacity;  // doubles per rank

  bool biot_savart() const { return input_bcs.size() == 3; }
};

/// Poisson plan with the domain's boundary conditions.
SolvePlan build_solve_plan(const Domain& domain, const KernelId& kernel, Strategy strategy,
                           DerivativeScheme derivative, int nranks, const SwitchKnobs& knobs = {});

/// Biot-Savart plan; `vorticity_bcs[c]` are the boundary conditions of component c.
/// Velocity boundary conditions follow from the curl.
SolvePlan build_biot_savart_plan(const Domain& domain, const std::array<std::array<BCPair, 3>, 3>& vorticity_bcs,
                                 const KernelId& kernel, Strategy strategy, DerivativeScheme derivative,
                                 int nranks, const SwitchKnobs& knobs = {});

/// Empty field in the user topology, sized for the whole plan.
FieldBuffer make_field(const SolvePlan& plan, int rank);

void solve_poisson(const SolvePlan& plan, FieldBuffer& field, Transport& transport,
                   Profiler* profiler = nullptr);
void solve_biot_savart(const SolvePlan& plan, std::array<FieldBuffer, 3>& fields, Transport& transport,
                       Profiler* profiler = nullptr);

/// Forward then backward without the Green's function multiply. Returns the
/// field to the user topology divided by the normalization.
void round_trip(const SolvePlan& plan, FieldBuffer& field, Transport& transport);

/// Copies between a global array (x fastest, user sample counts) and a rank's field.
void load_global(const SolvePlan& plan, const std::vector<double>& global, FieldBuffer& field);
void store_global(const SolvePlan& plan, const FieldBuffer& field, std::vector<double>& global);

/// Convenience drivers running all ranks on the in-process transport.
std::vector<double> solve_poisson_global(const SolvePlan& plan, const std::vector<double>& rhs,
                                         const TransportOptions& options = {});
std::array<std::vector<double>, 3> solve_biot_savart_global(const SolvePlan& plan,
                                                            const std::array<std::vector<double>, 3>& w,
                                                            const TransportOptions& options = {});

}  // namespace mixsolve
