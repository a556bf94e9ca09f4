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
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixsolve/exchange.hpp"
#include "mixsolve/field.hpp"
#include "mixsolve/greens.hpp"
#include "mixsolve/grid.hpp"
#include "mixsolve/profile.hpp"
#include "mixsolve/solver.hpp"
#include "mixsolve/transport.hpp"

namespace mixsolve {

enum class CaseId { SpectralMixed, FullyUnbounded, SemiUnbounded, BiotSavartTube };
std::string to_string(CaseId c);
CaseId parse_case(const std::string& s);

using ScalarFn = std::function<double(double, double, double)>;
using VectorFn = std::function<std::array<double, 3>(double, double, double)>;

struct ValidationCase {
  CaseId id = CaseId::SpectralMixed;
  double length = 1.0;
  std::array<BCPair, 3> bcs{};  // Poisson, or vorticity z component for the tube
  std::array<std::array<BCPair, 3>, 3> component_bcs{};  // tube only

  // Poisson cases: phi is the reference, rhs its Laplacian
  ScalarFn phi, rhs;
  // tube: vorticity source and reference velocity
  VectorFn vorticity, velocity;
  double tube_radius = 0.0;

  bool vector_valued() const { return id == CaseId::BiotSavartTube; }
};

ValidationCase validation_case(CaseId id, double length = 1.0);

/// Domain for a case; `n` counts samples per direction.
Domain case_domain(const ValidationCase& vc, int n, Layout layout);

/// Samples a function on the domain's user grid, x fastest.
std::vector<double> sample_field(const Domain& d, const ScalarFn& f);

/// Reference rhs and solution fields, one entry per component.
struct ReferenceFields {
  std::vector<std::vector<double>> rhs;
  std::vector<std::vector<double>> ref;
};
ReferenceFields reference_case(const ValidationCase& vc, const Domain& d);

/// Largest deviation between rhs and a finite-difference Laplacian of the
/// reference on a 17^3 probe grid, divided by max |rhs| on that grid.
double laplacian_consistency(const ValidationCase& vc);

// bump(xi) = exp(10 (1 - 1/(1 - xi^2))) on |xi| < 1, with derivatives in xi
double bump(double xi);
double bump_d2(double xi);

/// E_2(1)
double tube_e2_one();
double tube_vorticity(double r, double R);
double tube_velocity(double r, double R);

double error_inf(const std::vector<double>& u, const std::vector<double>& ref);
/// Global max of |u - ref| over the rank's box, reduced across the transport.
double error_inf(Transport& t, const FieldBuffer& u, const FieldBuffer& ref);

constexpr double kErrorFloor = 1e-13;

/// Least-squares slope of log E against log N, negated.
double convergence_order(const std::vector<std::pair<int, double>>& points);

enum class ScalingMode { Strong, Weak };
std::string to_string(ScalingMode m);
ScalingMode parse_scaling_mode(const std::string& s);

struct ScalingRecord {
  double r = 1.0;
  double time = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
  double speedup = 1.0;
  double efficiency = 1.0;
};

struct ScalingResult {
  std::vector<ScalingRecord> records;
  double beta = 0.0;  // fitted serial fraction
};

double amdahl_speedup(double beta, double r);
double weak_efficiency(double beta, double r);
ScalingResult scaling_metrics(const std::vector<std::pair<double, double>>& times, ScalingMode mode);

// ---------------------------------------------------------------------------

struct ValidationOptions {
  CaseId id = CaseId::SpectralMixed;
  KernelId kernel;
  Strategy strategy = Strategy::NB;
  Layout layout = Layout::NodeCentered;
  std::vector<int> nres;
  int nranks = 1;
  DerivativeScheme derivative = DerivativeScheme::Spectral;  // tube only
  SwitchKnobs knobs;
  double length = 1.0;
};

using ProfileMap = std::map<std::string, StageTimes>;

struct ValidationPoint {
  int n = 0;
  double einf = 0.0;
  double seconds = 0.0;
  ProfileMap profile;  // max over ranks of the stage times, bytes summed
};

struct ValidationResult {
  ValidationOptions options;
  std::vector<ValidationPoint> points;
  std::optional<double> order;  // empty when fewer than three points sit above the floor
  bool spectral = false;         // every error below the floor
};

ValidationPoint run_validation_point(const ValidationOptions& o, int n, bool profile = false);
ValidationResult run_validation(const ValidationOptions& o, bool profile = false);

std::string csv_header();
void write_csv(std::ostream& os, const std::vector<ValidationResult>& results);
/// {stage: {compute_s, overlap_s, comm_s, bytes}}
std::string profile_json(const ProfileMap& p);

/// Data volume factor per transform: 14/3 when every direction is unbounded.
double throughput_factor(const Domain& d);

struct SwitchBenchResult {
  Strategy strategy;
  std::uint64_t checksum = 0;
  double seconds = 0.0;
};

/// Cycles a random n^3 field through x -> y -> z -> x pencils on p ranks.
SwitchBenchResult switch_bench(int p, int n, Strategy s, std::uint64_t seed = 1,
                               const TransportOptions& options = {});

}  // namespace mixsolve
