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

#include "mixsolve/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mixsolve/special.hpp"

namespace mixsolve {

namespace {
constexpr double kPi = std::numbers::pi;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}
}  // namespace

std::string to_string(CaseId c) {
  switch (c) {
    case CaseId::SpectralMixed: return "spectral-mixed";
    case CaseId::FullyUnbounded: return "fully-unbounded";
    case CaseId::SemiUnbounded: return "semi-unbounded";
    case CaseId::BiotSavartTube: return "biot-savart-tube";
  }
  return "?";
}

CaseId parse_case(const std::string& s) {
  const std::string l = lower(s);
  for (CaseId c : {CaseId::SpectralMixed, CaseId::FullyUnbounded, CaseId::SemiUnbounded,
                   CaseId::BiotSavartTube})
    if (to_string(c) == l) return c;
  throw std::invalid_argument("unknown case: " + s);
}

double bump(double xi) {
  const double q = 1.0 - xi * xi;
  if (q <= 0.0) return 0.0;
  return std::exp(10.0 * (1.0 - 1.0 / q));
}

double bump_d2(double xi) {
  const double q = 1.0 - xi * xi;
  if (q <= 0.0) return 0.0;
  const double g1 = -20.0 * xi / (q * q);
  const double g2 = -20.0 * (1.0 + 3.0 * xi * xi) / (q * q * q);
  return bump(xi) * (g1 * g1 + g2);
}

double tube_e2_one() {
  static const double v = expint_e2(1.0);
  return v;
}

double tube_vorticity(double r, double R) {
  const double s = r / R;
  if (s >= 1.0) return 0.0;
  return 1.0 / (2.0 * kPi) * 2.0 / (R * R) / tube_e2_one() * std::exp(-1.0 / (1.0 - s * s));
}

double tube_velocity(double r, double R) {
  if (r == 0.0) return 0.0;
  const double s = r / R;
  if (s >= 1.0) return 1.0 / (2.0 * kPi * r);
  const double q = 1.0 - s * s;
  return (1.0 - q * expint_e2(1.0 / q) / tube_e2_one()) / (2.0 * kPi * r);
}

ValidationCase validation_case(CaseId id, double L) {
  if (!(L > 0)) throw std::invalid_argument("case length must be positive");
  ValidationCase vc;
  vc.id = id;
  vc.length = L;
  switch (id) {
    case CaseId::SpectralMixed: {
      vc.bcs = {bcs::EE, bcs::OE, bcs::PP};
      const double a = kPi / L, b = 2.5 * kPi / L, c = 8.0 * kPi / L;
      vc.phi = [=](double x, double y, double z) {
        return std::cos(a * x) * std::sin(b * y) * std::sin(c * z);
      };
      vc.rhs = [=](double x, double y, double z) {
        return -(a * a + b * b + c * c) * std::cos(a * x) * std::sin(b * y) * std::sin(c * z);
      };
      break;
    }
    case CaseId::FullyUnbounded: {
      vc.bcs = {bcs::UU, bcs::UU, bcs::UU};
      const double s = 2.0 / L;
      vc.phi = [=](double x, double y, double z) {
        return bump(s * x - 1) * bump(s * y - 1) * bump(s * z - 1);
      };
      vc.rhs = [=](double x, double y, double z) {
        const double X = bump(s * x - 1), Y = bump(s * y - 1), Z = bump(s * z - 1);
        return s * s * (bump_d2(s * x - 1) * Y * Z + X * bump_d2(s * y - 1) * Z + X * Y * bump_d2(s * z - 1));
      };
      break;
    }
    case CaseId::SemiUnbounded: {
      // even image about x = L, odd image about z = 0
      vc.bcs = {bcs::UE, bcs::UU, bcs::OU};
      const double s = 2.0 / L;
      auto X = [=](double x) { return bump(s * x - 1.4) + bump(s * x - 2.6); };
      auto X2 = [=](double x) { return s * s * (bump_d2(s * x - 1.4) + bump_d2(s * x - 2.6)); };
      auto Y = [=](double y) { return bump(s * y - 1); };
      auto Y2 = [=](double y) { return s * s * bump_d2(s * y - 1); };
      auto Z = [=](double z) { return bump(s * z - 0.6) - bump(s * z + 0.6); };
      auto Z2 = [=](double z) { return s * s * (bump_d2(s * z - 0.6) - bump_d2(s * z + 0.6)); };
      vc.phi = [=](double x, double y, double z) { return X(x) * Y(y) * Z(z); };
      vc.rhs = [=](double x, double y, double z) {
        return X2(x) * Y(y) * Z(z) + X(x) * Y2(y) * Z(z) + X(x) * Y(y) * Z2(z);
      };
      break;
    }
    case CaseId::BiotSavartTube: {
      vc.bcs = {bcs::UU, bcs::UU, bcs::EE};
      vc.component_bcs = {{{bcs::UU, bcs::UU, bcs::OO}, {bcs::UU, bcs::UU, bcs::OO}, {bcs::UU, bcs::UU, bcs::EE}}};
      const double R = 0.25 * L, c = 0.5 * L;
      vc.tube_radius = R;
      vc.vorticity = [=](double x, double y, double) -> std::array<double, 3> {
        return {0.0, 0.0, -tube_vorticity(std::hypot(x - c, y - c), R)};
      };
      vc.velocity = [=](double x, double y, double) -> std::array<double, 3> {
        const double dx = x - c, dy = y - c, r = std::hypot(dx, dy);
        if (r == 0.0) return {0.0, 0.0, 0.0};
        const double ut = tube_velocity(r, R);
        return {-dy / r * ut, dx / r * ut, 0.0};
      };
      break;
    }
  }
  return vc;
}

Domain case_domain(const ValidationCase& vc, int n, Layout layout) {
  const int cells = layout == Layout::NodeCentered ? n - 1 : n;
  if (cells < 1) throw std::invalid_argument("resolution too small");
  return Domain({cells, cells, cells}, {vc.length, vc.length, vc.length}, layout, vc.bcs);
}

std::vector<double> sample_field(const Domain& d, const ScalarFn& f) {
  const std::array<int, 3> n = sample_counts(d);
  std::vector<double> out(std::size_t(n[0]) * n[1] * n[2]);
  std::vector<double> xs(n[0]), ys(n[1]), zs(n[2]);
  for (int i = 0; i < n[0]; ++i) xs[i] = coordinate(d, 0, i);
  for (int j = 0; j < n[1]; ++j) ys[j] = coordinate(d, 1, j);
  for (int k = 0; k < n[2]; ++k) zs[k] = coordinate(d, 2, k);
  std::size_t q = 0;
  for (int k = 0; k < n[2]; ++k)
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) out[q++] = f(xs[i], ys[j], zs[k]);
  return out;
}

ReferenceFields reference_case(const ValidationCase& vc, const Domain& d) {
  for (int dir = 0; dir < 3; ++dir)
    if (!(d.bcs[dir] == vc.bcs[dir]))
      throw std::invalid_argument("reference_case: domain boundary conditions do not match " + to_string(vc.id));
  ReferenceFields out;
  if (!vc.vector_valued()) {
    out.rhs.push_back(sample_field(d, vc.rhs));
    out.ref.push_back(sample_field(d, vc.phi));
    return out;
  }
  // the tube does not depend on z: evaluate one plane and replicate it
  const std::array<int, 3> n = sample_counts(d);
  const std::size_t plane = std::size_t(n[0]) * n[1];
  out.rhs.assign(3, std::vector<double>(plane * n[2]));
  out.ref.assign(3, std::vector<double>(plane * n[2]));
  for (int j = 0; j < n[1]; ++j)
    for (int i = 0; i < n[0]; ++i) {
      const double x = coordinate(d, 0, i), y = coordinate(d, 1, j);
      const auto w = vc.vorticity(x, y, 0.0);
      const auto u = vc.velocity(x, y, 0.0);
      for (int k = 0; k < n[2]; ++k)
        for (int c = 0; c < 3; ++c) {
          out.rhs[c][k * plane + j * n[0] + i] = w[c];
          out.ref[c][k * plane + j * n[0] + i] = u[c];
        }
    }
  return out;
}

double laplacian_consistency(const ValidationCase& vc) {
  const double L = vc.length;
  const double dlt = 1e-3 * L;
  // sixth-order central second difference
  static const double c2[4] = {-490.0 / 180, 270.0 / 180, -27.0 / 180, 2.0 / 180};
  static const double c1[4] = {0.0, 45.0 / 60, -9.0 / 60, 1.0 / 60};
  auto lap = [&](const ScalarFn& f, double x, double y, double z) {
    double s = 3 * c2[0] * f(x, y, z);
    for (int m = 1; m <= 3; ++m) {
      const double o = m * dlt;
      s += c2[m] * (f(x + o, y, z) + f(x - o, y, z) + f(x, y + o, z) + f(x, y - o, z) +
                    f(x, y, z + o) + f(x, y, z - o));
    }
    return s / (dlt * dlt);
  };
  auto d1 = [&](const ScalarFn& f, int dir, double x, double y, double z) {
    double s = 0.0;
    for (int m = 1; m <= 3; ++m) {
      std::array<double, 3> p{x, y, z}, q{x, y, z};
      p[dir] += m * dlt;
      q[dir] -= m * dlt;
      s += c1[m] * (f(p[0], p[1], p[2]) - f(q[0], q[1], q[2]));
    }
    return s / dlt;
  };
  double worst = 0.0, scale = 0.0;
  const int np = 17;
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        const double x = (i + 1) * L / (np + 1), y = (j + 1) * L / (np + 1), z = (k + 1) * L / (np + 1);
        if (!vc.vector_valued()) {
          const double f = vc.rhs(x, y, z);
          scale = std::max(scale, std::abs(f));
          worst = std::max(worst, std::abs(f - lap(vc.phi, x, y, z)));
          continue;
        }
        // lap u = curl w
        for (int c = 0; c < 3; ++c) {
          const ScalarFn uc = [&, c](double a, double b, double e) { return vc.velocity(a, b, e)[c]; };
          const int p = (c + 1) % 3, q = (c + 2) % 3;
          const ScalarFn wq = [&, q](double a, double b, double e) { return vc.vorticity(a, b, e)[q]; };
          const ScalarFn wp = [&, p](double a, double b, double e) { return vc.vorticity(a, b, e)[p]; };
          const double curl = d1(wq, p, x, y, z) - d1(wp, q, x, y, z);
          scale = std::max(scale, std::abs(curl));
          worst = std::max(worst, std::abs(curl - lap(uc, x, y, z)));
        }
      }
  return scale > 0 ? worst / scale : worst;
}

// NaN compares false, so it would vanish from a plain max
static double abs_diff(double a, double b) {
  const double d = std::abs(a - b);
  return std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
}

double error_inf(const std::vector<double>& u, const std::vector<double>& ref) {
  if (u.size() != ref.size()) throw std::invalid_argument("error_inf: shape mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, abs_diff(u[i], ref[i]));
  return e;
}

double error_inf(Transport& t, const FieldBuffer& u, const FieldBuffer& ref) {
  if (!same_layout(u.topo, ref.topo) || u.rank != ref.rank) throw std::invalid_argument("error_inf: shape mismatch");
  const Box box = u.box();
  double e = 0.0;
  for (int k = 0; k < box.count[2]; ++k)
    for (int j = 0; j < box.count[1]; ++j)
      for (int i = 0; i < box.count[0]; ++i) {
        const std::size_t o = u.offset(i, j, k);
        for (int f = 0; f < u.topo.nf; ++f) e = std::max(e, abs_diff(u.data[o + f], ref.data[o + f]));
      }
  return allreduce_max(t, e);
}

double convergence_order(const std::vector<std::pair<int, double>>& pts) {
  if (pts.size() < 3) throw std::invalid_argument("convergence_order: need at least three resolutions");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].second > 0) || !std::isfinite(pts[i].second))
      throw std::invalid_argument("convergence_order: errors must be positive");
    if (i > 0 && pts[i].first <= pts[i - 1].first)
      throw std::invalid_argument("convergence_order: resolutions must increase");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = double(pts.size());
  for (auto [n, e] : pts) {
    const double x = std::log(double(n)), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::string to_string(ScalingMode m) { return m == ScalingMode::Strong ? "strong" : "weak"; }

ScalingMode parse_scaling_mode(const std::string& s) {
  const std::string l = lower(s);
  if (l == "strong") return ScalingMode::Strong;
  if (l == "weak") return ScalingMode::Weak;
  throw std::invalid_argument("unknown scaling mode: " + s);
}

double amdahl_speedup(double beta, double r) { return 1.0 / (beta + (1.0 - beta) / r); }

double weak_efficiency(double beta, double r) { return 1.0 / ((1.0 - beta) + r * beta); }

ScalingResult scaling_metrics(const std::vector<std::pair<double, double>>& times, ScalingMode mode) {
  auto base = std::find_if(times.begin(), times.end(), [](const auto& p) { return p.first == 1.0; });
  if (base == times.end()) throw std::invalid_argument("scaling_metrics: missing r = 1 baseline");
  const double t0 = base->second;
  ScalingResult out;
  double sxy = 0.0, sxx = 0.0;
  for (auto [r, t] : times) {
    if (!(r >= 1.0) || !(t > 0)) throw std::invalid_argument("scaling_metrics: invalid timing");
    ScalingRecord rec;
    rec.r = r;
    rec.time = t;
    double x, y;
    if (mode == ScalingMode::Strong) {
      rec.speedup = t0 / t;
      rec.efficiency = rec.speedup / r;
      // 1/s - 1/r = beta (1 - 1/r)
      x = 1.0 - 1.0 / r;
      y = 1.0 / rec.speedup - 1.0 / r;
    } else {
      rec.efficiency = t0 / t;
      rec.speedup = rec.efficiency * r;
      // 1/eta - 1 = beta (r - 1)
      x = r - 1.0;
      y = 1.0 / rec.efficiency - 1.0;
    }
    rec.beta = x > 0 ? y / x : 0.0;
    rec.alpha = 1.0 - rec.beta;
    sxy += x * y;
    sxx += x * x;
    out.records.push_back(rec);
  }
  out.beta = sxx > 0 ? sxy / sxx : 0.0;
  for (auto& rec : out.records)
    if (rec.r == 1.0) {
      rec.beta = out.beta;
      rec.alpha = 1.0 - out.beta;
    }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void merge_profile(ProfileMap& into, const ProfileMap& from) {
  for (const auto& [name, st] : from) {
    StageTimes& d = into[name];
    d.compute_s = std::max(d.compute_s, st.compute_s);
    d.overlap_s = std::max(d.overlap_s, st.overlap_s);
    d.comm_s = std::max(d.comm_s, st.comm_s);
    d.wall_s = std::max(d.wall_s, st.wall_s);
    d.bytes += st.bytes;
  }
}

double local_error(const FieldBuffer& f, const SolvePlan& plan, const std::vector<double>& ref) {
  const std::array<int, 3> n = plan.user.n;
  const Box box = f.box();
  double e = 0.0;
  for (int k = 0; k < box.count[2]; ++k)
    for (int j = 0; j < box.count[1]; ++j)
      for (int i = 0; i < box.count[0]; ++i) {
        const std::size_t g =
            (std::size_t(box.start[2] + k) * n[1] + box.start[1] + j) * n[0] + box.start[0] + i;
        const double d = std::abs(f.data[f.offset(i, j, k)] - ref[g]);
        e = std::max(e, std::isnan(d) ? std::numeric_limits<double>::infinity() : d);
      }
  return e;
}

}  // namespace

ValidationPoint run_validation_point(const ValidationOptions& o, int n, bool profile) {
  const ValidationCase vc = validation_case(o.id, o.length);
  const Domain dom = case_domain(vc, n, o.layout);
  const ReferenceFields ref = reference_case(vc, dom);
  const SolvePlan plan =
      vc.vector_valued()
          ? build_biot_savart_plan(dom, vc.component_bcs, o.kernel, o.strategy, o.derivative, o.nranks, o.knobs)
          : build_solve_plan(dom, o.kernel, o.strategy, DerivativeScheme::None, o.nranks, o.knobs);

  ValidationPoint pt;
  pt.n = n;
  std::mutex m;
  const auto t0 = std::chrono::steady_clock::now();
  run_ranks(o.nranks, {}, [&](Transport& t) {
    Profiler prof;
    Profiler* pp = profile ? &prof : nullptr;
    double e = 0.0;
    if (vc.vector_valued()) {
      std::array<FieldBuffer, 3> f;
      for (int c = 0; c < 3; ++c) {
        f[c] = make_field(plan, t.rank());
        load_global(plan, ref.rhs[c], f[c]);
      }
      solve_biot_savart(plan, f, t, pp);
      for (int c = 0; c < 3; ++c) e = std::max(e, local_error(f[c], plan, ref.ref[c]));
    } else {
      FieldBuffer f = make_field(plan, t.rank());
      load_global(plan, ref.rhs[0], f);
      solve_poisson(plan, f, t, pp);
      e = local_error(f, plan, ref.ref[0]);
    }
    e = allreduce_max(t, e);
    std::lock_guard lock(m);
    if (t.rank() == 0) pt.einf = e;
    if (profile) merge_profile(pt.profile, prof.stages());
  });
  pt.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return pt;
}

ValidationResult run_validation(const ValidationOptions& o, bool profile) {
  ValidationResult res;
  res.options = o;
  for (int n : o.nres) res.points.push_back(run_validation_point(o, n, profile));
  std::vector<std::pair<int, double>> above;
  for (const auto& p : res.points)
    if (p.einf > kErrorFloor) above.emplace_back(p.n, p.einf);
  res.spectral = !res.points.empty() && above.empty();
  if (above.size() >= 3) res.order = convergence_order(above);
  return res;
}

std::string csv_header() { return "case,kernel,strategy,layout,N,P,Einf,order"; }

void write_csv(std::ostream& os, const std::vector<ValidationResult>& results) {
  os << csv_header() << '\n';
  char buf[64];
  for (const auto& r : results) {
    std::string order;
    if (r.spectral) order = "spectral";
    else if (r.order) {
      std::snprintf(buf, sizeof buf, "%.4f", *r.order);
      order = buf;
    }
    for (const auto& p : r.points) {
      std::snprintf(buf, sizeof buf, "%.6e", p.einf);
      os << to_string(r.options.id) << ',' << r.options.kernel.name() << ',' << to_string(r.options.strategy)
         << ',' << to_string(r.options.layout) << ',' << p.n << ',' << r.options.nranks << ',' << buf << ','
         << order << '\n';
    }
  }
}

std::string profile_json(const ProfileMap& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, st] : p)
    j[name] = {{"compute_s", st.compute_s}, {"overlap_s", st.overlap_s}, {"comm_s", st.comm_s}, {"bytes", st.bytes}};
  return j.dump(2);
}

double throughput_factor(const Domain& d) {
  for (int i = 0; i < 3; ++i)
    if (!d.bcs[i].is_unbounded()) return 1.0;
  return 14.0 / 3.0;
}

SwitchBenchResult switch_bench(int p, int n, Strategy s, std::uint64_t seed, const TransportOptions& options) {
  if (p < 1 || n < 1) throw std::invalid_argument("switch_bench: p and n must be positive");
  const std::array<int, 3> ext{n, n, n};
  const std::array<Topology, 3> topo{build_pencil_topology(ext, p, 0), build_pencil_topology(ext, p, 1),
                                     build_pencil_topology(ext, p, 2)};
  std::vector<double> global(std::size_t(n) * n * n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : global) v = dist(rng);

  // per stage, per rank copy of the used part of the local buffer
  std::vector<std::vector<std::vector<double>>> snap(3, std::vector<std::vector<double>>(p));
  std::mutex m;
  const auto t0 = std::chrono::steady_clock::now();
  run_ranks(p, options, [&](Transport& t) {
    FieldBuffer f(topo[0], t.rank());
    const Box box = f.box();
    for (int k = 0; k < box.count[2]; ++k)
      for (int j = 0; j < box.count[1]; ++j)
        for (int i = 0; i < box.count[0]; ++i)
          f.data[f.offset(i, j, k)] =
              global[(std::size_t(box.start[2] + k) * n + box.start[1] + j) * n + box.start[0] + i];
    for (int st = 0; st < 3; ++st) {
      const SwitchPlan sp = plan_switch(topo[st], topo[(st + 1) % 3], t.rank(), {}, 100 + st);
      execute_switch(s, sp, f, t);
      std::lock_guard lock(m);
      snap[st][t.rank()].assign(f.data.begin(), f.data.begin() + f.used());
    }
  });
  SwitchBenchResult res;
  res.strategy = s;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::uint64_t hsh = 1469598103934665603ull;
  for (const auto& st : snap)
    for (const auto& rk : st)
      for (double v : rk) {
        unsigned char b[sizeof(double)];
        std::memcpy(b, &v, sizeof v);
        for (unsigned char c : b) hsh = (hsh ^ c) * 1099511628211ull;
      }
  res.checksum = hsh;
  return res;
}

}  // namespace mixsolve
