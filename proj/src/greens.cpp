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

#include "mixsolve/greens.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mixsolve/special.hpp"

namespace mixsolve {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEuler = 0.57721566490153286061;
}  // namespace

int KernelId::order() const {
  switch (kind) {
    case Kind::CHAT2: return 2;
    case Kind::HEJ0: return 0;
    case Kind::HEJ2: return 2;
    case Kind::HEJ4: return 4;
    case Kind::HEJ6: return 6;
    case Kind::HEJ8: return 8;
    case Kind::HEJ10: return 10;
  }
  return 0;
}

std::string KernelId::name() const {
  if (kind == Kind::CHAT2) return "CHAT2";
  return "HEJ" + std::to_string(order());
}

KernelId KernelId::parse(const std::string& s, double sigma_ratio) {
  std::string u(s);
  for (auto& c : u) c = char(std::toupper(static_cast<unsigned char>(c)));
  KernelId k;
  k.sigma_ratio = sigma_ratio;
  if (!(sigma_ratio > 0)) throw std::invalid_argument("sigma ratio must be positive");
  if (u == "CHAT2") k.kind = Kind::CHAT2;
  else if (u == "HEJ0") k.kind = Kind::HEJ0;
  else if (u == "HEJ2") k.kind = Kind::HEJ2;
  else if (u == "HEJ4") k.kind = Kind::HEJ4;
  else if (u == "HEJ6") k.kind = Kind::HEJ6;
  else if (u == "HEJ8") k.kind = Kind::HEJ8;
  else if (u == "HEJ10") k.kind = Kind::HEJ10;
  else throw std::invalid_argument("unknown kernel: " + s);
  return k;
}

ExtensionSpec extension_geometry(const Domain& domain, int dir) {
  const BCPair bc = domain.bcs.at(dir);
  if (!bc.has_unbounded())
    throw std::invalid_argument("extension_geometry: direction " + std::to_string(dir) +
                                " has no unbounded side");
  const int n = domain.cells[dir];
  const bool node = domain.layout == Layout::NodeCentered;
  ExtensionSpec e;
  e.dir = dir;
  e.n_user = node ? n + 1 : n;
  e.pad_start = e.n_user;
  if (bc.is_unbounded()) {
    e.n_ext = 2 * n;
    e.green_mirror = n;
    e.period = 2 * n;
  } else {
    e.n_ext = node ? 2 * n + 1 : 2 * n;
    e.green_mirror = 2 * n;
    e.period = 4 * n;
    e.reversed = bc.left() == BC::Unbounded;
  }
  e.pad_count = e.n_ext - e.n_user;
  return e;
}

double hej_zeta(int m, double s) {
  double sum = 0.0, term = 1.0;
  for (int j = 0; j < m / 2; ++j) {
    if (j > 0) term *= s / j;
    sum += term;
  }
  return std::exp(-s) * sum;
}

static double sigma_of(const KernelId& k, double h) { return k.sigma_ratio * h; }

double spectral_green_value(const KernelId& kernel, std::array<double, 3> omega,
                            std::array<double, 3> h, ZeroModePolicy policy) {
  const double k2 = omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2];
  if (k2 == 0.0) {
    if (policy == ZeroModePolicy::SetZero) return 0.0;
    throw SingularityError("spectral Green's function is singular at the zero mode");
  }
  switch (kernel.kind) {
    case KernelId::Kind::CHAT2: return -1.0 / k2;
    case KernelId::Kind::HEJ0:
      for (int d = 0; d < 3; ++d)
        if (std::abs(omega[d]) > kPi / h[d] * (1.0 + 1e-12)) return 0.0;
      return -1.0 / k2;
    default: {
      const double sigma = sigma_of(kernel, std::max({h[0], h[1], h[2]}));
      const double s = 0.5 * sigma * sigma * k2;
      return -hej_zeta(kernel.order(), s) / k2;
    }
  }
}

// Cell averages of a radial function over a box centred on the origin, by
// splitting the box into pyramids with their apex at the centre.
static double cell_average_3d(const std::function<double(double)>& g, std::array<double, 3> h) {
  static const auto gl = gauss_legendre(32);
  const auto& [x, w] = gl;
  double total = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double ad = 0.5 * h[d], ae = 0.5 * h[(d + 1) % 3], af = 0.5 * h[(d + 2) % 3];
    double sum = 0.0;
    for (int it = 0; it < 32; ++it) {
      const double t = 0.5 * (x[it] + 1.0);
      for (int iu = 0; iu < 32; ++iu) {
        const double u = ae * x[iu];
        for (int iv = 0; iv < 32; ++iv) {
          const double v = af * x[iv];
          const double r = t * std::sqrt(ad * ad + u * u + v * v);
          sum += w[it] * w[iu] * w[iv] * g(r) * t * t;
        }
      }
    }
    total += 2.0 * sum * 0.5 * ae * af * ad;  // two opposite faces
  }
  return total / (h[0] * h[1] * h[2]);
}

static double cell_average_2d(const std::function<double(double)>& g, std::array<double, 2> h) {
  static const auto gl = gauss_legendre(32);
  const auto& [x, w] = gl;
  double total = 0.0;
  for (int d = 0; d < 2; ++d) {
    const double ad = 0.5 * h[d], ae = 0.5 * h[1 - d];
    double sum = 0.0;
    for (int it = 0; it < 32; ++it) {
      const double t = 0.5 * (x[it] + 1.0);
      for (int iu = 0; iu < 32; ++iu) {
        const double u = ae * x[iu];
        sum += w[it] * w[iu] * g(t * std::sqrt(ad * ad + u * u)) * t;
      }
    }
    total += 2.0 * sum * 0.5 * ae * ad;
  }
  return total / (h[0] * h[1]);
}

double chat2_origin_value(std::array<double, 3> h) {
  return cell_average_3d([](double r) { return -1.0 / (4.0 * kPi * r); }, h);
}

// Gaussian-polynomial part of HEJm in d unbounded dimensions for transverse
// wavenumber kappa. Zero for m <= 2.
static double hej_poly(int m, int d, double kappa, double rho, double sigma) {
  if (m <= 2) return 0.0;
  const double a = 0.5 * sigma * sigma;
  const double sk = a * kappa * kappa;
  const double u = rho * rho / (2.0 * sigma * sigma);
  const double alpha = 0.5 * d - 1.0;
  const double gauss = std::exp(-u) * std::pow(4.0 * kPi * a, -0.5 * d);
  double total = 0.0;
  double jfact = 1.0;
  for (int j = 1; j < m / 2; ++j) {
    jfact *= j;
    double inner = 0.0;
    double binom = 1.0, lfact = 1.0;
    for (int l = 0; l < j; ++l) {
      if (l > 0) {
        binom = binom * (j - l) / l;
        lfact *= l;
      }
      const double spow = (j - 1 - l) == 0 ? 1.0 : std::pow(sk, j - 1 - l);
      inner += binom * spow * lfact * laguerre(l, alpha, u);
    }
    total += inner / jfact;
  }
  return -a * std::exp(-sk) * gauss * total;
}

double unbounded_kernel_value(const KernelId& kernel, double r, double sigma, double h) {
  if (r < 0) throw std::invalid_argument("distance must be non-negative");
  switch (kernel.kind) {
    case KernelId::Kind::CHAT2:
      return r == 0.0 ? chat2_origin_value({h, h, h}) : -1.0 / (4.0 * kPi * r);
    case KernelId::Kind::HEJ0: {
      const double kc = kPi / h;
      if (r == 0.0) return -kc / (2.0 * kPi * kPi);
      return -sine_cosine_integral(kc * r).first / (2.0 * kPi * kPi * r);
    }
    default: {
      const double main = r == 0.0 ? -std::sqrt(2.0 / kPi) / (4.0 * kPi * sigma)
                                   : -std::erf(r / (std::sqrt(2.0) * sigma)) / (4.0 * kPi * r);
      return main + hej_poly(kernel.order(), 3, 0.0, r, sigma);
    }
  }
}

double screened_kernel_1d(const KernelId& kernel, double kappa, double x, double sigma) {
  x = std::abs(x);
  switch (kernel.kind) {
    case KernelId::Kind::CHAT2:
      return kappa > 0 ? -std::exp(-kappa * x) / (2.0 * kappa) : 0.5 * x;
    case KernelId::Kind::HEJ0:
      throw CapabilityError("HEJ0 is not available with mixed spectral and unbounded directions");
    default: break;
  }
  double main;
  if (kappa > 0) {
    const double sa = sigma / std::sqrt(2.0);  // sqrt(a)
    const double y1 = kappa * sa - x / (2.0 * sa);
    const double y2 = kappa * sa + x / (2.0 * sa);
    const double damp = std::exp(-kappa * kappa * sa * sa - x * x / (4.0 * sa * sa));
    const double t1 = y1 >= 0 ? damp * erfcx(y1) : std::exp(-kappa * x) * std::erfc(y1);
    const double t2 = damp * erfcx(y2);
    main = -(t1 + t2) / (4.0 * kappa);
  } else {
    main = 0.5 * (x * std::erf(x / (std::sqrt(2.0) * sigma)) +
                  sigma * std::sqrt(2.0 / kPi) * std::exp(-x * x / (2.0 * sigma * sigma)));
  }
  return main + hej_poly(kernel.order(), 1, kappa, x, sigma);
}

double screened_kernel_2d(const KernelId& kernel, double kappa, double r, double sigma,
                          std::array<double, 2> hcell) {
  switch (kernel.kind) {
    case KernelId::Kind::CHAT2: {
      auto g = [kappa](double rho) {
        return kappa > 0 ? -bessel_k0(kappa * rho) / (2.0 * kPi) : std::log(rho) / (2.0 * kPi);
      };
      return r == 0.0 ? cell_average_2d(g, hcell) : g(r);
    }
    case KernelId::Kind::HEJ0:
      throw CapabilityError("HEJ0 is not available with mixed spectral and unbounded directions");
    default: break;
  }
  const double a = 0.5 * sigma * sigma;
  double main;
  if (kappa > 0) {
    const double q = r * r / (4.0 * a);
    if (q > 40.0) {
      main = -bessel_k0(kappa * r) / (2.0 * kPi);
    } else {
      // -(1/4pi) int_a^inf exp(-v kappa^2 - r^2/(4v)) / v dv with v = a e^w
      const double sk = a * kappa * kappa;
      const double wmax = std::max(0.0, std::log(60.0 / sk));
      const double val = integrate(
          [sk, q](double w) { return std::exp(-sk * std::exp(w) - q * std::exp(-w)); }, 0.0, wmax,
          1e-13);
      main = -val / (4.0 * kPi);
    }
  } else {
    if (r == 0.0) {
      main = (-0.5 * kEuler + std::log(std::sqrt(2.0) * sigma)) / (2.0 * kPi);
    } else {
      main = (std::log(r) + 0.5 * expint_e1(r * r / (2.0 * sigma * sigma))) / (2.0 * kPi);
    }
  }
  return main + hej_poly(kernel.order(), 2, kappa, r, sigma);
}

std::vector<double> extended_kernel_line(const KernelId& kernel, const ExtensionSpec& ext, double h,
                                         double sigma) {
  std::vector<double> line(ext.period);
  for (int j = 0; j < ext.period; ++j) {
    const int m = std::min(j, ext.period - j);
    line[j] = unbounded_kernel_value(kernel, m * h, sigma, h);
  }
  return line;
}

// ---------------------------------------------------------------------------

int GreenTable::fold(int dir, int slot) const {
  if (period[dir] == 0) return slot;
  return std::min(slot, period[dir] - slot);
}

double GreenTable::at(int s0, int s1, int s2) const {
  const std::size_t i = fold(0, s0), j = fold(1, s1), k = fold(2, s2);
  return values[(k * extent[1] + j) * extent[0] + i];
}

namespace {

// DCT-I (unnormalized) along one axis of an x-fastest 3D array.
void dct1_along(std::vector<double>& v, std::array<int, 3> ext, int axis) {
  const int m = ext[axis];
  const TransformPlan plan = plan_transform(bcs::EE, Layout::NodeCentered, Role::FirstSpectral, m - 1);
  std::array<std::size_t, 3> stride{1, std::size_t(ext[0]), std::size_t(ext[0]) * ext[1]};
  const int b = (axis + 1) % 3, c = (axis + 2) % 3;
  std::vector<double> line(plan.line_doubles());
  for (int ic = 0; ic < ext[c]; ++ic)
    for (int ib = 0; ib < ext[b]; ++ib) {
      const std::size_t base = ib * stride[b] + ic * stride[c];
      for (int i = 0; i < m; ++i) line[i] = v[base + i * stride[axis]];
      forward_line(plan, line.data());
      for (int i = 0; i < m; ++i) v[base + i * stride[axis]] = line[i];
    }
}

}  // namespace

GreenTable build_green(const KernelId& kernel, const Domain& domain,
                       const std::array<TransformPlan, 3>& plans, ZeroModePolicy policy) {
  GreenTable t;
  std::array<double, 3> h{domain.h(0), domain.h(1), domain.h(2)};
  const double hmax = std::max({h[0], h[1], h[2]});
  const double sigma = kernel.sigma_ratio * hmax;
  std::vector<int> phys, spec;
  for (int d = 0; d < 3; ++d) {
    t.slots[d] = plans[d].n_store;
    if (domain.bcs[d].has_unbounded()) {
      t.period[d] = plans[d].n_logical;
      t.extent[d] = t.period[d] / 2 + 1;
      phys.push_back(d);
    } else {
      t.period[d] = 0;
      t.extent[d] = t.slots[d];
      spec.push_back(d);
    }
  }
  const auto& e = t.extent;
  t.values.assign(std::size_t(e[0]) * e[1] * e[2], 0.0);
  auto idx = [&](int i, int j, int k) { return (std::size_t(k) * e[1] + j) * e[0] + i; };

  std::array<std::vector<double>, 3> omega;
  for (int d : spec) {
    omega[d].resize(t.slots[d]);
    for (int s = 0; s < t.slots[d]; ++s) omega[d][s] = mode_meta(plans[d], s).omega;
  }

  if (phys.empty()) {
    for (int k = 0; k < e[2]; ++k)
      for (int j = 0; j < e[1]; ++j)
        for (int i = 0; i < e[0]; ++i)
          t.values[idx(i, j, k)] =
              spectral_green_value(kernel, {omega[0][i], omega[1][j], omega[2][k]}, h, policy);
    return t;
  }

  if (phys.size() == 3) {
    const double g0 = kernel.kind == KernelId::Kind::CHAT2 ? chat2_origin_value(h)
                                                           : unbounded_kernel_value(kernel, 0.0, sigma, hmax);
    for (int k = 0; k < e[2]; ++k)
      for (int j = 0; j < e[1]; ++j)
        for (int i = 0; i < e[0]; ++i) {
          const double x = i * h[0], y = j * h[1], z = k * h[2];
          const double r = std::sqrt(x * x + y * y + z * z);
          t.values[idx(i, j, k)] = (i | j | k) == 0 ? g0 : unbounded_kernel_value(kernel, r, sigma, hmax);
        }
  } else if (phys.size() == 2) {
    const int s = spec[0], pa = phys[0], pb = phys[1];
    for (int q = 0; q < e[s]; ++q) {
      const double kappa = std::abs(omega[s][q]);
      for (int ib = 0; ib < e[pb]; ++ib)
        for (int ia = 0; ia < e[pa]; ++ia) {
          const double x = ia * h[pa], y = ib * h[pb];
          const double g = screened_kernel_2d(kernel, kappa, std::sqrt(x * x + y * y), sigma, {h[pa], h[pb]});
          std::array<int, 3> ii{};
          ii[s] = q;
          ii[pa] = ia;
          ii[pb] = ib;
          t.values[idx(ii[0], ii[1], ii[2])] = g;
        }
    }
  } else {
    const int p = phys[0], sa = spec[0], sb = spec[1];
    for (int qb = 0; qb < e[sb]; ++qb)
      for (int qa = 0; qa < e[sa]; ++qa) {
        const double kappa = std::hypot(omega[sa][qa], omega[sb][qb]);
        for (int ip = 0; ip < e[p]; ++ip) {
          std::array<int, 3> ii{};
          ii[p] = ip;
          ii[sa] = qa;
          ii[sb] = qb;
          t.values[idx(ii[0], ii[1], ii[2])] = screened_kernel_1d(kernel, kappa, ip * h[p], sigma);
        }
      }
  }
  double vol = 1.0;
  for (int d : phys) {
    dct1_along(t.values, e, d);
    vol *= h[d];
  }
  for (double& v : t.values) v *= vol;
  return t;
}

GreenSpectrum distribute_green(const GreenTable& table, const Topology& topo) {
  for (int d = 0; d < 3; ++d)
    if (topo.n[d] != table.slots[d])
      throw std::invalid_argument("distribute_green: topology does not match the mode layout");
  GreenSpectrum g;
  g.topo = topo;
  const int a = topo.axis, b = (a + 1) % 3, c = (a + 2) % 3;
  g.per_rank.resize(topo.nranks());
  for (int r = 0; r < topo.nranks(); ++r) {
    const Box box = topo.local_box(r);
    auto& v = g.per_rank[r];
    v.resize(box.volume());
    std::size_t o = 0;
    std::array<int, 3> gi{};
    for (int ic = 0; ic < box.count[c]; ++ic)
      for (int ib = 0; ib < box.count[b]; ++ib)
        for (int ia = 0; ia < box.count[a]; ++ia) {
          gi[a] = box.start[a] + ia;
          gi[b] = box.start[b] + ib;
          gi[c] = box.start[c] + ic;
          v[o++] = table.at(gi[0], gi[1], gi[2]);
        }
  }
  return g;
}

void multiply_spectrum(FieldBuffer& f, const GreenSpectrum& g) {
  if (f.topo.axis != g.topo.axis || f.topo.n != g.topo.n || f.topo.nproc != g.topo.nproc)
    throw std::invalid_argument("multiply_spectrum: field and Green's function layouts differ");
  const Topology& t = f.topo;
  const Box box = t.local_box(f.rank);
  const int a = t.axis, b = (a + 1) % 3, c = (a + 2) % 3;
  const std::size_t stride = t.line_stride(f.rank);
  const int nf = t.nf;
  const std::vector<double>& gv = g.per_rank.at(f.rank);
  for (int ic = 0; ic < box.count[c]; ++ic)
    for (int ib = 0; ib < box.count[b]; ++ib) {
      const std::size_t line = std::size_t(ic) * box.count[b] + ib;
      double* p = f.data.data() + line * stride;
      const double* q = gv.data() + line * box.count[a];
      for (int ia = 0; ia < box.count[a]; ++ia)
        for (int k = 0; k < nf; ++k) p[ia * nf + k] *= q[ia];
    }
}

}  // namespace mixsolve
