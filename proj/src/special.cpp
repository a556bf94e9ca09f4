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

#include "mixsolve/special.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mixsolve {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const std::function<double(double)>& f, double a, double b, double& res, double& err) {
  const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
  const double fc = f(c);
  double rk = fc * kWgk[7], rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = hl * kXgk[j];
    const double s = f(c - x) + f(c + x);
    rk += kWgk[j] * s;
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  res = rk * hl;
  err = std::abs((rk - rg) * hl);
}

double adapt(const std::function<double(double)>& f, double a, double b, double whole, double err,
             double tol, int depth) {
  if (err <= tol || depth <= 0 || std::abs(b - a) < 1e-300) return whole;
  const double m = 0.5 * (a + b);
  double r1, e1, r2, e2;
  gk15(f, a, m, r1, e1);
  gk15(f, m, b, r2, e2);
  if (e1 + e2 <= tol) return r1 + r2;
  return adapt(f, a, m, r1, e1, 0.5 * tol, depth - 1) + adapt(f, m, b, r2, e2, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  double r, e;
  gk15(f, a, b, r, e);
  // estimate the magnitude on a few panels so the relative target is meaningful
  double mag = 0.0;
  const int panels = 8;
  for (int i = 0; i < panels; ++i) {
    double ri, ei;
    gk15(f, a + (b - a) * i / panels, a + (b - a) * (i + 1) / panels, ri, ei);
    mag += std::abs(ri);
  }
  const double tol = std::max(abs_tol, rel_tol * mag);
  return adapt(f, a, b, r, e, tol, max_depth);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

double expint_e1(double x) {
  if (!(x > 0)) throw std::domain_error("expint_e1: x must be positive");
  return -std::expint(-x);
}

double expint_e2(double x) {
  if (x < 0) throw std::domain_error("expint_e2: x must be non-negative");
  if (x == 0) return 1.0;
  if (x < 1.0) {
    // t = 1/s maps [1, inf) onto (0, 1]
    return integrate([x](double s) { return s > 0 ? std::exp(-x / s) : 0.0; }, 0.0, 1.0, 1e-12);
  }
  // E2(x) = e^{-x}/x * int_0^inf e^{-u} / (1 + u/x)^2 du, the integral lies in (1/4, 1]
  const double tail = 60.0;
  const double v = integrate([x](double u) { return std::exp(-u) / ((1.0 + u / x) * (1.0 + u / x)); }, 0.0,
                             tail, 1e-13);
  return std::exp(-x) / x * v;
}

std::pair<double, double> sine_cosine_integral(double x) {
  if (!(x > 0)) throw std::domain_error("sine_cosine_integral: x must be positive");
  constexpr double eps = 1e-16;
  constexpr double euler = 0.57721566490153286061;
  if (x < 2.0) {
    // power series
    double si = 0.0, ci = 0.0, term = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= x / k;
      const double t = term / k;
      if (k % 2 == 1) {
        si += ((k / 2) % 2 == 0 ? t : -t);
      } else {
        ci += (((k / 2) % 2 == 1) ? -t : t);
      }
      if (term < eps * std::max(std::abs(si), 1e-300) && k > 4) break;
    }
    return {si, euler + std::log(x) + ci};
  }
  // continued fraction for E1(ix), modified Lentz
  using C = std::complex<double>;
  C b(1.0, x), c(1.0 / std::numeric_limits<double>::min(), 0.0), d = 1.0 / b, h = d;
  for (int i = 2; i < 1000; ++i) {
    const double a = -double(i - 1) * (i - 1);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const C del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
  }
  h *= C(std::cos(x), -std::sin(x));
  return {std::numbers::pi / 2 + h.imag(), -h.real()};
}

double bessel_k0(double x) { return std::cyl_bessel_k(0.0, x); }
double bessel_j0(double x) { return std::cyl_bessel_j(0.0, x); }

double laguerre(int n, double alpha, double x) {
  if (n < 0) throw std::domain_error("laguerre: negative degree");
  double l0 = 1.0;
  if (n == 0) return l0;
  double l1 = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double l2 = ((2.0 * k + 1.0 + alpha - x) * l1 - (k + alpha) * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // asymptotic series, the terms shrink fast for x >= 25
  const double inv2 = 1.0 / (2.0 * x * x);
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv2;
    sum += term;
  }
  return sum / (x * std::sqrt(std::numbers::pi));
}

}  // namespace mixsolve
