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

#include <functional>
#include <utility>
#include <vector>

namespace mixsolve {

/// Adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double abs_tol = 0.0, int max_depth = 50);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

double expint_e1(double x);
/// E2(x) = int_1^inf exp(-x t) / t^2 dt, by quadrature.
double expint_e2(double x);

/// Sine and cosine integrals Si(x), Ci(x) for x > 0.
std::pair<double, double> sine_cosine_integral(double x);

double bessel_k0(double x);
double bessel_j0(double x);

/// Generalized Laguerre polynomial L_n^{(alpha)}(x).
double laguerre(int n, double alpha, double x);

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

}  // namespace mixsolve
