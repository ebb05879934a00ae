// Copyright 2026 The DiffSNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Test-only oracles: high-precision references, statistical tests and
// quadrature helpers. Nothing here is reachable from the library.

#ifndef DIFFSNN_TESTS_ORACLES_HPP_
#define DIFFSNN_TESTS_ORACLES_HPP_

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace diffsnn::testing {

// log(1 - exp(-a)) in extended precision; relative error well below 1e-16.
long double log1mexp_ref(long double a);

// Central finite difference (f(x+h) - f(x-h)) / 2h.
double central_diff(const std::function<double(double)>& f, double x,
                    double h);

double relative_error(double got, double want);

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;      // sample std (n-1)
  double stderr_mean = 0.0; // stddev / sqrt(n)
  std::size_t n = 0;
};

Moments moments(std::span<const double> xs);

// Kolmogorov-Smirnov statistic of a sample against a CDF.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

// Asymptotic critical value at level alpha: sqrt(-ln(alpha/2)/2) / sqrt(n).
double ks_critical(double alpha, std::size_t n);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Chi-square survival function with k degrees of freedom.
double chi2_sf(double x, int k);

// Two-sample chi-square homogeneity test over integer-valued samples.
// Values are binned by count; bins with a pooled count below 5 are merged
// into their neighbors. Returns the p-value.
double chi2_homogeneity_pvalue(std::span<const int> sample_a,
                               std::span<const int> sample_b);

// Composite Simpson rule on [a, b] with n (even) intervals.
double simpson(const std::function<double(double)>& f, double a, double b,
               int n);

// Integral over the open 2-point simplex of a density f(p1, p2),
// p2 = 1 - p1, via the logistic substitution p1 = sigmoid(x) which removes
// the p^(tau-1) edge singularities. Both coordinates are computed directly
// from x so neither ever rounds to zero.
double simplex2_integral(const std::function<double(double, double)>& density,
                         double x_limit, int n);

// Integral over the open 3-point simplex of density(p1, p2, p3), via the
// softmax substitution with Jacobian p1 p2 p3.
double simplex3_integral(
    const std::function<double(double, double, double)>& density,
    double x_limit, int n);

}  // namespace diffsnn::testing

#endif  // DIFFSNN_TESTS_ORACLES_HPP_
