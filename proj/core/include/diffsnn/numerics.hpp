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
// Log-domain primitives. Probabilities, subprobability vectors and
// intensities are carried in log scale throughout the library; linear-scale
// values are derived views. These helpers are the only place where the
// delicate branch points live.

#ifndef DIFFSNN_NUMERICS_HPP_
#define DIFFSNN_NUMERICS_HPP_

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace diffsnn {

inline constexpr double kLn2 = 0.6931471805599453;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(1 - exp(-a)) for a > 0, accurate over the whole range. Uses the
// expm1 form below log 2 and the log1p form above it; either form alone
// loses all precision at one end of the range.
inline double log1mexp(double a) {
  if (!(a > 0.0)) {
    throw std::domain_error("log1mexp: argument must be positive");
  }
  if (a <= kLn2) {
    return std::log(-std::expm1(-a));
  }
  return std::log1p(-std::exp(-a));
}

// log sum_i exp(v_i), max-shifted. Entries may be -inf (empty categories).
inline double log_sum_exp(std::span<const double> v) {
  if (v.empty()) {
    throw std::invalid_argument("log_sum_exp: empty input");
  }
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;  // all entries empty
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace diffsnn

#endif  // DIFFSNN_NUMERICS_HPP_
