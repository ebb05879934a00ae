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
// Plain-double twins of the recorded tape operations, plus the scalar-type
// glue that lets model code be written once and instantiated for either
// double or ad::Var. The accumulation order in LinCombD matches
// ad::LinComb exactly; this is what keeps the two instantiations
// bit-identical on the primal path.

#ifndef DIFFSNN_SCALAR_OPS_HPP_
#define DIFFSNN_SCALAR_OPS_HPP_

#include <cmath>
#include <span>

#include "diffsnn/autodiff.hpp"
#include "diffsnn/numerics.hpp"

namespace diffsnn {

inline double neg(double x) { return -x; }

inline double max0(double x) { return x > 0.0 ? x : 0.0; }

// Amplitude-scaled logistic sigmoid, a / (1 + exp(-x)), evaluated without
// overflow on either tail.
inline double sigmoid_amp(double x, double amplitude) {
  if (x >= 0.0) {
    return amplitude / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return amplitude * e / (1.0 + e);
}

inline double softplus(double x) {
  if (x > 0.0) {
    return x + std::log1p(std::exp(-x));
  }
  return std::log1p(std::exp(x));
}

// log(1 / (1 + exp(-x))) = -softplus(-x), without cancellation.
inline double log_sigmoid(double x) { return -softplus(-x); }

// log sigmoid(-x), fused so the taped form needs no negation node.
inline double log_sigmoid_of_neg(double x) { return log_sigmoid(-x); }

inline double weighted_sum(std::span<const double> xs,
                           std::span<const double> coeffs, double bias) {
  double acc = bias;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += coeffs[i] * xs[i];
  return acc;
}

inline double dot(std::span<const double> xs, std::span<const double> ys) {
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += xs[i] * ys[i];
  return acc;
}

class LinCombD {
 public:
  void clear() { value_ = 0.0; }
  void add_const(double c) { value_ += c; }
  void add(double x, double coeff) { value_ += coeff * x; }
  void add_product(double x, double y) { value_ += x * y; }
  double value() const { return value_; }
  double commit() const { return value_; }

 private:
  double value_ = 0.0;
};

// ---- scalar-type glue -------------------------------------------------------

template <class S>
struct EvalContext;

template <>
struct EvalContext<double> {
  double constant(double c) const { return c; }
};

template <>
struct EvalContext<ad::Var> {
  ad::Tape* tape = nullptr;
  ad::Var constant(double c) const { return tape->constant(c); }
};

inline LinCombD make_lincomb(const EvalContext<double>&) { return {}; }
inline ad::LinComb make_lincomb(const EvalContext<ad::Var>& ctx) {
  return ad::LinComb(ctx.tape);
}

inline void rebind_lincomb(LinCombD& acc, const EvalContext<double>&) {
  acc.clear();
}
inline void rebind_lincomb(ad::LinComb& acc, const EvalContext<ad::Var>& ctx) {
  acc.rebind(ctx.tape);
}

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  using Lin = LinCombD;
  static double value(double x) { return x; }
};

template <>
struct ScalarTraits<ad::Var> {
  using Lin = ad::LinComb;
  static double value(ad::Var x) { return x.value(); }
};

template <class S>
double scalar_value(const S& x) {
  return ScalarTraits<S>::value(x);
}

}  // namespace diffsnn

#endif  // DIFFSNN_SCALAR_OPS_HPP_
