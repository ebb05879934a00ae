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
// The concrete (Gumbel-softmax) distribution: exact Gumbel-max categorical
// sampling, the temperature-relaxed sampler, its log-density, and the
// normalization operator that turns an intensity vector plus bound into a
// categorical parameter with an overflow category. Everything operates on
// log-scale weights; linear-scale probabilities are derived views.

#ifndef DIFFSNN_CONCRETE_HPP_
#define DIFFSNN_CONCRETE_HPP_

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "diffsnn/autodiff.hpp"
#include "diffsnn/errors.hpp"
#include "diffsnn/numerics.hpp"
#include "diffsnn/rng.hpp"
#include "diffsnn/scalar_ops.hpp"

namespace diffsnn {

// Log-scale unnormalized weights plus temperature. Weights must be finite:
// the density lives on the open simplex and zero-probability categories
// have no place there.
struct ConcreteParams {
  std::vector<double> log_pi;
  double temperature = 1.0;
};

void validate_params(const ConcreteParams& params);

// A point of the open probability simplex.
struct SimplexPoint {
  std::vector<double> coords;
};

// A relaxed categorical draw, kept in both scales. The log coordinates are
// the primary representation; coords = exp(log_coords) may underflow to
// zero without harming downstream densities.
template <class S>
struct SimplexSample {
  std::vector<S> coords;
  std::vector<S> log_coords;
};

// Gumbel-max trick: argmax_k log_pi_k + g_k with i.i.d. standard Gumbels.
// Distributed Cat(pi / ||pi||_1). Entries of -inf are allowed and never
// win. Consumes exactly log_pi.size() uniforms, in index order.
template <UniformSource U>
int gumbel_max_index(std::span<const double> log_pi, U& rng) {
  if (log_pi.empty()) {
    throw std::invalid_argument("gumbel_max_index: empty weight vector");
  }
  int best = 0;
  double best_score = kNegInf;
  for (std::size_t k = 0; k < log_pi.size(); ++k) {
    const double score = log_pi[k] + sample_gumbel(rng);
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(k);
    }
  }
  return best;
}

template <UniformSource U>
std::vector<double> gumbel_max_sample(const ConcreteParams& params, U& rng) {
  validate_params(params);
  const int k = gumbel_max_index(params.log_pi, rng);
  std::vector<double> one_hot(params.log_pi.size(), 0.0);
  one_hot[static_cast<std::size_t>(k)] = 1.0;
  return one_hot;
}

// Relaxed draw: softmax((log_pi + g) / tau), computed as a log-softmax
// followed by exp. Differentiable w.r.t. log_pi when S = ad::Var. Consumes
// exactly log_pi.size() uniforms, in index order.
template <class S, UniformSource U>
SimplexSample<S> concrete_sample(const EvalContext<S>& ctx,
                                 std::span<const S> log_pi, double tau,
                                 U& rng) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("concrete_sample: temperature must be positive");
  }
  using std::exp;
  const std::size_t k = log_pi.size();
  static thread_local std::vector<S> scaled;
  scaled.clear();
  scaled.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto acc = make_lincomb(ctx);
    acc.add(log_pi[i], 1.0 / tau);
    acc.add_const(sample_gumbel(rng) / tau);
    scaled.push_back(acc.commit());
  }
  const S lse = log_sum_exp(std::span<const S>(scaled));
  SimplexSample<S> out;
  out.coords.reserve(k);
  out.log_coords.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    S log_coord = scaled[i] - lse;
    out.coords.push_back(exp(log_coord));
    out.log_coords.push_back(std::move(log_coord));
  }
  return out;
}

template <UniformSource U>
SimplexSample<double> concrete_sample(const ConcreteParams& params, U& rng) {
  validate_params(params);
  EvalContext<double> ctx;
  return concrete_sample<double>(ctx, params.log_pi, params.temperature, rng);
}

// Log-density of the concrete distribution at a simplex point given by its
// log coordinates:
//   lgamma(K) + (K-1) log tau + sum_k [log pi_k - (tau+1) log p_k]
//   - K * logsumexp_k(log pi_k - tau log p_k).
template <class S>
S concrete_log_density_logs(const EvalContext<S>& ctx,
                            std::span<const S> log_p,
                            std::span<const S> log_pi, double tau) {
  const std::size_t k = log_p.size();
  if (k < 2 || log_pi.size() != k) {
    throw std::invalid_argument("concrete_log_density: need K >= 2 matching sizes");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("concrete_log_density: temperature must be positive");
  }
  static thread_local std::vector<S> z;
  z.clear();
  z.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto acc = make_lincomb(ctx);
    acc.add(log_pi[i], 1.0);
    acc.add(log_p[i], -tau);
    z.push_back(acc.commit());
  }
  const S lse = log_sum_exp(std::span<const S>(z));
  auto acc = make_lincomb(ctx);
  acc.add_const(std::lgamma(static_cast<double>(k)) +
                (static_cast<double>(k) - 1.0) * std::log(tau));
  for (std::size_t i = 0; i < k; ++i) {
    acc.add(log_pi[i], 1.0);
    acc.add(log_p[i], -(tau + 1.0));
  }
  acc.add(lse, -static_cast<double>(k));
  return acc.commit();
}

// Density at a linear-scale simplex point. The density is defined on the
// open simplex only; a zero coordinate is a domain error.
double concrete_log_density(const SimplexPoint& p, const ConcreteParams& params);

// Normalization operator: maps D log-intensities and a log-bound to D+1
// log-probabilities. The first D entries are log_lambda - log_bound; the
// overflow entry is log(1 - sum lambda / bound), computed through log1mexp
// since the direct form loses everything when the ratio is near 0 or 1.
// A summed intensity above the bound is a contract violation.
template <class S>
std::vector<S> pi_bar_compose(std::span<const S> log_lambda,
                              double log_lambda_bar) {
  if (log_lambda.empty()) {
    throw std::invalid_argument("pi_bar_compose: empty intensity vector");
  }
  const S lse = log_sum_exp(log_lambda);
  const double total = scalar_value(lse);
  // Slack for rounding in the log-sum: a saturated intensity meeting its
  // bound exactly must not read as a violation.
  if (total > log_lambda_bar + 1e-9) {
    throw ContractViolation("pi_bar_compose: summed intensity exceeds bound");
  }
  std::vector<S> out;
  out.reserve(log_lambda.size() + 1);
  for (const S& v : log_lambda) {
    out.push_back(v - log_lambda_bar);
  }
  if constexpr (std::is_same_v<S, double>) {
    const double gap = log_lambda_bar - total;
    out.push_back(gap > 0.0 ? log1mexp(gap) : kNegInf);
  } else {
    out.push_back(log1mexp(log_lambda_bar - lse));
  }
  return out;
}

}  // namespace diffsnn

#endif  // DIFFSNN_CONCRETE_HPP_
