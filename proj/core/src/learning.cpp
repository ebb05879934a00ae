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

#include "diffsnn/learning.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace diffsnn {

namespace {

constexpr double kAdaGradEps = 1e-10;

std::vector<double>& axpy(std::vector<double>& acc,
                          const std::vector<double>& x, double a) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a * x[i];
  return acc;
}

SpikeTrain sample_hidden_train(const SnnIntensityModel& q_model,
                               double horizon, Rng& rng) {
  return thinning_sample(q_model, horizon, rng);
}

}  // namespace

void validate(const TrainConfig& config) {
  if (!(config.lambda_bar > 0.0) || !(config.temperature > 0.0)) {
    throw std::invalid_argument("TrainConfig: bound and temperature must be positive");
  }
  if (!(config.anneal_ratio > 0.0) || config.anneal_ratio > 1.0) {
    throw std::invalid_argument("TrainConfig: anneal_ratio must be in (0, 1]");
  }
  if (config.compensator_samples < 1 || config.elbo_samples < 1 ||
      config.eval_samples < 1) {
    throw std::invalid_argument("TrainConfig: sample counts must be at least 1");
  }
  if (config.epochs < 0) {
    throw std::invalid_argument("TrainConfig: epochs must be non-negative");
  }
  if (!(config.learning_rate >= 0.0)) {
    throw std::invalid_argument("TrainConfig: learning rate must be non-negative");
  }
}

std::vector<int> phi_coordinates(const SnnParams& params) {
  const ParamLayout layout = ParamLayout::of(params);
  std::vector<int> coords;
  for (int d : params.hidden) coords.push_back(layout.bias(d));
  for (int from = 0; from < params.dim(); ++from) {
    for (int to : params.hidden) {
      for (int l = 0; l < params.basis(); ++l) {
        coords.push_back(layout.weight(from, to, l));
      }
    }
  }
  return coords;
}

LiftedSnnParams lift_params(ad::Tape& tape, const SnnParams& params) {
  LiftedSnnParams out;
  out.params.kernel_centers = params.kernel_centers;
  out.params.amplitude = params.amplitude;
  out.params.observable = params.observable;
  out.params.hidden = params.hidden;
  out.flat.reserve(params.u_bar.size() + params.weights.size());
  out.params.u_bar.reserve(params.u_bar.size());
  for (double v : params.u_bar) {
    ad::Var leaf = tape.leaf(v);
    out.params.u_bar.push_back(leaf);
    out.flat.push_back(leaf);
  }
  out.params.weights.reserve(params.weights.size());
  for (double v : params.weights) {
    ad::Var leaf = tape.leaf(v);
    out.params.weights.push_back(leaf);
    out.flat.push_back(leaf);
  }
  return out;
}

std::vector<double> extract_gradient(const ad::GradientMap& grads,
                                     const LiftedSnnParams& lifted) {
  std::vector<double> out;
  out.reserve(lifted.flat.size());
  for (ad::Var leaf : lifted.flat) out.push_back(ad::grad_of(grads, leaf));
  return out;
}

void adagrad_step(SnnParams& params, std::span<const double> grads,
                  AdaGradState& state, double learning_rate) {
  const ParamLayout layout = ParamLayout::of(params);
  if (static_cast<int>(grads.size()) != layout.size()) {
    throw std::invalid_argument("adagrad_step: gradient shape mismatch");
  }
  if (state.sum_sq.empty()) {
    state.sum_sq.assign(grads.size(), 0.0);
  }
  if (state.sum_sq.size() != grads.size()) {
    throw std::invalid_argument("adagrad_step: state shape mismatch");
  }
  auto step = [&](double& p, std::size_t i) {
    state.sum_sq[i] += grads[i] * grads[i];
    p += learning_rate * grads[i] / std::sqrt(state.sum_sq[i] + kAdaGradEps);
  };
  for (int d = 0; d < params.dim(); ++d) {
    step(params.u_bar[static_cast<std::size_t>(d)],
         static_cast<std::size_t>(layout.bias(d)));
  }
  for (int from = 0; from < params.dim(); ++from) {
    for (int to = 0; to < params.dim(); ++to) {
      for (int l = 0; l < params.basis(); ++l) {
        step(params.weight(from, to, l),
             static_cast<std::size_t>(layout.weight(from, to, l)));
      }
    }
  }
  // Keep self-filters depressive.
  for (int d = 0; d < params.dim(); ++d) {
    for (int l = 0; l < params.basis(); ++l) {
      double& w = params.weight(d, d, l);
      if (w > 0.0) w = 0.0;
    }
  }
}

double elbo_estimate(const SnnParams& theta, const SnnParams& phi,
                     const SpikeTrain& observed, const TrainConfig& config,
                     Rng& rng) {
  validate(config);
  double total = 0.0;
  for (int s = 0; s < config.elbo_samples; ++s) {
    total += config.estimator == Estimator::kScore
                 ? score_elbo_sample(theta, phi, observed, config, rng)
                 : pathwise_elbo_sample(theta, phi, observed, config, rng);
  }
  return total / config.elbo_samples;
}

ScoreGrads score_gradients(const SnnParams& theta, const SnnParams& phi,
                           const SpikeTrain& observed,
                           const TrainConfig& config, Rng& rng,
                           ad::Tape& tape, bool share) {
  const ParamLayout layout = ParamLayout::of(theta);
  ScoreGrads out;
  out.theta.assign(static_cast<std::size_t>(layout.size()), 0.0);
  out.phi.assign(static_cast<std::size_t>(layout.size()), 0.0);
  const bool has_hidden = !theta.hidden.empty();
  const SnnIntensityModel q_model =
      has_hidden ? SnnIntensityModel::hidden_conditional(phi, observed)
                 : SnnIntensityModel::full(phi);
  EvalContext<ad::Var> ctx;
  ctx.tape = &tape;
  for (int s = 0; s < config.elbo_samples; ++s) {
    tape.clear();
    const LiftedSnnParams theta_l = lift_params(tape, theta);
    const LiftedSnnParams phi_own =
        share ? LiftedSnnParams{} : lift_params(tape, phi);
    const LiftedSnnParams& phi_ref = share ? theta_l : phi_own;

    SpikeTrain hidden_train;
    hidden_train.horizon = observed.horizon;
    if (has_hidden) {
      hidden_train = sample_hidden_train(q_model, observed.horizon, rng);
    }
    const SpikeTrain merged = merge_trains(observed, hidden_train);
    const ad::Var log_p = joint_log_lik_vanilla_t<ad::Var>(
        ctx, theta_l.params, merged, config.compensator_samples, rng);
    double elbo = log_p.value();
    ad::GradientMap gp = tape.gradients(log_p);
    axpy(out.theta, extract_gradient(gp, theta_l), 1.0);
    if (has_hidden) {
      const ad::Var log_q = hidden_log_lik_t<ad::Var>(
          ctx, phi_ref.params, observed, hidden_train,
          config.compensator_samples, rng);
      // The payoff's log q draws its own compensator samples: sharing them
      // with the score factor would couple the two Monte-Carlo errors and
      // bias the product.
      elbo -= log_likelihood(q_model, hidden_train,
                             config.compensator_samples, rng);
      ad::GradientMap gq = tape.gradients(log_q);
      axpy(out.phi, extract_gradient(gq, phi_ref), elbo - 1.0);
    }
    out.elbo += elbo;
  }
  const double inv = 1.0 / config.elbo_samples;
  for (double& v : out.theta) v *= inv;
  for (double& v : out.phi) v *= inv;
  out.elbo *= inv;
  return out;
}

PathwiseGrads pathwise_gradients(const SnnParams& theta, const SnnParams& phi,
                                 const SpikeTrain& observed,
                                 const TrainConfig& config, Rng& rng,
                                 ad::Tape& tape, bool share) {
  const ParamLayout layout = ParamLayout::of(theta);
  PathwiseGrads out;
  out.theta.assign(static_cast<std::size_t>(layout.size()), 0.0);
  out.phi.assign(static_cast<std::size_t>(layout.size()), 0.0);
  EvalContext<ad::Var> ctx;
  ctx.tape = &tape;
  for (int s = 0; s < config.elbo_samples; ++s) {
    tape.clear();
    const LiftedSnnParams theta_l = lift_params(tape, theta);
    const LiftedSnnParams phi_own =
        share ? LiftedSnnParams{} : lift_params(tape, phi);
    const LiftedSnnParams& phi_ref = share ? theta_l : phi_own;
    const ad::Var elbo = pathwise_elbo_term<ad::Var>(
        ctx, theta_l.params, phi_ref.params, observed, config, rng);
    const ad::GradientMap g = tape.gradients(elbo);
    axpy(out.theta, extract_gradient(g, theta_l), 1.0);
    axpy(out.phi, extract_gradient(g, phi_ref), 1.0);
    out.elbo += elbo.value();
  }
  const double inv = 1.0 / config.elbo_samples;
  for (double& v : out.theta) v *= inv;
  for (double& v : out.phi) v *= inv;
  out.elbo *= inv;
  return out;
}

std::vector<double> grad_theta(const SnnParams& theta, const SnnParams& phi,
                               const SpikeTrain& observed,
                               const TrainConfig& config, Rng& rng,
                               ad::Tape& tape) {
  return score_gradients(theta, phi, observed, config, rng, tape, false).theta;
}

std::vector<double> grad_phi_score(const SnnParams& theta,
                                   const SnnParams& phi,
                                   const SpikeTrain& observed,
                                   const TrainConfig& config, Rng& rng,
                                   ad::Tape& tape) {
  return score_gradients(theta, phi, observed, config, rng, tape, false).phi;
}

std::vector<double> grad_phi_pathwise(const SnnParams& theta,
                                      const SnnParams& phi,
                                      const SpikeTrain& observed,
                                      const TrainConfig& config, Rng& rng,
                                      ad::Tape& tape) {
  return pathwise_gradients(theta, phi, observed, config, rng, tape, false).phi;
}

TrainResult train(const TrainConfig& config, const SnnParams& initial,
                  std::span<const SpikeTrain> dataset) {
  validate(config);
  if (dataset.empty()) {
    throw std::invalid_argument("train: empty dataset");
  }
  TrainResult result;
  result.theta = initial;
  result.phi = initial;
  AdaGradState state_theta;
  AdaGradState state_phi;
  Rng rng(config.seed);
  ad::Tape tape;
  TrainConfig current = config;
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    // Fisher-Yates reshuffle per epoch.
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
      std::swap(order[i - 1], order[j]);
    }
    double elbo_sum = 0.0;
    for (std::size_t idx : order) {
      const SpikeTrain& example = dataset[idx];
      if (config.estimator == Estimator::kScore) {
        ScoreGrads g = score_gradients(result.theta, result.phi, example,
                                       current, rng, tape,
                                       config.share_phi_theta);
        if (config.share_phi_theta) {
          axpy(g.theta, g.phi, 1.0);
          adagrad_step(result.theta, g.theta, state_theta, config.learning_rate);
          result.phi = result.theta;
        } else {
          adagrad_step(result.theta, g.theta, state_theta, config.learning_rate);
          adagrad_step(result.phi, g.phi, state_phi, config.learning_rate);
        }
        elbo_sum += g.elbo;
      } else {
        PathwiseGrads g =
            pathwise_gradients(result.theta, result.phi, example, current, rng,
                               tape, config.share_phi_theta);
        if (config.share_phi_theta) {
          adagrad_step(result.theta, g.theta, state_theta, config.learning_rate);
          result.phi = result.theta;
        } else {
          adagrad_step(result.theta, g.theta, state_theta, config.learning_rate);
          adagrad_step(result.phi, g.phi, state_phi, config.learning_rate);
        }
        elbo_sum += g.elbo;
      }
    }
    const auto stop = std::chrono::steady_clock::now();
    EpochRecord record;
    record.temperature = current.temperature;
    record.mean_elbo = elbo_sum / static_cast<double>(dataset.size());
    record.seconds = std::chrono::duration<double>(stop - start).count();
    result.epochs.push_back(record);
    if (config.estimator == Estimator::kPathwise) {
      current.temperature *= config.anneal_ratio;
    }
  }
  return result;
}

double evaluate(const SnnParams& theta, const SnnParams& phi,
                std::span<const SpikeTrain> test_set,
                const TrainConfig& config, Rng& rng) {
  if (test_set.empty()) {
    throw std::invalid_argument("evaluate: empty test set");
  }
  double total = 0.0;
  for (const SpikeTrain& example : test_set) {
    double example_total = 0.0;
    for (int s = 0; s < config.eval_samples; ++s) {
      example_total += score_elbo_sample(theta, phi, example, config, rng);
    }
    total += example_total / config.eval_samples;
  }
  return total / static_cast<double>(test_set.size());
}

VarianceReport gradient_variance(Estimator estimator, const SnnParams& params,
                                 std::span<const SpikeTrain> dataset,
                                 const TrainConfig& config, int n_estimates,
                                 int workers) {
  if (n_estimates < 1) {
    throw std::invalid_argument("gradient_variance: need at least one estimate");
  }
  const std::vector<int> coords = phi_coordinates(params);
  Rng base(config.seed);
  std::vector<Rng> rngs;
  rngs.reserve(static_cast<std::size_t>(n_estimates));
  for (int e = 0; e < n_estimates; ++e) rngs.push_back(base.split());

  std::vector<std::vector<double>> estimates(
      static_cast<std::size_t>(n_estimates));
  auto run_range = [&](int begin, int end) {
    ad::Tape tape;
    for (int e = begin; e < end; ++e) {
      std::vector<double> grad(coords.size(), 0.0);
      for (const SpikeTrain& example : dataset) {
        std::vector<double> full =
            estimator == Estimator::kScore
                ? score_gradients(params, params, example, config, rngs[e],
                                  tape, false)
                      .phi
                : pathwise_gradients(params, params, example, config, rngs[e],
                                     tape, false)
                      .phi;
        for (std::size_t c = 0; c < coords.size(); ++c) {
          grad[c] += full[static_cast<std::size_t>(coords[c])];
        }
      }
      estimates[static_cast<std::size_t>(e)] = std::move(grad);
    }
  };

  if (workers <= 1) {
    run_range(0, n_estimates);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_estimates + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(n_estimates, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }

  // Mean per-coordinate sample standard deviation.
  double std_sum = 0.0;
  for (std::size_t c = 0; c < coords.size(); ++c) {
    double mean = 0.0;
    for (int e = 0; e < n_estimates; ++e) {
      mean += estimates[static_cast<std::size_t>(e)][c];
    }
    mean /= n_estimates;
    double ss = 0.0;
    for (int e = 0; e < n_estimates; ++e) {
      const double d = estimates[static_cast<std::size_t>(e)][c] - mean;
      ss += d * d;
    }
    std_sum += n_estimates > 1 ? std::sqrt(ss / (n_estimates - 1)) : 0.0;
  }
  VarianceReport report;
  report.mean_std = std_sum / static_cast<double>(coords.size());
  report.n_estimates = n_estimates;
  return report;
}

}  // namespace diffsnn
