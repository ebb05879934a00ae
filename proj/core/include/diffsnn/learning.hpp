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
// Variational training of partially observed networks: ELBO estimation,
// the score-function and path-wise gradient estimators, AdaGrad with the
// diagonal-weight projection, the per-example training loop with
// temperature annealing, and evaluation by parameter transfer.

#ifndef DIFFSNN_LEARNING_HPP_
#define DIFFSNN_LEARNING_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "diffsnn/autodiff.hpp"
#include "diffsnn/dpp.hpp"
#include "diffsnn/point_process.hpp"
#include "diffsnn/rng.hpp"
#include "diffsnn/scalar_ops.hpp"
#include "diffsnn/snn.hpp"

namespace diffsnn {

enum class Estimator { kScore, kPathwise };

// All hyperparameters of a training run.
struct TrainConfig {
  double lambda_bar = 20.0;       // relaxed-process bound
  double temperature = 0.3;       // initial tau
  double anneal_ratio = 0.95;     // tau multiplier per epoch (path-wise)
  double learning_rate = 0.05;
  int epochs = 10;
  int compensator_samples = 100;  // M
  int elbo_samples = 1;           // hidden draws per gradient estimate
  int eval_samples = 10;          // hidden draws per test example
  Estimator estimator = Estimator::kScore;
  bool share_phi_theta = true;    // one parameter vector for model and q
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& config);

// Flat parameter coordinates: biases first, then weights in
// (from, to, l) order. Gradients and optimizer state use this layout.
struct ParamLayout {
  int dim = 0;
  int basis = 0;

  static ParamLayout of(const SnnParams& p) { return {p.dim(), p.basis()}; }
  int size() const { return dim + dim * dim * basis; }
  int bias(int d) const { return d; }
  int weight(int from, int to, int l) const {
    return dim + (from * dim + to) * basis + l;
  }
};

// Coordinates of the variational parameters: everything driving a hidden
// neuron (its bias and all incoming filter weights).
std::vector<int> phi_coordinates(const SnnParams& params);

// Parameters lifted onto a tape as leaves, flat handles alongside.
struct LiftedSnnParams {
  SnnParamsVar params;
  std::vector<ad::Var> flat;
};

LiftedSnnParams lift_params(ad::Tape& tape, const SnnParams& params);

std::vector<double> extract_gradient(const ad::GradientMap& grads,
                                     const LiftedSnnParams& lifted);

// Accumulated squared gradients, flat layout. Monotone nondecreasing.
struct AdaGradState {
  std::vector<double> sum_sq;
};

// Ascent step p += lr * g / sqrt(G + 1e-10), followed by the
// diagonal-weight projection w_{d,d,l} <- min(w, 0).
void adagrad_step(SnnParams& params, std::span<const double> grads,
                  AdaGradState& state, double learning_rate);

// ---- joint log-likelihoods --------------------------------------------------

// Fully observed log-likelihood of a one-hot train under the network,
// Monte-Carlo compensator over all dimensions. The double overload routes
// through the generic point-process likelihood.
template <UniformSource U>
double joint_log_lik_vanilla(const SnnParams& theta, const SpikeTrain& train,
                             int num_samples, U& rng) {
  return log_likelihood(SnnIntensityModel::full(theta), train, num_samples, rng);
}

namespace detail {

inline std::vector<int> all_dims(int dim) {
  std::vector<int> out(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) out[static_cast<std::size_t>(d)] = d;
  return out;
}

}  // namespace detail

// Taped twin of joint_log_lik_vanilla; mirrors its arithmetic term by term
// so the primal matches the double path bitwise.
template <class S, UniformSource U>
S joint_log_lik_vanilla_t(const EvalContext<S>& ctx,
                          const SnnParamsT<S>& theta, const SpikeTrain& train,
                          int num_samples, U& rng) {
  using std::log;
  if (num_samples < 1) {
    throw std::invalid_argument("joint_log_lik_vanilla: need at least one sample");
  }
  const SpikeTrain* fixed[1] = {&train};
  auto acc = make_lincomb(ctx);
  for (const MarkedEvent& e : train.events) {
    const int d = one_hot_index(e.mark);
    const int ns[1] = {d};
    S u = membrane_potentials<S>(ctx, theta, e.time, fixed, nullptr, ns)[0];
    acc.add(log(intensity_from_potential<S>(u, theta.amplitude)), 1.0);
  }
  const std::vector<int> dims = detail::all_dims(theta.dim());
  auto mc = make_lincomb(ctx);
  for (int m = 0; m < num_samples; ++m) {
    const double t = rng.uniform01() * train.horizon;
    std::vector<S> u = membrane_potentials<S>(ctx, theta, t, fixed, nullptr, dims);
    for (const S& v : u) {
      mc.add(intensity_from_potential<S>(v, theta.amplitude), 1.0);
    }
  }
  acc.add(mc.commit(), -(train.horizon / num_samples));
  return acc.commit();
}

// log q(T_H; phi) for the score path: hidden one-hot events given the
// observed train, Monte-Carlo compensator over hidden dimensions. Mirrors
// log_likelihood over the hidden-conditional model bitwise.
template <class S, UniformSource U>
S hidden_log_lik_t(const EvalContext<S>& ctx, const SnnParamsT<S>& phi,
                   const SpikeTrain& observed, const SpikeTrain& hidden_train,
                   int num_samples, U& rng) {
  using std::log;
  const SpikeTrain* fixed[2] = {&observed, &hidden_train};
  auto acc = make_lincomb(ctx);
  for (const MarkedEvent& e : hidden_train.events) {
    const int d = one_hot_index(e.mark);
    const int ns[1] = {d};
    S u = membrane_potentials<S>(ctx, phi, e.time, fixed, nullptr, ns)[0];
    acc.add(log(intensity_from_potential<S>(u, phi.amplitude)), 1.0);
  }
  auto mc = make_lincomb(ctx);
  for (int m = 0; m < num_samples; ++m) {
    const double t = rng.uniform01() * hidden_train.horizon;
    std::vector<S> u =
        membrane_potentials<S>(ctx, phi, t, fixed, nullptr, phi.hidden);
    for (const S& v : u) {
      mc.add(intensity_from_potential<S>(v, phi.amplitude), 1.0);
    }
  }
  acc.add(mc.commit(), -(hidden_train.horizon / num_samples));
  return acc.commit();
}

// Joint log-likelihood of observed one-hot events and a relaxed hidden
// train: observed event terms, relaxed-event intensity terms, the exact
// relaxed compensator -lambda_bar*T, and a Monte-Carlo estimate of the
// observable compensator.
template <class S, UniformSource U>
S joint_log_lik_dsnn(const EvalContext<S>& ctx, const SnnParamsT<S>& theta,
                     const SpikeTrain& observed,
                     const BasicDiffTrain<S>& relaxed, int num_samples, U& rng,
                     const DppConfig& config) {
  using std::log;
  if (num_samples < 1) {
    throw std::invalid_argument("joint_log_lik_dsnn: need at least one sample");
  }
  const RelaxedSnnModel<S> hidden_model(ctx, &theta);
  SnnHistoryStats<S> session(ctx, theta.dim(), theta.kernel_centers);
  session.add_fixed(observed);
  for (const BasicEvent<S>& e : relaxed.train.events) {
    session.append_relaxed(e.time, e.mark);
  }
  auto acc = make_lincomb(ctx);
  for (const MarkedEvent& e : observed.events) {
    const int d = one_hot_index(e.mark);
    const int ns[1] = {d};
    const std::vector<S> stats = session.stats_at(e.time);
    S u = potentials_from_stats<S>(ctx, theta, stats, ns)[0];
    acc.add(log(intensity_from_potential<S>(u, theta.amplitude)), 1.0);
  }
  const bool cached_stats =
      relaxed.stats.size() == relaxed.train.events.size();
  std::vector<S> log_pi_buf;
  for (std::size_t i = 0; i < relaxed.train.events.size(); ++i) {
    if (cached_stats) {
      hidden_model.log_pi_from_stats_into(relaxed.stats[i],
                                          std::log(config.lambda_bar),
                                          log_pi_buf);
    } else {
      log_pi_buf = dpp_event_log_pi<S>(hidden_model, config, relaxed, i,
                                       observed);
    }
    const S density = concrete_log_density_logs<S>(
        ctx, relaxed.log_mark_ext[i], log_pi_buf, config.temperature);
    acc.add(density, 1.0);
    acc.add_const(std::log(config.lambda_bar));
  }
  acc.add_const(-config.lambda_bar * observed.horizon);
  auto mc = make_lincomb(ctx);
  for (int m = 0; m < num_samples; ++m) {
    const double t = rng.uniform01() * observed.horizon;
    const std::vector<S> stats = session.stats_at(t);
    std::vector<S> u =
        potentials_from_stats<S>(ctx, theta, stats, theta.observable);
    for (const S& v : u) {
      mc.add(intensity_from_potential<S>(v, theta.amplitude), 1.0);
    }
  }
  acc.add(mc.commit(), -(observed.horizon / num_samples));
  return acc.commit();
}

// ---- single-sample ELBO terms ----------------------------------------------

// One score-path draw of log p - log q: hidden train from the vanilla
// variational network by thinning, both likelihoods in plain doubles.
template <UniformSource U>
double score_elbo_sample(const SnnParams& theta, const SnnParams& phi,
                         const SpikeTrain& observed, const TrainConfig& config,
                         U& rng) {
  if (theta.hidden.empty()) {
    return joint_log_lik_vanilla(theta, observed, config.compensator_samples, rng);
  }
  const SnnIntensityModel q_model =
      SnnIntensityModel::hidden_conditional(phi, observed);
  const SpikeTrain hidden_train =
      thinning_sample(q_model, observed.horizon, rng);
  const double log_p = joint_log_lik_vanilla(
      theta, merge_trains(observed, hidden_train), config.compensator_samples, rng);
  const double log_q =
      log_likelihood(q_model, hidden_train, config.compensator_samples, rng);
  return log_p - log_q;
}

// One path-wise draw of log p - log q: hidden train from the relaxed
// process under phi, generic over the scalar type so the identical noise
// can be replayed through the plain-double path for finite differences.
template <class S, UniformSource U>
S pathwise_elbo_term(const EvalContext<S>& ctx, const SnnParamsT<S>& theta,
                     const SnnParamsT<S>& phi, const SpikeTrain& observed,
                     const TrainConfig& config, U& rng) {
  if (theta.hidden.empty()) {
    return joint_log_lik_vanilla_t<S>(ctx, theta, observed,
                                      config.compensator_samples, rng);
  }
  const DppConfig dcfg{config.lambda_bar, config.temperature};
  const RelaxedSnnModel<S> q_model(ctx, &phi);
  const BasicDiffTrain<S> relaxed =
      dpp_sample<S>(q_model, dcfg, observed.horizon, rng, observed);
  S log_p = joint_log_lik_dsnn<S>(ctx, theta, observed, relaxed,
                                  config.compensator_samples, rng, dcfg);
  // log q under the distribution the train was just drawn from: the
  // sampler's own parameters are its density parameters.
  S log_q = dpp_log_density_sampled<S>(ctx, relaxed, dcfg);
  return log_p - log_q;
}

template <UniformSource U>
double pathwise_elbo_sample(const SnnParams& theta, const SnnParams& phi,
                            const SpikeTrain& observed,
                            const TrainConfig& config, U& rng) {
  EvalContext<double> ctx;
  return pathwise_elbo_term<double>(ctx, theta, phi, observed, config, rng);
}

// Monte-Carlo ELBO estimate under the configured estimator.
double elbo_estimate(const SnnParams& theta, const SnnParams& phi,
                     const SpikeTrain& observed, const TrainConfig& config,
                     Rng& rng);

// ---- gradient estimators ----------------------------------------------------

struct ScoreGrads {
  std::vector<double> theta;
  std::vector<double> phi;
  double elbo = 0.0;
};

// Score-function estimates from shared hidden draws:
//   d/d theta:  E_q[d log p / d theta]
//   d/d phi:    E_q[d log q / d phi * (elbo_sample - 1)]
ScoreGrads score_gradients(const SnnParams& theta, const SnnParams& phi,
                           const SpikeTrain& observed,
                           const TrainConfig& config, Rng& rng,
                           ad::Tape& tape, bool share);

struct PathwiseGrads {
  std::vector<double> theta;
  std::vector<double> phi;
  double elbo = 0.0;
};

// Path-wise estimate: one tape through sampling and both likelihoods,
// reverse sweep from the ELBO draw. With shared parameters the theta and
// phi gradients coincide (one leaf set receives both contributions).
PathwiseGrads pathwise_gradients(const SnnParams& theta, const SnnParams& phi,
                                 const SpikeTrain& observed,
                                 const TrainConfig& config, Rng& rng,
                                 ad::Tape& tape, bool share);

// Spec'd single-purpose views of the above.
std::vector<double> grad_theta(const SnnParams& theta, const SnnParams& phi,
                               const SpikeTrain& observed,
                               const TrainConfig& config, Rng& rng,
                               ad::Tape& tape);
std::vector<double> grad_phi_score(const SnnParams& theta,
                                   const SnnParams& phi,
                                   const SpikeTrain& observed,
                                   const TrainConfig& config, Rng& rng,
                                   ad::Tape& tape);
std::vector<double> grad_phi_pathwise(const SnnParams& theta,
                                      const SnnParams& phi,
                                      const SpikeTrain& observed,
                                      const TrainConfig& config, Rng& rng,
                                      ad::Tape& tape);

// ---- training and evaluation ------------------------------------------------

struct EpochRecord {
  double temperature = 0.0;
  double mean_elbo = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  SnnParams theta;
  SnnParams phi;
  std::vector<EpochRecord> epochs;
};

// Stochastic gradient ascent, one example per step, examples shuffled per
// epoch. The path-wise variant anneals the temperature geometrically after
// every epoch. Deterministic in config.seed.
TrainResult train(const TrainConfig& config, const SnnParams& initial,
                  std::span<const SpikeTrain> dataset);

// Mean test ELBO under the vanilla (score-path) variational distribution,
// regardless of how the parameters were trained; eval_samples hidden draws
// per example.
double evaluate(const SnnParams& theta, const SnnParams& phi,
                std::span<const SpikeTrain> test_set,
                const TrainConfig& config, Rng& rng);

struct VarianceReport {
  double mean_std = 0.0;
  int n_estimates = 0;
};

// Repeats the whole-dataset phi-gradient estimate and reports the mean
// per-coordinate standard deviation over the variational coordinates.
// Estimates fan out over a worker pool; results are deterministic in the
// seed regardless of worker count.
VarianceReport gradient_variance(Estimator estimator, const SnnParams& params,
                                 std::span<const SpikeTrain> dataset,
                                 const TrainConfig& config, int n_estimates,
                                 int workers);

}  // namespace diffsnn

#endif  // DIFFSNN_LEARNING_HPP_
