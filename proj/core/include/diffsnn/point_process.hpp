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
// Marked-point-process machinery: the event/train data model, the
// intensity-model contract, the homogeneous Poisson and thinning samplers,
// log-likelihood with a Monte-Carlo compensator, and the time-rescaling
// diagnostic.

#ifndef DIFFSNN_POINT_PROCESS_HPP_
#define DIFFSNN_POINT_PROCESS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "diffsnn/concrete.hpp"
#include "diffsnn/errors.hpp"
#include "diffsnn/numerics.hpp"
#include "diffsnn/rng.hpp"

namespace diffsnn {

// One event: a time stamp and a D-dimensional mark. Marks are one-hot for
// vanilla processes and lie in convzero (entries >= 0, l1 norm <= 1) for
// relaxed ones. The scalar type is double for observed data and ad::Var
// for marks living on a tape.
template <class S>
struct BasicEvent {
  double time = 0.0;
  std::vector<S> mark;
};

// Time-ordered event sequence over [0, horizon].
template <class S>
struct BasicTrain {
  std::vector<BasicEvent<S>> events;
  double horizon = 0.0;

  // Events strictly before t: the left-continuous history n(t). An event
  // at exactly t is not part of its own history.
  std::span<const BasicEvent<S>> history_before(double t) const {
    auto it = std::lower_bound(
        events.begin(), events.end(), t,
        [](const BasicEvent<S>& e, double v) { return e.time < v; });
    return {events.data(), static_cast<std::size_t>(it - events.begin())};
  }
};

using MarkedEvent = BasicEvent<double>;
using SpikeTrain = BasicTrain<double>;

// Throws std::invalid_argument unless times are strictly increasing in
// (0, horizon] and every mark lies in convzero of the one-hot set.
void validate_train(const SpikeTrain& train);

// Index of the single unit entry of a one-hot mark.
int one_hot_index(std::span<const double> mark);

// Union of two trains, ordered by time; ties keep `a` first.
SpikeTrain merge_trains(const SpikeTrain& a, const SpikeTrain& b);

// Behavioral contract for a D-variate conditional intensity. Implementors
// must be non-negative everywhere, keep the summed intensity at or below
// upper_bound() for every reachable history, and ignore events at times
// >= t. Divergence and right-continuity of the compensator are obligations
// on the implementor; they are verified in tests for the shipped models
// but are not machine-checkable in general.
class IntensityModel {
 public:
  virtual ~IntensityModel() = default;

  virtual int dimension() const = 0;
  // Constant dominating bound on the summed intensity.
  virtual double upper_bound() const = 0;
  // Per-dimension intensities at t given the events of `history` with
  // time < t. Entries may be exactly zero.
  virtual std::vector<double> intensities(double t,
                                          const SpikeTrain& history) const = 0;

  // lambda(t, p | history) for a (possibly relaxed) mark p.
  double eval(double t, std::span<const double> mark,
              const SpikeTrain& history) const;
};

// Event times of a homogeneous Poisson process on (0, horizon]: successive
// exponential gaps.
template <UniformSource U>
std::vector<double> sample_homogeneous_poisson(double rate, double horizon,
                                               U& rng) {
  if (!(rate > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument(
        "sample_homogeneous_poisson: rate and horizon must be positive");
  }
  std::vector<double> times;
  double t = 0.0;
  while (true) {
    t += -std::log(rng.uniform01()) / rate;
    if (t > horizon) break;
    times.push_back(t);
  }
  return times;
}

// Thinning sampler. Proposals come from a homogeneous base process at the
// model's upper bound; each proposal is classified by a categorical draw
// over the normalized intensity vector extended with an overflow category,
// and dropped when the overflow category comes up. A model whose summed
// intensity exceeds the bound at any query aborts with ContractViolation.
template <UniformSource U>
SpikeTrain thinning_sample(const IntensityModel& model, double horizon,
                           U& rng) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("thinning_sample: horizon must be positive");
  }
  const double bound = model.upper_bound();
  if (!(bound > 0.0)) {
    throw std::invalid_argument("thinning_sample: upper_bound must be positive");
  }
  const int dim = model.dimension();
  const double log_bound = std::log(bound);
  SpikeTrain train;
  train.horizon = horizon;
  std::vector<double> log_lambda(static_cast<std::size_t>(dim));
  double t = 0.0;
  while (true) {
    t += -std::log(rng.uniform01()) / bound;
    if (t > horizon) break;
    const std::vector<double> lambda = model.intensities(t, train);
    for (int d = 0; d < dim; ++d) {
      log_lambda[static_cast<std::size_t>(d)] =
          lambda[static_cast<std::size_t>(d)] > 0.0
              ? std::log(lambda[static_cast<std::size_t>(d)])
              : kNegInf;
    }
    const std::vector<double> log_pi =
        pi_bar_compose<double>(log_lambda, log_bound);
    const int k = gumbel_max_index(log_pi, rng);
    if (k != dim) {  // overflow category rejects the proposal
      std::vector<double> mark(static_cast<std::size_t>(dim), 0.0);
      mark[static_cast<std::size_t>(k)] = 1.0;
      train.events.push_back({t, std::move(mark)});
    }
  }
  return train;
}

// Monte-Carlo estimate of the integrated total intensity over [0, T]:
// (T/M) sum_m sum_d lambda(t_m, 1_d | history), t_m i.i.d. U[0, T].
template <UniformSource U>
double compensator_mc(const IntensityModel& model, const SpikeTrain& train,
                      int num_samples, U& rng) {
  if (num_samples < 1) {
    throw std::invalid_argument("compensator_mc: need at least one sample");
  }
  const double horizon = train.horizon;
  double total = 0.0;
  for (int m = 0; m < num_samples; ++m) {
    const double t = rng.uniform01() * horizon;
    const std::vector<double> lambda = model.intensities(t, train);
    for (double v : lambda) total += v;
  }
  return horizon / num_samples * total;
}

// Log-likelihood of a train: event log-intensities minus the Monte-Carlo
// compensator. An event with zero intensity under the model yields -inf.
template <UniformSource U>
double log_likelihood(const IntensityModel& model, const SpikeTrain& train,
                      int num_samples, U& rng) {
  double sum = 0.0;
  for (const MarkedEvent& e : train.events) {
    sum += std::log(model.eval(e.time, e.mark, train));
  }
  return sum - compensator_mc(model, train, num_samples, rng);
}

// Integrated total intensity between consecutive events, by midpoint
// quadrature. Under the true model these increments are i.i.d. Exp(1)
// (time-rescaling); used as a sampler diagnostic, not in the training path.
std::vector<double> rescaled_intervals(const IntensityModel& model,
                                       const SpikeTrain& train,
                                       int quadrature_points);

}  // namespace diffsnn

#endif  // DIFFSNN_POINT_PROCESS_HPP_
