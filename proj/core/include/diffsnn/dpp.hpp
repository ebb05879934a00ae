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
// Differentiable point process: a thinning-shaped sampler that keeps every
// base-process proposal and draws relaxed marks from the concrete
// distribution, the resulting conditional intensity, and the log-density
// of a realization. With marks on a tape, a realization is differentiable
// in the model parameters.

#ifndef DIFFSNN_DPP_HPP_
#define DIFFSNN_DPP_HPP_

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "diffsnn/autodiff.hpp"
#include "diffsnn/concrete.hpp"
#include "diffsnn/errors.hpp"
#include "diffsnn/point_process.hpp"
#include "diffsnn/rng.hpp"
#include "diffsnn/scalar_ops.hpp"

namespace diffsnn {

// Bound and temperature of a relaxed process. lambda_bar must dominate the
// wrapped model's summed intensity for every reachable history.
struct DppConfig {
  double lambda_bar = 0.0;
  double temperature = 0.0;
};

inline void validate(const DppConfig& config) {
  if (!(config.lambda_bar > 0.0) || !(config.temperature > 0.0)) {
    throw std::invalid_argument("DppConfig: bound and temperature must be positive");
  }
}

// Realization of a relaxed process. Every base-process proposal is kept,
// so events.size() == base_count. Marks are stored embedded in the full
// mark vector (linear scale); log_mark_ext keeps the sampler's log
// coordinates over the model's own dimensions plus the overflow
// coordinate, which densities prefer since the linear coordinates may
// underflow. The overflow coordinate itself is implicit in the mark
// (r = 1 - ||p||_1).
//
// stats caches the filtered history statistics at each event time. They
// depend only on (time, merged history), not on any parameters, so the
// joint and variational densities reuse them instead of rescanning the
// history; valid only alongside the clamped train they were sampled with.
// sampling_log_pi caches the extended categorical parameter each mark was
// drawn from; it is the density parameter under the sampling distribution
// itself, so the variational log-density can reuse it outright.
template <class S>
struct BasicDiffTrain {
  BasicTrain<S> train;
  std::vector<std::vector<S>> log_mark_ext;
  std::vector<std::vector<S>> stats;
  std::vector<std::vector<S>> sampling_log_pi;
  long base_count = 0;
};

using DiffTrain = BasicDiffTrain<double>;

// Model contract for relaxed sampling, duck-typed:
//   int dimension();                 // relaxed mark coordinates
//   int mark_size();                 // stored mark vector length
//   std::span<const int> mark_indices();
//   const EvalContext<S>& ctx();
//   std::vector<S> log_intensities(t, relaxed, clamped);
// and optionally log_pi_extended(t, relaxed, clamped, log_bound) when the
// model can produce the extended categorical parameter in a more stable
// form than the generic composition.
template <class S, class Model>
std::vector<S> dpp_log_pi(const Model& model, double t,
                          const BasicTrain<S>& relaxed,
                          const SpikeTrain& clamped, double log_lambda_bar) {
  if constexpr (requires {
                  model.log_pi_extended(t, relaxed, clamped, log_lambda_bar);
                }) {
    return model.log_pi_extended(t, relaxed, clamped, log_lambda_bar);
  } else {
    const std::vector<S> log_lambda = model.log_intensities(t, relaxed, clamped);
    return pi_bar_compose<S>(log_lambda, log_lambda_bar);
  }
}

// True when the model maps precomputed history statistics to the extended
// categorical parameter, letting densities reuse a sampler's cached scan.
template <class Model, class S>
concept StatsCapable = requires(const Model& m, std::span<const S> stats,
                                double log_bound) {
  { m.log_pi_from_stats(stats, log_bound) } -> std::same_as<std::vector<S>>;
};

// True when the model additionally maintains an incremental history index:
// the sampler then queries statistics in O(1) per proposal instead of
// rescanning the history.
template <class Model, class S>
concept SessionCapable =
    StatsCapable<Model, S> &&
    requires(const Model& m, const SpikeTrain& clamped, double t,
             std::span<const S> mark) {
      { m.make_stats_session(clamped) };
      { m.make_stats_session(clamped).append_relaxed(t, mark) };
      { m.make_stats_session(clamped).stats_at(t) } -> std::same_as<std::vector<S>>;
    };

// Extended log-probabilities for event i of a sampled train, through the
// cached statistics when available.
template <class S, class Model>
std::vector<S> dpp_event_log_pi(const Model& model, const DppConfig& config,
                                const BasicDiffTrain<S>& train, std::size_t i,
                                const SpikeTrain& clamped) {
  const double log_bound = std::log(config.lambda_bar);
  if constexpr (StatsCapable<Model, S>) {
    if (train.stats.size() == train.train.events.size()) {
      return model.log_pi_from_stats(train.stats[i], log_bound);
    }
  }
  return dpp_log_pi<S>(model, train.train.events[i].time, train.train, clamped,
                       log_bound);
}

// Relaxed thinning: proposals from a homogeneous process at lambda_bar,
// every proposal kept, marks drawn from the concrete distribution over the
// normalized intensities at the proposal time given clamped events merged
// with everything sampled so far. Consumes 1 uniform per proposal gap and
// dimension()+1 uniforms per mark.
template <class S, class Model, UniformSource U>
BasicDiffTrain<S> dpp_sample(const Model& model, const DppConfig& config,
                             double horizon, U& rng,
                             const SpikeTrain& clamped) {
  validate(config);
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("dpp_sample: horizon must be positive");
  }
  const double log_bound = std::log(config.lambda_bar);
  const std::span<const int> indices = model.mark_indices();
  BasicDiffTrain<S> out;
  out.train.horizon = horizon;

  auto draw_mark = [&](const std::vector<S>& log_pi, double t) {
    SimplexSample<S> sample =
        concrete_sample<S>(model.ctx(), log_pi, config.temperature, rng);
    std::vector<S> mark(static_cast<std::size_t>(model.mark_size()),
                        model.ctx().constant(0.0));
    for (std::size_t j = 0; j < indices.size(); ++j) {
      mark[static_cast<std::size_t>(indices[j])] = sample.coords[j];
    }
    out.train.events.push_back({t, std::move(mark)});
    out.log_mark_ext.push_back(std::move(sample.log_coords));
  };

  double t = 0.0;
  if constexpr (SessionCapable<Model, S>) {
    auto session = model.make_stats_session(clamped);
    while (true) {
      t += -std::log(rng.uniform01()) / config.lambda_bar;
      if (t > horizon) break;
      ++out.base_count;
      std::vector<S> stats = session.stats_at(t);
      std::vector<S> log_pi = model.log_pi_from_stats(stats, log_bound);
      draw_mark(log_pi, t);
      out.stats.push_back(std::move(stats));
      out.sampling_log_pi.push_back(std::move(log_pi));
      const BasicEvent<S>& appended = out.train.events.back();
      session.append_relaxed(appended.time, appended.mark);
    }
  } else {
    while (true) {
      t += -std::log(rng.uniform01()) / config.lambda_bar;
      if (t > horizon) break;
      ++out.base_count;
      draw_mark(dpp_log_pi<S>(model, t, out.train, clamped, log_bound), t);
    }
  }
  return out;
}

// Log-density of a realization under the distribution it was sampled
// from, through the cached sampling parameters: sum of log lambda_bar +
// log g_tau(mark; pi_sampling) minus the exact compensator. Only valid for
// the (model, config) pair that produced the train.
template <class S>
S dpp_log_density_sampled(const EvalContext<S>& ctx,
                          const BasicDiffTrain<S>& train,
                          const DppConfig& config) {
  validate(config);
  if (train.sampling_log_pi.size() != train.train.events.size() ||
      train.log_mark_ext.size() != train.train.events.size()) {
    throw std::invalid_argument(
        "dpp_log_density_sampled: train lacks sampling caches");
  }
  auto acc = make_lincomb(ctx);
  acc.add_const(-config.lambda_bar * train.train.horizon);
  for (std::size_t i = 0; i < train.train.events.size(); ++i) {
    const S density = concrete_log_density_logs<S>(
        ctx, train.log_mark_ext[i], train.sampling_log_pi[i],
        config.temperature);
    acc.add(density, 1.0);
    acc.add_const(std::log(config.lambda_bar));
  }
  return acc.commit();
}

// log lambda_del(t, p | history) = log lambda_bar + log g_tau([p; r]; pi).
template <class S, class Model>
S dpp_log_intensity_from_logs(const Model& model, const DppConfig& config,
                              double t, std::span<const S> log_mark_ext,
                              const BasicTrain<S>& relaxed,
                              const SpikeTrain& clamped) {
  const std::vector<S> log_pi =
      dpp_log_pi<S>(model, t, relaxed, clamped, std::log(config.lambda_bar));
  const S density = concrete_log_density_logs<S>(
      model.ctx(), log_mark_ext, log_pi, config.temperature);
  return density + std::log(config.lambda_bar);
}

// Extends a relaxed mark (model-dimension coordinates) to log
// coordinates including the overflow entry. Boundary coordinates give
// -inf entries; only meaningful for the plain-double path.
std::vector<double> log_mark_extended(std::span<const double> mark_coords);

// Conditional log-intensity at a relaxed mark given plain-double history.
template <class Model>
double dpp_log_conditional_intensity(double t,
                                     std::span<const double> mark_coords,
                                     const BasicTrain<double>& relaxed,
                                     const SpikeTrain& clamped,
                                     const Model& model,
                                     const DppConfig& config) {
  const std::vector<double> ext = log_mark_extended(mark_coords);
  for (double v : ext) {
    if (v == kNegInf) return kNegInf;  // density boundary
  }
  return dpp_log_intensity_from_logs<double>(model, config, t, ext, relaxed,
                                             clamped);
}

template <class Model>
double dpp_conditional_intensity(double t, std::span<const double> mark_coords,
                                 const BasicTrain<double>& relaxed,
                                 const SpikeTrain& clamped, const Model& model,
                                 const DppConfig& config) {
  return std::exp(dpp_log_conditional_intensity(t, mark_coords, relaxed,
                                                clamped, model, config));
}

// Log-density of a realization: sum of event log-intensities minus the
// compensator, which for a relaxed process is exactly lambda_bar * T (no
// Monte Carlo needed). Uses the stored log coordinates when present;
// otherwise reconstructs them from the linear marks, which requires every
// coordinate strictly inside the simplex.
template <class S, class Model>
S dpp_log_density(const BasicDiffTrain<S>& train, const Model& model,
                  const DppConfig& config, const SpikeTrain& clamped) {
  validate(config);
  auto acc = make_lincomb(model.ctx());
  acc.add_const(-config.lambda_bar * train.train.horizon);
  const bool have_logs = train.log_mark_ext.size() == train.train.events.size();
  for (std::size_t i = 0; i < train.train.events.size(); ++i) {
    const BasicEvent<S>& e = train.train.events[i];
    S term = [&] {
      if (have_logs) {
        const std::vector<S> log_pi =
            dpp_event_log_pi<S>(model, config, train, i, clamped);
        const S density = concrete_log_density_logs<S>(
            model.ctx(), train.log_mark_ext[i], log_pi, config.temperature);
        return density + std::log(config.lambda_bar);
      }
      if constexpr (std::is_same_v<S, double>) {
        std::vector<double> coords;
        coords.reserve(model.mark_indices().size());
        for (int idx : model.mark_indices()) {
          coords.push_back(e.mark[static_cast<std::size_t>(idx)]);
        }
        const std::vector<double> ext = log_mark_extended(coords);
        for (double v : ext) {
          if (v == kNegInf) {
            throw std::domain_error(
                "dpp_log_density: mark on the simplex boundary");
          }
        }
        return dpp_log_intensity_from_logs<double>(model, config, e.time, ext,
                                                   train.train, clamped);
      } else {
        throw std::invalid_argument(
            "dpp_log_density: taped trains must carry log coordinates");
      }
    }();
    acc.add(term, 1.0);
  }
  return acc.commit();
}

}  // namespace diffsnn

#endif  // DIFFSNN_DPP_HPP_
