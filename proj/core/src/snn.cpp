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

#include "diffsnn/snn.hpp"

#include <cmath>

#include "diffsnn/dpp.hpp"

namespace diffsnn {

namespace {

double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform01();
}

std::vector<int> complement(int dim, std::span<const int> subset) {
  std::vector<bool> in(static_cast<std::size_t>(dim), false);
  for (int d : subset) {
    if (d < 0 || d >= dim) {
      throw std::invalid_argument("observable index out of range");
    }
    in[static_cast<std::size_t>(d)] = true;
  }
  std::vector<int> out;
  for (int d = 0; d < dim; ++d) {
    if (!in[static_cast<std::size_t>(d)]) out.push_back(d);
  }
  return out;
}

}  // namespace

SnnParams init_params(Rng& rng, int dim, int basis, double amplitude,
                      std::vector<double> kernel_centers,
                      std::vector<int> observable) {
  if (dim < 1 || basis < 1 ||
      static_cast<int>(kernel_centers.size()) != basis) {
    throw std::invalid_argument("init_params: inconsistent sizes");
  }
  if (!(amplitude > 0.0)) {
    throw std::invalid_argument("init_params: amplitude must be positive");
  }
  std::sort(observable.begin(), observable.end());
  SnnParams params;
  params.kernel_centers = std::move(kernel_centers);
  params.amplitude = amplitude;
  params.hidden = complement(dim, observable);
  params.observable = std::move(observable);
  params.u_bar.resize(static_cast<std::size_t>(dim));
  for (int d = 0; d < dim; ++d) {
    params.u_bar[static_cast<std::size_t>(d)] = uniform_in(rng, -1.0, 1.0);
  }
  params.weights.resize(static_cast<std::size_t>(dim * dim * basis));
  for (int from = 0; from < dim; ++from) {
    for (int to = 0; to < dim; ++to) {
      for (int l = 0; l < basis; ++l) {
        params.weight(from, to, l) = from == to
                                         ? uniform_in(rng, -5.0, -0.1)
                                         : uniform_in(rng, -5.0, 5.0);
      }
    }
  }
  return params;
}

double filter_value(const SnnParams& params, int from, int to, double s) {
  if (s < 0.0) return 0.0;
  double out = 0.0;
  for (int l = 0; l < params.basis(); ++l) {
    out += params.weight(from, to, l) *
           epanechnikov(s - params.kernel_centers[static_cast<std::size_t>(l)]);
  }
  return out;
}

double snn_intensity(double t, std::span<const double> mark,
                     const SpikeTrain& history, const SnnParams& params) {
  const int d = one_hot_index(mark);
  EvalContext<double> ctx;
  const double u = membrane_potential<double>(ctx, params, d, t, history);
  return intensity_from_potential<double>(u, params.amplitude);
}

double dsnn_intensity(double t, std::span<const double> mark,
                      const SpikeTrain& observed,
                      const BasicTrain<double>& relaxed,
                      const SnnParams& params, const DppConfig& config) {
  if (static_cast<int>(mark.size()) != params.dim()) {
    throw std::invalid_argument("dsnn_intensity: mark dimension mismatch");
  }
  // Observable branch: exactly one unit entry, at an observable neuron.
  bool one_hot = true;
  int hot = -1;
  for (std::size_t d = 0; d < mark.size(); ++d) {
    if (mark[d] == 1.0 && hot < 0) {
      hot = static_cast<int>(d);
    } else if (mark[d] != 0.0) {
      one_hot = false;
    }
  }
  if (one_hot && hot >= 0) {
    for (int o : params.observable) {
      if (o == hot) {
        EvalContext<double> ctx;
        SnnHistoryStats<double> session(ctx, params.dim(),
                                        params.kernel_centers);
        session.add_fixed(observed);
        for (const MarkedEvent& e : relaxed.events) {
          session.append_relaxed(e.time, e.mark);
        }
        const int ns[1] = {hot};
        const double u = potentials_from_stats<double>(
            ctx, params, session.stats_at(t), ns)[0];
        return intensity_from_potential<double>(u, params.amplitude);
      }
    }
  }
  // Hidden branch: supported on hidden coordinates, inside convzero.
  double sum = 0.0;
  for (std::size_t d = 0; d < mark.size(); ++d) {
    if (!(mark[d] >= 0.0)) {
      throw std::domain_error("dsnn_intensity: negative mark entry");
    }
    sum += mark[d];
  }
  if (sum > 1.0 + 1e-9) {
    throw std::domain_error("dsnn_intensity: mark l1 norm exceeds 1");
  }
  std::vector<double> coords;
  coords.reserve(params.hidden.size());
  {
    std::vector<bool> is_hidden(mark.size(), false);
    for (int h : params.hidden) is_hidden[static_cast<std::size_t>(h)] = true;
    for (std::size_t d = 0; d < mark.size(); ++d) {
      if (!is_hidden[d] && mark[d] != 0.0) {
        throw std::domain_error(
            "dsnn_intensity: mark neither observable one-hot nor hidden");
      }
    }
    for (int h : params.hidden) coords.push_back(mark[static_cast<std::size_t>(h)]);
  }
  EvalContext<double> ctx;
  const RelaxedSnnModel<double> model(ctx, &params);
  return dpp_conditional_intensity(t, coords, relaxed, observed, model, config);
}

double variational_intensity(double t, std::span<const double> mark,
                             const SpikeTrain& observed,
                             const BasicTrain<double>& relaxed,
                             const SnnParams& var_params) {
  const int d = one_hot_index(mark);
  bool hidden = false;
  for (int h : var_params.hidden) hidden = hidden || h == d;
  if (!hidden) {
    throw std::domain_error("variational_intensity: mark not a hidden neuron");
  }
  EvalContext<double> ctx;
  SnnHistoryStats<double> session(ctx, var_params.dim(),
                                  var_params.kernel_centers);
  session.add_fixed(observed);
  for (const MarkedEvent& e : relaxed.events) {
    session.append_relaxed(e.time, e.mark);
  }
  const int ns[1] = {d};
  const double u = potentials_from_stats<double>(ctx, var_params,
                                                 session.stats_at(t), ns)[0];
  return intensity_from_potential<double>(u, var_params.amplitude);
}

SnnIntensityModel SnnIntensityModel::full(SnnParams params) {
  std::vector<int> active(static_cast<std::size_t>(params.dim()));
  for (int d = 0; d < params.dim(); ++d) active[static_cast<std::size_t>(d)] = d;
  const double bound = params.amplitude * params.dim();
  return SnnIntensityModel(std::move(params), std::move(active), SpikeTrain{},
                           false, bound);
}

SnnIntensityModel SnnIntensityModel::hidden_conditional(SnnParams params,
                                                        SpikeTrain observed) {
  std::vector<int> active = params.hidden;
  const double bound =
      params.amplitude * static_cast<double>(params.hidden.size());
  return SnnIntensityModel(std::move(params), std::move(active),
                           std::move(observed), true, bound);
}

std::vector<double> SnnIntensityModel::intensities(
    double t, const SpikeTrain& history) const {
  EvalContext<double> ctx;
  const SpikeTrain* fixed[2] = {has_clamped_ ? &clamped_ : nullptr, &history};
  const std::vector<double> u =
      membrane_potentials<double>(ctx, params_, t, fixed, nullptr, active_);
  std::vector<double> out(static_cast<std::size_t>(params_.dim()), 0.0);
  for (std::size_t i = 0; i < active_.size(); ++i) {
    out[static_cast<std::size_t>(active_[i])] =
        intensity_from_potential<double>(u[i], params_.amplitude);
  }
  return out;
}

}  // namespace diffsnn
