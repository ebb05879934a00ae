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
// Probabilistic spiking neural network on the spike-response model:
// membrane potentials as filtered spike history, an Epanechnikov filter
// bank, sigmoid-amplitude firing intensities, the relaxed-mark variant and
// its variational twin. All evaluation code is generic over the scalar
// type, so the same formulas run on plain doubles or on a gradient tape
// with bit-identical primal values.

#ifndef DIFFSNN_SNN_HPP_
#define DIFFSNN_SNN_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "diffsnn/autodiff.hpp"
#include "diffsnn/concrete.hpp"
#include "diffsnn/errors.hpp"
#include "diffsnn/point_process.hpp"
#include "diffsnn/rng.hpp"
#include "diffsnn/scalar_ops.hpp"

namespace diffsnn {

// Network parameters. Biases and filter weights are the learnable part
// (scalar type S); kernel centers and the amplitude are fixed
// configuration. Diagonal filter weights must stay <= 0: a neuron's own
// spikes may only depress its potential (reset behavior).
template <class S>
struct SnnParamsT {
  std::vector<S> u_bar;                // D resting potentials
  std::vector<S> weights;              // D*D*L, index (from, to, l)
  std::vector<double> kernel_centers;  // L, seconds
  double amplitude = 5.0;              // per-neuron intensity ceiling
  std::vector<int> observable;         // sorted neuron ids
  std::vector<int> hidden;             // sorted complement

  int dim() const { return static_cast<int>(u_bar.size()); }
  int basis() const { return static_cast<int>(kernel_centers.size()); }

  int windex(int from, int to, int l) const {
    return (from * dim() + to) * basis() + l;
  }
  const S& weight(int from, int to, int l) const {
    return weights[static_cast<std::size_t>(windex(from, to, l))];
  }
  S& weight(int from, int to, int l) {
    return weights[static_cast<std::size_t>(windex(from, to, l))];
  }

  // Events older than this lag can never reach a potential (compact kernel
  // support), so history scans stay local.
  double memory_window() const {
    double m = 0.0;
    for (double s : kernel_centers) m = std::max(m, s);
    return m + 1.0;
  }
};

using SnnParams = SnnParamsT<double>;
using SnnParamsVar = SnnParamsT<ad::Var>;

// Epanechnikov kernel, max{3/4 (1 - s^2), 0}. Support (-1, 1).
inline double epanechnikov(double s) {
  return max0(0.75 * (1.0 - s * s));
}

// Random initialization: biases U[-1, 1], off-diagonal filter weights
// U[-5, 5], diagonal filter weights U[-5, -0.1]. Deterministic in the rng
// state; draw order is biases first, then weights in (from, to, l) order.
SnnParams init_params(Rng& rng, int dim, int basis, double amplitude,
                      std::vector<double> kernel_centers,
                      std::vector<int> observable);

// Filter response f_{from,to}(s): weighted kernel bank for s >= 0 and
// exactly 0 for s < 0, so future events never leak backwards.
double filter_value(const SnnParams& params, int from, int to, double s);

// Filtered mark statistics at time t. For each (source d', basis l) this
// is  sum over history events (t', p), t' < t,  of kappa(t - t' - s_l) *
// p_{d'}. Marks enter linearly: events from the fixed trains (plain
// doubles) fold into the constant term, relaxed events contribute scalar-S
// terms. Returned flat with index d' * L + l.
template <class S>
std::vector<S> filter_mark_stats(const EvalContext<S>& ctx, int dim,
                                 std::span<const double> centers, double t,
                                 std::span<const SpikeTrain* const> fixed,
                                 const BasicTrain<S>* relaxed) {
  const int basis = static_cast<int>(centers.size());
  using Lin = typename ScalarTraits<S>::Lin;
  // Reused accumulators: the parent buffers persist across calls, which
  // keeps this scan allocation-free on the hot path.
  static thread_local std::vector<Lin> acc;
  if (acc.size() < static_cast<std::size_t>(dim * basis)) {
    acc.resize(static_cast<std::size_t>(dim * basis), make_lincomb(ctx));
  }
  for (int i = 0; i < dim * basis; ++i) {
    rebind_lincomb(acc[static_cast<std::size_t>(i)], ctx);
  }

  auto scan_fixed = [&](const SpikeTrain& train) {
    for (int l = 0; l < basis; ++l) {
      const double lo = t - centers[static_cast<std::size_t>(l)] - 1.0;
      const double hi =
          std::min(t, t - centers[static_cast<std::size_t>(l)] + 1.0);
      auto it = std::lower_bound(
          train.events.begin(), train.events.end(), lo,
          [](const MarkedEvent& e, double v) { return e.time <= v; });
      for (; it != train.events.end() && it->time < hi; ++it) {
        const double k =
            epanechnikov(t - it->time - centers[static_cast<std::size_t>(l)]);
        if (k == 0.0) continue;
        for (int d = 0; d < dim; ++d) {
          const double p = it->mark[static_cast<std::size_t>(d)];
          if (p != 0.0) acc[static_cast<std::size_t>(d * basis + l)].add_const(k * p);
        }
      }
    }
  };
  for (const SpikeTrain* train : fixed) {
    if (train != nullptr) scan_fixed(*train);
  }

  if (relaxed != nullptr) {
    for (int l = 0; l < basis; ++l) {
      const double lo = t - centers[static_cast<std::size_t>(l)] - 1.0;
      const double hi =
          std::min(t, t - centers[static_cast<std::size_t>(l)] + 1.0);
      auto it = std::lower_bound(
          relaxed->events.begin(), relaxed->events.end(), lo,
          [](const BasicEvent<S>& e, double v) { return e.time <= v; });
      for (; it != relaxed->events.end() && it->time < hi; ++it) {
        const double k =
            epanechnikov(t - it->time - centers[static_cast<std::size_t>(l)]);
        if (k == 0.0) continue;
        for (int d = 0; d < dim; ++d) {
          const S& p = it->mark[static_cast<std::size_t>(d)];
          if (scalar_value(p) != 0.0) {
            acc[static_cast<std::size_t>(d * basis + l)].add(p, k);
          }
        }
      }
    }
  }

  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(dim * basis));
  for (int i = 0; i < dim * basis; ++i) {
    out.push_back(acc[static_cast<std::size_t>(i)].commit());
  }
  return out;
}

// Filtered history statistics through moment prefix sums. The kernel is
// quadratic on its support, so for events inside the window
//   sum_e kappa(t - t_e - s_l) p_e
//     = 0.75 [ (1 - d^2) M0 + 2 d M1 - M2 ],   d = t - s_l - c,
// with M_k the k-th moments of (t_e - c) weighted by the marks. Moments
// are kept as prefix sums over the event sequence, centered per fixed-width
// time block so the running sums stay O(block mass) and window differences
// never cancel catastrophically. A query then touches six prefix entries
// per (source, basis, block segment) instead of every event in the window.
//
// Queries at time t only ever read events strictly before t, so a fully
// built index answers historical queries for any time point.
template <class S>
class SnnHistoryStats {
 public:
  SnnHistoryStats(const EvalContext<S>& ctx, int dim,
                  std::vector<double> centers)
      : ctx_(ctx), dim_(dim), centers_(std::move(centers)) {
    relaxed_.start(ctx_, dim_);
  }

  // Fixed (plain-double) train; its moments fold into the constant part.
  void add_fixed(const SpikeTrain& train) {
    EvalContext<double> dctx;
    Moments<double> index;
    index.start(dctx, dim_);
    for (const MarkedEvent& e : train.events) {
      index.append(dctx, e.time, e.mark);
    }
    fixed_.push_back(std::move(index));
  }

  // Relaxed events, appended in time order.
  void append_relaxed(double time, std::span<const S> mark) {
    relaxed_.append(ctx_, time, mark);
  }

  // stats[d' * L + l] at time t over everything appended so far.
  std::vector<S> stats_at(double t) const {
    using Lin = typename ScalarTraits<S>::Lin;
    const int basis = static_cast<int>(centers_.size());
    static thread_local std::vector<Lin> acc;
    if (acc.size() < static_cast<std::size_t>(dim_ * basis)) {
      acc.resize(static_cast<std::size_t>(dim_ * basis), make_lincomb(ctx_));
    }
    for (int i = 0; i < dim_ * basis; ++i) {
      rebind_lincomb(acc[static_cast<std::size_t>(i)], ctx_);
    }
    for (int l = 0; l < basis; ++l) {
      const double delta = t - centers_[static_cast<std::size_t>(l)];
      const double lo = delta - 1.0;
      const double hi = std::min(t, delta + 1.0);
      if (!(hi > lo)) continue;
      for (const Moments<double>& f : fixed_) {
        f.accumulate(acc.data(), basis, l, delta, lo, hi,
                     [](Lin& bucket, double hi_v, double lo_v, double w) {
                       bucket.add_const(w * hi_v);
                       bucket.add_const((-w) * lo_v);
                     });
      }
      relaxed_.accumulate(acc.data(), basis, l, delta, lo, hi,
                          [](Lin& bucket, const S& hi_v, const S& lo_v,
                             double w) {
                            if constexpr (std::is_same_v<S, double>) {
                              bucket.add_const(w * hi_v);
                              bucket.add_const((-w) * lo_v);
                            } else {
                              bucket.add(hi_v, w);
                              bucket.add(lo_v, -w);
                            }
                          });
    }
    std::vector<S> out;
    out.reserve(static_cast<std::size_t>(dim_ * basis));
    for (int i = 0; i < dim_ * basis; ++i) {
      out.push_back(acc[static_cast<std::size_t>(i)].commit());
    }
    return out;
  }

 private:
  // Block width trades segment count against moment magnitude: windows are
  // at most 2 wide, so a width of 10 keeps most queries to one segment
  // while |t - c| <= 5 bounds the running moments.
  static constexpr double kBlockWidth = 10.0;

  static double block_center(double time) {
    return (std::floor(time / kBlockWidth) + 0.5) * kBlockWidth;
  }

  // Prefix moments of one event sequence. Row r of `prefix` holds, per
  // coordinate, the sums of (t_e - c_e)^k * p_e over the first r events.
  // Segments inside one block share a center, so differences of rows give
  // the block-local moments exactly.
  template <class M>
  struct Moments {
    std::vector<double> times;
    std::vector<double> block_centers;
    std::vector<M> prefix;  // (n+1) rows of dim * 3
    int dim = 0;

    template <class C>
    void start(const C& ctx, int dimension) {
      dim = dimension;
      prefix.assign(static_cast<std::size_t>(3 * dim), ctx.constant(0.0));
    }

    template <class C, class Mark>
    void append(const C& ctx, double time, const Mark& mark) {
      const double c = block_center(time);
      const double x = time - c;
      const std::size_t row = 3 * static_cast<std::size_t>(dim);
      const std::size_t base = prefix.size();
      prefix.resize(base + row);
      for (int d = 0; d < dim; ++d) {
        const auto& p = mark[static_cast<std::size_t>(d)];
        for (int k = 0; k < 3; ++k) {
          const std::size_t at = base + static_cast<std::size_t>(3 * d + k);
          const std::size_t prev = at - row;
          if (scalar_value(p) == 0.0) {
            prefix[at] = prefix[prev];  // untouched coordinate
            continue;
          }
          const double coeff = k == 0 ? 1.0 : (k == 1 ? x : x * x);
          auto lin = make_lincomb(ctx);
          lin.add(prefix[prev], 1.0);
          lin.add(p, coeff);
          prefix[at] = lin.commit();
        }
      }
      times.push_back(time);
      block_centers.push_back(c);
    }

    // Window contribution for basis l, split at block boundaries. The
    // add callback receives the prefix entries at the segment end and
    // start plus the moment weight.
    template <class Acc, class Add>
    void accumulate(Acc* acc, int basis, int l, double delta, double lo,
                    double hi, const Add& add) const {
      const std::size_t row = 3 * static_cast<std::size_t>(dim);
      std::size_t i = static_cast<std::size_t>(
          std::upper_bound(times.begin(), times.end(), lo) - times.begin());
      const std::size_t stop = static_cast<std::size_t>(
          std::lower_bound(times.begin(), times.end(), hi) - times.begin());
      while (i < stop) {
        const double c = block_centers[i];
        std::size_t j = i;
        while (j < stop && block_centers[j] == c) ++j;
        const double d = delta - c;
        const double w[3] = {0.75 * (1.0 - d * d), 1.5 * d, -0.75};
        for (int dd = 0; dd < dim; ++dd) {
          auto& bucket = acc[dd * basis + l];
          const std::size_t hi_base = j * row + static_cast<std::size_t>(3 * dd);
          const std::size_t lo_base = i * row + static_cast<std::size_t>(3 * dd);
          for (int k = 0; k < 3; ++k) {
            add(bucket, prefix[hi_base + static_cast<std::size_t>(k)],
                prefix[lo_base + static_cast<std::size_t>(k)], w[k]);
          }
        }
        i = j;
      }
    }
  };

  EvalContext<S> ctx_;
  int dim_;
  std::vector<double> centers_;
  std::vector<Moments<double>> fixed_;
  Moments<S> relaxed_;
};

// Membrane potentials for the requested neurons from precomputed filtered
// statistics: u_d = u_bar_d + sum_{d',l} w_{d',d,l} * stats_{d',l}. The
// statistics depend only on the history and the time point, never on the
// parameters, so one set serves any parameter vector.
template <class S>
void potentials_into(const EvalContext<S>& ctx, const SnnParamsT<S>& params,
                     std::span<const S> stats, std::span<const int> neurons,
                     std::vector<S>& out) {
  const int dim = params.dim();
  const int basis = params.basis();
  static thread_local typename ScalarTraits<S>::Lin acc = make_lincomb(ctx);
  out.clear();
  out.reserve(neurons.size());
  for (int d : neurons) {
    rebind_lincomb(acc, ctx);
    acc.add(params.u_bar[static_cast<std::size_t>(d)], 1.0);
    for (int from = 0; from < dim; ++from) {
      for (int l = 0; l < basis; ++l) {
        acc.add_product(
            params.weights[static_cast<std::size_t>(params.windex(from, d, l))],
            stats[static_cast<std::size_t>(from * basis + l)]);
      }
    }
    out.push_back(acc.commit());
  }
}

template <class S>
std::vector<S> potentials_from_stats(const EvalContext<S>& ctx,
                                     const SnnParamsT<S>& params,
                                     std::span<const S> stats,
                                     std::span<const int> neurons) {
  std::vector<S> out;
  potentials_into<S>(ctx, params, stats, neurons, out);
  return out;
}

// Potentials with one shared history scan.
template <class S>
std::vector<S> membrane_potentials(const EvalContext<S>& ctx,
                                   const SnnParamsT<S>& params, double t,
                                   std::span<const SpikeTrain* const> fixed,
                                   const BasicTrain<S>* relaxed,
                                   std::span<const int> neurons) {
  const std::vector<S> stats = filter_mark_stats<S>(
      ctx, params.dim(), params.kernel_centers, t, fixed, relaxed);
  return potentials_from_stats<S>(ctx, params, stats, neurons);
}

// Single-neuron potential over one history train (one-hot or relaxed
// marks).
template <class S>
S membrane_potential(const EvalContext<S>& ctx, const SnnParamsT<S>& params,
                     int neuron, double t, const BasicTrain<S>& history) {
  const int ns[1] = {neuron};
  return membrane_potentials<S>(ctx, params, t, {}, &history, ns)[0];
}

// Firing intensity of one neuron: amplitude-scaled sigmoid of its
// potential, strictly inside (0, amplitude) for finite potentials.
template <class S>
S intensity_from_potential(const S& u, double amplitude) {
  return sigmoid_amp(u, amplitude);
}

// log intensity in the cancellation-free form log a + log sigmoid(u); used
// wherever the value feeds a log-scale probability vector.
template <class S>
S log_intensity_from_potential(const EvalContext<S>&, const S& u,
                               double amplitude) {
  return log_sigmoid(u) + std::log(amplitude);
}

// Vanilla intensity lambda(t, p | history) = p . sigma(u(t)); p one-hot.
double snn_intensity(double t, std::span<const double> mark,
                     const SpikeTrain& history, const SnnParams& params);

struct DppConfig;

// Relaxed-network intensity: an observable one-hot mark gets the vanilla
// sigmoid intensity; a mark supported on hidden coordinates with l1 norm
// <= 1 gets the relaxed-process intensity over the hidden neurons. The
// history is the merged observed train plus relaxed events. A mark fitting
// neither branch is a domain error.
double dsnn_intensity(double t, std::span<const double> mark,
                      const SpikeTrain& observed,
                      const BasicTrain<double>& relaxed,
                      const SnnParams& params, const DppConfig& config);

// Variational intensity for hidden neurons, driven by the merged
// observed/relaxed history under its own parameters.
double variational_intensity(double t, std::span<const double> mark,
                             const SpikeTrain& observed,
                             const BasicTrain<double>& relaxed,
                             const SnnParams& var_params);

// Vanilla network as an IntensityModel. `full` models all D neurons with
// bound a*D; `hidden_conditional` models the hidden neurons driven by a
// fixed observed train, with the tight bound a*|H| (observable dimensions
// report zero intensity).
class SnnIntensityModel final : public IntensityModel {
 public:
  static SnnIntensityModel full(SnnParams params);
  static SnnIntensityModel hidden_conditional(SnnParams params,
                                              SpikeTrain observed);

  int dimension() const override { return params_.dim(); }
  double upper_bound() const override { return bound_; }
  std::vector<double> intensities(double t,
                                  const SpikeTrain& history) const override;

  const SnnParams& params() const { return params_; }

 private:
  SnnIntensityModel(SnnParams params, std::vector<int> active,
                    SpikeTrain clamped, bool has_clamped, double bound)
      : params_(std::move(params)),
        active_(std::move(active)),
        clamped_(std::move(clamped)),
        has_clamped_(has_clamped),
        bound_(bound) {}

  SnnParams params_;
  std::vector<int> active_;
  SpikeTrain clamped_;
  bool has_clamped_;
  double bound_;
};

// Hidden-neuron intensity vector for relaxed-mark sampling. Exposes the
// extended log-probability vector directly: with sigmoid intensities and
// bound a*B the overflow mass is a*[(B - |H|) + sum_d sigmoid(-u_d)],
// which stays accurate even when every sigmoid saturates. Requires
// lambda_bar >= a*|H|.
template <class S>
class RelaxedSnnModel {
 public:
  RelaxedSnnModel(const EvalContext<S>& ctx, const SnnParamsT<S>* params)
      : ctx_(ctx), params_(params) {
    if (params_->hidden.empty()) {
      throw std::invalid_argument("RelaxedSnnModel: no hidden neurons");
    }
  }

  int dimension() const { return static_cast<int>(params_->hidden.size()); }
  int mark_size() const { return params_->dim(); }
  std::span<const int> mark_indices() const { return params_->hidden; }
  const EvalContext<S>& ctx() const { return ctx_; }

  // Incremental history index seeded with the clamped train; the sampler
  // appends relaxed events as it draws them and queries statistics at each
  // proposal. Statistics are parameter-independent so they are shared
  // between the model and variational parameter vectors.
  SnnHistoryStats<S> make_stats_session(const SpikeTrain& clamped) const {
    SnnHistoryStats<S> session(ctx_, params_->dim(), params_->kernel_centers);
    session.add_fixed(clamped);
    return session;
  }

  // One-off statistics at t (stateless convenience over a session).
  std::vector<S> compute_stats(double t, const BasicTrain<S>& relaxed,
                               const SpikeTrain& clamped) const {
    SnnHistoryStats<S> session = make_stats_session(clamped);
    for (const BasicEvent<S>& e : relaxed.events) {
      session.append_relaxed(e.time, e.mark);
    }
    return session.stats_at(t);
  }

  std::vector<S> hidden_potentials(double t, const BasicTrain<S>& relaxed,
                                   const SpikeTrain& clamped) const {
    const std::vector<S> stats = compute_stats(t, relaxed, clamped);
    return potentials_from_stats<S>(ctx_, *params_, stats, params_->hidden);
  }

  std::vector<S> log_intensities(double t, const BasicTrain<S>& relaxed,
                                 const SpikeTrain& clamped) const {
    std::vector<S> u = hidden_potentials(t, relaxed, clamped);
    std::vector<S> out;
    out.reserve(u.size());
    for (const S& v : u) {
      out.push_back(
          log_intensity_from_potential<S>(ctx_, v, params_->amplitude));
    }
    return out;
  }

  // Extended log-weights for the concrete draw, up to one common additive
  // constant (-log B): the softmax and the concrete density are invariant
  // under uniform shifts, so the normalization is never materialized.
  // Entries are log sigmoid(u_d); the overflow entry is
  // log[(B - |H|) + sum_d sigmoid(-u_d)], whose complementary sigmoids
  // stay exact even when every sigmoid saturates.
  void log_pi_from_stats_into(std::span<const S> stats, double log_lambda_bar,
                              std::vector<S>& out) const {
    const double a = params_->amplitude;
    const double nh = static_cast<double>(params_->hidden.size());
    const double log_b = log_lambda_bar - std::log(a);  // log(lambda_bar / a)
    const double b = std::exp(log_b);
    if (b < nh * (1.0 - 1e-12)) {
      throw ContractViolation("RelaxedSnnModel: bound below a*|hidden|");
    }
    static thread_local std::vector<S> u;
    potentials_into<S>(ctx_, *params_, stats, params_->hidden, u);
    out.clear();
    out.reserve(u.size() + 1);
    for (const S& v : u) {
      out.push_back(log_sigmoid(v));
    }
    static thread_local std::vector<S> comp;
    comp.clear();
    comp.reserve(u.size() + 1);
    if (b - nh > 0.0) {
      comp.push_back(ctx_.constant(std::log(b - nh)));
    }
    for (const S& v : u) {
      comp.push_back(log_sigmoid_of_neg(v));
    }
    out.push_back(log_sum_exp(std::span<const S>(comp)));
  }

  std::vector<S> log_pi_from_stats(std::span<const S> stats,
                                   double log_lambda_bar) const {
    std::vector<S> out;
    log_pi_from_stats_into(stats, log_lambda_bar, out);
    return out;
  }

  std::vector<S> log_pi_extended(double t, const BasicTrain<S>& relaxed,
                                 const SpikeTrain& clamped,
                                 double log_lambda_bar) const {
    const std::vector<S> stats = compute_stats(t, relaxed, clamped);
    return log_pi_from_stats(stats, log_lambda_bar);
  }

 private:
  EvalContext<S> ctx_;
  const SnnParamsT<S>* params_;
};

}  // namespace diffsnn

#endif  // DIFFSNN_SNN_HPP_
