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

#include "diffsnn/point_process.hpp"

#include <cmath>

namespace diffsnn {

void validate_train(const SpikeTrain& train) {
  if (!(train.horizon > 0.0)) {
    throw std::invalid_argument("SpikeTrain: horizon must be positive");
  }
  double prev = 0.0;
  for (const MarkedEvent& e : train.events) {
    if (!(e.time > prev) || !(e.time <= train.horizon)) {
      throw std::invalid_argument(
          "SpikeTrain: times must be strictly increasing in (0, horizon]");
    }
    prev = e.time;
    double sum = 0.0;
    for (double p : e.mark) {
      if (!(p >= 0.0) || !(p <= 1.0)) {
        throw std::invalid_argument("SpikeTrain: mark entries must be in [0, 1]");
      }
      sum += p;
    }
    if (sum > 1.0 + 1e-9) {
      throw std::invalid_argument("SpikeTrain: mark l1 norm exceeds 1");
    }
  }
}

int one_hot_index(std::span<const double> mark) {
  int hot = -1;
  for (std::size_t d = 0; d < mark.size(); ++d) {
    if (mark[d] == 1.0 && hot < 0) {
      hot = static_cast<int>(d);
    } else if (mark[d] != 0.0) {
      throw std::invalid_argument("one_hot_index: mark is not one-hot");
    }
  }
  if (hot < 0) {
    throw std::invalid_argument("one_hot_index: mark is not one-hot");
  }
  return hot;
}

SpikeTrain merge_trains(const SpikeTrain& a, const SpikeTrain& b) {
  SpikeTrain out;
  out.horizon = std::max(a.horizon, b.horizon);
  out.events.reserve(a.events.size() + b.events.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.events.size() || j < b.events.size()) {
    const bool take_a =
        j >= b.events.size() ||
        (i < a.events.size() && a.events[i].time <= b.events[j].time);
    out.events.push_back(take_a ? a.events[i++] : b.events[j++]);
  }
  return out;
}

double IntensityModel::eval(double t, std::span<const double> mark,
                            const SpikeTrain& history) const {
  if (static_cast<int>(mark.size()) != dimension()) {
    throw std::invalid_argument("IntensityModel::eval: mark dimension mismatch");
  }
  const std::vector<double> lambda = intensities(t, history);
  double out = 0.0;
  for (std::size_t d = 0; d < mark.size(); ++d) out += mark[d] * lambda[d];
  return out;
}

std::vector<double> rescaled_intervals(const IntensityModel& model,
                                       const SpikeTrain& train,
                                       int quadrature_points) {
  if (quadrature_points < 2) {
    throw std::invalid_argument(
        "rescaled_intervals: need at least two quadrature points");
  }
  if (train.events.empty()) {
    throw std::invalid_argument("rescaled_intervals: empty train");
  }
  std::vector<double> intervals;
  intervals.reserve(train.events.size());
  for (std::size_t n = 0; n + 1 < train.events.size(); ++n) {
    const double a = train.events[n].time;
    const double b = train.events[n + 1].time;
    const double h = (b - a) / quadrature_points;
    double integral = 0.0;
    for (int j = 0; j < quadrature_points; ++j) {
      const double s = a + (j + 0.5) * h;
      const std::vector<double> lambda = model.intensities(s, train);
      double total = 0.0;
      for (double v : lambda) total += v;
      integral += total * h;
    }
    intervals.push_back(integral);
  }
  return intervals;
}

}  // namespace diffsnn
