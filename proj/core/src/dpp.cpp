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

#include "diffsnn/dpp.hpp"

#include <cmath>

namespace diffsnn {

std::vector<double> log_mark_extended(std::span<const double> mark_coords) {
  std::vector<double> out;
  out.reserve(mark_coords.size() + 1);
  double sum = 0.0;
  for (double p : mark_coords) {
    if (p < 0.0 || p > 1.0) {
      throw std::domain_error("log_mark_extended: coordinate outside [0, 1]");
    }
    sum += p;
    out.push_back(p > 0.0 ? std::log(p) : kNegInf);
  }
  const double overflow = 1.0 - sum;
  if (overflow < -1e-9) {
    throw std::domain_error("log_mark_extended: coordinates sum above 1");
  }
  out.push_back(overflow > 0.0 ? std::log(overflow) : kNegInf);
  return out;
}

}  // namespace diffsnn
