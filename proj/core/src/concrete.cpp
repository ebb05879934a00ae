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

#include "diffsnn/concrete.hpp"

#include <cmath>

namespace diffsnn {

void validate_params(const ConcreteParams& params) {
  if (params.log_pi.size() < 2) {
    throw std::invalid_argument("ConcreteParams: need at least two categories");
  }
  for (double v : params.log_pi) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("ConcreteParams: log weights must be finite");
    }
  }
  if (!(params.temperature > 0.0)) {
    throw std::invalid_argument("ConcreteParams: temperature must be positive");
  }
}

double concrete_log_density(const SimplexPoint& p, const ConcreteParams& params) {
  validate_params(params);
  if (p.coords.size() != params.log_pi.size()) {
    throw std::invalid_argument("concrete_log_density: dimension mismatch");
  }
  std::vector<double> log_p;
  log_p.reserve(p.coords.size());
  for (double v : p.coords) {
    if (!(v > 0.0)) {
      throw std::domain_error(
          "concrete_log_density: point not in the open simplex");
    }
    log_p.push_back(std::log(v));
  }
  EvalContext<double> ctx;
  return concrete_log_density_logs<double>(ctx, log_p, params.log_pi,
                                           params.temperature);
}

}  // namespace diffsnn
