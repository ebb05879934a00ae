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
// Experiment configuration shared by the command-line drivers. Values come
// from, in increasing precedence: built-in defaults, a flat key-value
// config file ("key = value" lines, '#' comments), and command-line flags.

#ifndef DIFFSNN_TOOLS_EXPERIMENT_HPP_
#define DIFFSNN_TOOLS_EXPERIMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "diffsnn/learning.hpp"

namespace diffsnn::tools {

struct ExperimentConfig {
  // Network shape.
  int dim = 6;
  int n_observable = 2;  // observable neurons are ids 0 .. n_observable-1
  int basis = 2;
  std::vector<double> kernel_centers{0.0, 10.0};
  double amplitude = 5.0;
  double horizon = 50.0;

  // Training.
  double lambda_bar = 20.0;  // defaults to amplitude * |hidden|
  double temperature = 0.3;
  double anneal_ratio = 0.95;
  double learning_rate = 0.05;
  int epochs = 10;
  int compensator_samples = 100;
  int elbo_samples = 1;
  int eval_samples = 10;
  std::string estimator = "score";  // "score" | "pathwise"
  // -1: follow the estimator (score shares, path-wise keeps phi separate).
  int share_phi_theta = -1;
  std::uint64_t seed = 0;

  // Experiment scale.
  int n_train = 10;
  int n_test = 100;
  int n_param_settings = 5;
  int n_variance_estimates = 1000;
  int workers = 0;  // 0: one per hardware thread
  int bench_amplitude_max = 20;

  Estimator estimator_kind() const;
  bool resolved_share() const;
  std::vector<int> observable_ids() const;
  TrainConfig train_config() const;
  int resolved_workers() const;

  // Human- and machine-readable echo, one "key = value" per line; parsing
  // it back reproduces the configuration.
  std::string echo() const;
};

// Applies "key = value" lines from a config file.
void apply_config_file(ExperimentConfig& config, const std::string& path);

// Applies a single key/value pair; throws std::invalid_argument for
// unknown keys or unparsable values.
void apply_key_value(ExperimentConfig& config, const std::string& key,
                     const std::string& value);

}  // namespace diffsnn::tools

#endif  // DIFFSNN_TOOLS_EXPERIMENT_HPP_
