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
// Command implementations behind the CLI subcommands. Kept as a library so
// the test suites can drive them directly.

#ifndef DIFFSNN_TOOLS_COMMANDS_HPP_
#define DIFFSNN_TOOLS_COMMANDS_HPP_

#include <string>

#include "experiment.hpp"

namespace diffsnn::tools {

// Synthetic data generation: ground-truth parameters drawn from the
// documented initialization, full trains sampled by thinning, observed
// projections plus full trains (debugging) and the parameters written to
// out_dir. Deterministic in the seed.
void cmd_generate(const ExperimentConfig& config, const std::string& out_dir);

// Trains on a JSON-Lines dataset of observed trains. Initial parameters
// are drawn from the seed unless init_params_path is given (so a finished
// run can be reloaded; epochs = 0 returns it unchanged). Writes learned
// theta/phi parameters and a run manifest.
void cmd_train(const ExperimentConfig& config, const std::string& data_path,
               const std::string& out_dir,
               const std::string& init_params_path);

// Mean test ELBO under the vanilla variational distribution. phi defaults
// to theta when phi_params_path is empty. Appends a CSV row when out_csv
// is non-empty; returns the score.
double cmd_eval(const ExperimentConfig& config, const std::string& params_path,
                const std::string& phi_params_path,
                const std::string& data_path, const std::string& out_csv);

// Gradient-variance study: repeated whole-dataset estimates for both
// estimators at a fixed parameter setting (params_path, or re-drawn from
// the seed when empty); CSV rows (estimator, n_estimates, mean_std).
void cmd_grad_variance(const ExperimentConfig& config,
                       const std::string& data_path,
                       const std::string& params_path,
                       const std::string& out_csv);

struct BenchSummary {
  double score_mean_seconds = 0.0;
  double pathwise_mean_seconds = 0.0;
  double ratio = 0.0;
};

// Timing sweep: amplitudes 1..bench_amplitude_max for both estimators,
// mean wall-clock seconds per epoch each; CSV rows
// (amplitude, method, seconds_per_epoch). Runs serially so timings do not
// interfere.
BenchSummary cmd_bench(const ExperimentConfig& config,
                       const std::string& data_path,
                       const std::string& out_csv);

}  // namespace diffsnn::tools

#endif  // DIFFSNN_TOOLS_COMMANDS_HPP_
