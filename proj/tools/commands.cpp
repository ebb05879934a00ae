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

#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "diffsnn/io.hpp"
#include "diffsnn/point_process.hpp"
#include "diffsnn/rng.hpp"
#include "diffsnn/snn.hpp"
#include "json.hpp"

namespace diffsnn::tools {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void print_effective(const ExperimentConfig& config, const char* command) {
  std::cout << "[" << command << "] effective configuration:\n"
            << config.echo() << std::flush;
}

json config_json(const ExperimentConfig& config) {
  json j;
  j["echo"] = config.echo();
  j["seed"] = config.seed;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << j.dump(2) << "\n";
}

// Observed projection: drop hidden-neuron events, keep full-width marks.
SpikeTrain project_observed(const SpikeTrain& full,
                            std::span<const int> observable) {
  SpikeTrain out;
  out.horizon = full.horizon;
  for (const MarkedEvent& e : full.events) {
    const int d = one_hot_index(e.mark);
    for (int o : observable) {
      if (o == d) {
        out.events.push_back(e);
        break;
      }
    }
  }
  return out;
}

SnnParams initial_params(const ExperimentConfig& config) {
  Rng rng(config.seed);
  return init_params(rng, config.dim, config.basis, config.amplitude,
                     config.kernel_centers, config.observable_ids());
}

json epochs_json(const TrainResult& result) {
  json epochs = json::array();
  for (const EpochRecord& r : result.epochs) {
    epochs.push_back({{"temperature", r.temperature},
                      {"mean_train_elbo", r.mean_elbo},
                      {"seconds", r.seconds}});
  }
  return epochs;
}

}  // namespace

void cmd_generate(const ExperimentConfig& config, const std::string& out_dir) {
  print_effective(config, "generate");
  fs::create_directories(out_dir);
  Rng rng(config.seed);
  const SnnParams truth =
      init_params(rng, config.dim, config.basis, config.amplitude,
                  config.kernel_centers, config.observable_ids());
  const SnnIntensityModel model = SnnIntensityModel::full(truth);

  std::vector<SpikeTrain> train_full;
  std::vector<SpikeTrain> test_full;
  std::vector<SpikeTrain> train_obs;
  std::vector<SpikeTrain> test_obs;
  for (int i = 0; i < config.n_train + config.n_test; ++i) {
    SpikeTrain full = thinning_sample(model, config.horizon, rng);
    SpikeTrain obs = project_observed(full, truth.observable);
    if (i < config.n_train) {
      train_full.push_back(std::move(full));
      train_obs.push_back(std::move(obs));
    } else {
      test_full.push_back(std::move(full));
      test_obs.push_back(std::move(obs));
    }
  }

  const fs::path dir(out_dir);
  write_snn_params((dir / "params_true.json").string(), truth);
  write_trains((dir / "train.jsonl").string(), train_obs);
  write_trains((dir / "test.jsonl").string(), test_obs);
  write_trains((dir / "train_full.jsonl").string(), train_full);
  write_trains((dir / "test_full.jsonl").string(), test_full);

  json manifest = config_json(config);
  manifest["command"] = "generate";
  manifest["n_train"] = config.n_train;
  manifest["n_test"] = config.n_test;
  write_json(dir / "manifest.json", manifest);
  std::cout << "[generate] wrote " << config.n_train << " train + "
            << config.n_test << " test trains to " << out_dir << "\n";
}

void cmd_train(const ExperimentConfig& config, const std::string& data_path,
               const std::string& out_dir,
               const std::string& init_params_path) {
  print_effective(config, "train");
  const std::vector<SpikeTrain> dataset = read_trains(data_path);
  const SnnParams initial = init_params_path.empty()
                                ? initial_params(config)
                                : read_snn_params(init_params_path);
  const TrainResult result =
      train(config.train_config(), initial, dataset);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_snn_params((dir / "params_theta.json").string(), result.theta);
  write_snn_params((dir / "params_phi.json").string(), result.phi);

  json manifest = config_json(config);
  manifest["command"] = "train";
  manifest["data"] = data_path;
  manifest["n_examples"] = dataset.size();
  manifest["estimator"] = config.estimator;
  manifest["share_phi_theta"] = config.resolved_share();
  manifest["epochs"] = epochs_json(result);
  write_json(dir / "manifest.json", manifest);

  for (std::size_t e = 0; e < result.epochs.size(); ++e) {
    std::cout << "[train] epoch " << e + 1 << "/" << result.epochs.size()
              << " tau=" << result.epochs[e].temperature
              << " mean_elbo=" << result.epochs[e].mean_elbo
              << " seconds=" << result.epochs[e].seconds << "\n";
  }
  std::cout << "[train] wrote parameters to " << out_dir << "\n";
}

double cmd_eval(const ExperimentConfig& config, const std::string& params_path,
                const std::string& phi_params_path,
                const std::string& data_path, const std::string& out_csv) {
  print_effective(config, "eval");
  const SnnParams theta = read_snn_params(params_path);
  const SnnParams phi = phi_params_path.empty()
                            ? theta
                            : read_snn_params(phi_params_path);
  if (phi.dim() != theta.dim() || phi.basis() != theta.basis()) {
    throw std::invalid_argument("eval: parameter shapes do not match");
  }
  const std::vector<SpikeTrain> test_set = read_trains(data_path);
  if (!test_set.empty() &&
      static_cast<int>(test_set[0].events.empty()
                           ? theta.dim()
                           : test_set[0].events[0].mark.size()) != theta.dim()) {
    throw std::invalid_argument("eval: data dimension does not match params");
  }
  Rng rng(config.seed);
  const double mean_elbo =
      evaluate(theta, phi, test_set, config.train_config(), rng);
  std::cout << "[eval] mean test ELBO = " << mean_elbo << " over "
            << test_set.size() << " trains\n";
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    out << "mean_test_elbo,n_examples,eval_samples,seed\n";
    out << mean_elbo << "," << test_set.size() << "," << config.eval_samples
        << "," << config.seed << "\n";
  }
  return mean_elbo;
}

void cmd_grad_variance(const ExperimentConfig& config,
                       const std::string& data_path,
                       const std::string& params_path,
                       const std::string& out_csv) {
  print_effective(config, "grad-variance");
  const std::vector<SpikeTrain> dataset = read_trains(data_path);
  const SnnParams setting = params_path.empty()
                                ? initial_params(config)
                                : read_snn_params(params_path);
  const int workers = config.resolved_workers();
  std::ofstream out;
  if (!out_csv.empty()) {
    out.open(out_csv);
    out << "estimator,n_estimates,mean_std\n";
  }
  for (Estimator estimator : {Estimator::kScore, Estimator::kPathwise}) {
    const VarianceReport report =
        gradient_variance(estimator, setting, dataset, config.train_config(),
                          config.n_variance_estimates, workers);
    const char* name = estimator == Estimator::kScore ? "score" : "pathwise";
    std::cout << "[grad-variance] " << name << ": mean per-coordinate std = "
              << report.mean_std << " over " << report.n_estimates
              << " estimates\n";
    if (out.is_open()) {
      out << name << "," << report.n_estimates << "," << report.mean_std
          << "\n";
    }
  }
}

BenchSummary cmd_bench(const ExperimentConfig& config,
                       const std::string& data_path,
                       const std::string& out_csv) {
  print_effective(config, "bench");
  const std::vector<SpikeTrain> dataset = read_trains(data_path);
  std::ofstream out;
  if (!out_csv.empty()) {
    out.open(out_csv);
    out << "amplitude,method,seconds_per_epoch\n";
  }
  BenchSummary summary;
  int rows = 0;
  for (int a = 1; a <= config.bench_amplitude_max; ++a) {
    for (Estimator estimator : {Estimator::kScore, Estimator::kPathwise}) {
      ExperimentConfig run = config;
      run.amplitude = static_cast<double>(a);
      run.estimator = estimator == Estimator::kScore ? "score" : "pathwise";
      run.share_phi_theta = -1;
      run.lambda_bar =
          run.amplitude * static_cast<double>(run.dim - run.n_observable);
      const SnnParams initial = initial_params(run);
      const TrainResult result =
          train(run.train_config(), initial, dataset);
      double seconds = 0.0;
      for (const EpochRecord& r : result.epochs) seconds += r.seconds;
      seconds /= static_cast<double>(result.epochs.size());
      if (estimator == Estimator::kScore) {
        summary.score_mean_seconds += seconds;
      } else {
        summary.pathwise_mean_seconds += seconds;
      }
      if (out.is_open()) {
        out << a << "," << run.estimator << "," << seconds << "\n";
      }
      ++rows;
      std::cout << "[bench] a=" << a << " " << run.estimator << ": "
                << seconds << " s/epoch\n";
    }
  }
  summary.score_mean_seconds /= config.bench_amplitude_max;
  summary.pathwise_mean_seconds /= config.bench_amplitude_max;
  summary.ratio = summary.pathwise_mean_seconds / summary.score_mean_seconds;
  std::cout << "[bench] " << rows << " rows; pathwise/score per-epoch ratio = "
            << summary.ratio << "\n";
  return summary;
}

}  // namespace diffsnn::tools
