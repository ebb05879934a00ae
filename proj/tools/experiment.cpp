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

#include "experiment.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace diffsnn::tools {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_doubles(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(std::stod(trim(item)));
  }
  return out;
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("expected a boolean, got '" + value + "'");
}

}  // namespace

Estimator ExperimentConfig::estimator_kind() const {
  if (estimator == "score") return Estimator::kScore;
  if (estimator == "pathwise") return Estimator::kPathwise;
  throw std::invalid_argument("estimator must be 'score' or 'pathwise'");
}

bool ExperimentConfig::resolved_share() const {
  if (share_phi_theta >= 0) return share_phi_theta != 0;
  // The score path shares one parameter vector between model and
  // variational distribution; the path-wise path trains them separately.
  return estimator_kind() == Estimator::kScore;
}

std::vector<int> ExperimentConfig::observable_ids() const {
  std::vector<int> ids;
  for (int d = 0; d < n_observable; ++d) ids.push_back(d);
  return ids;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig tc;
  tc.lambda_bar = lambda_bar;
  tc.temperature = temperature;
  tc.anneal_ratio = anneal_ratio;
  tc.learning_rate = learning_rate;
  tc.epochs = epochs;
  tc.compensator_samples = compensator_samples;
  tc.elbo_samples = elbo_samples;
  tc.eval_samples = eval_samples;
  tc.estimator = estimator_kind();
  tc.share_phi_theta = resolved_share();
  tc.seed = seed;
  return tc;
}

int ExperimentConfig::resolved_workers() const {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string ExperimentConfig::echo() const {
  std::ostringstream out;
  out << "dim = " << dim << "\n";
  out << "n_observable = " << n_observable << "\n";
  out << "basis = " << basis << "\n";
  out << "kernel_centers = ";
  for (std::size_t l = 0; l < kernel_centers.size(); ++l) {
    if (l > 0) out << ", ";
    out << kernel_centers[l];
  }
  out << "\n";
  out << "amplitude = " << amplitude << "\n";
  out << "horizon = " << horizon << "\n";
  out << "lambda_bar = " << lambda_bar << "\n";
  out << "temperature = " << temperature << "\n";
  out << "anneal_ratio = " << anneal_ratio << "\n";
  out << "learning_rate = " << learning_rate << "\n";
  out << "epochs = " << epochs << "\n";
  out << "compensator_samples = " << compensator_samples << "\n";
  out << "elbo_samples = " << elbo_samples << "\n";
  out << "eval_samples = " << eval_samples << "\n";
  out << "estimator = " << estimator << "\n";
  out << "share_phi_theta = "
      << (share_phi_theta < 0 ? std::string("auto")
                              : std::string(share_phi_theta ? "true" : "false"))
      << "\n";
  out << "seed = " << seed << "\n";
  out << "n_train = " << n_train << "\n";
  out << "n_test = " << n_test << "\n";
  out << "n_param_settings = " << n_param_settings << "\n";
  out << "n_variance_estimates = " << n_variance_estimates << "\n";
  out << "workers = " << workers << "\n";
  out << "bench_amplitude_max = " << bench_amplitude_max << "\n";
  return out.str();
}

void apply_key_value(ExperimentConfig& c, const std::string& key,
                     const std::string& value) {
  if (key == "dim") {
    c.dim = std::stoi(value);
  } else if (key == "n_observable") {
    c.n_observable = std::stoi(value);
  } else if (key == "basis") {
    c.basis = std::stoi(value);
  } else if (key == "kernel_centers") {
    c.kernel_centers = parse_doubles(value);
    c.basis = static_cast<int>(c.kernel_centers.size());
  } else if (key == "amplitude") {
    c.amplitude = std::stod(value);
  } else if (key == "horizon") {
    c.horizon = std::stod(value);
  } else if (key == "lambda_bar") {
    c.lambda_bar = std::stod(value);
  } else if (key == "temperature") {
    c.temperature = std::stod(value);
  } else if (key == "anneal_ratio") {
    c.anneal_ratio = std::stod(value);
  } else if (key == "learning_rate") {
    c.learning_rate = std::stod(value);
  } else if (key == "epochs") {
    c.epochs = std::stoi(value);
  } else if (key == "compensator_samples") {
    c.compensator_samples = std::stoi(value);
  } else if (key == "elbo_samples") {
    c.elbo_samples = std::stoi(value);
  } else if (key == "eval_samples") {
    c.eval_samples = std::stoi(value);
  } else if (key == "estimator") {
    c.estimator = value;
  } else if (key == "share_phi_theta") {
    c.share_phi_theta = value == "auto" ? -1 : (parse_bool(value) ? 1 : 0);
  } else if (key == "seed") {
    c.seed = std::stoull(value);
  } else if (key == "n_train") {
    c.n_train = std::stoi(value);
  } else if (key == "n_test") {
    c.n_test = std::stoi(value);
  } else if (key == "n_param_settings") {
    c.n_param_settings = std::stoi(value);
  } else if (key == "n_variance_estimates") {
    c.n_variance_estimates = std::stoi(value);
  } else if (key == "workers") {
    c.workers = std::stoi(value);
  } else if (key == "bench_amplitude_max") {
    c.bench_amplitude_max = std::stoi(value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

void apply_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    try {
      apply_key_value(config, trim(line.substr(0, eq)),
                      trim(line.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
}

}  // namespace diffsnn::tools
