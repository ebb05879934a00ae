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

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "experiment.hpp"

namespace {

using diffsnn::tools::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  bool seed_set = false;
  std::uint64_t seed = 0;
  std::string estimator;
  int epochs = -1;
  double lr = -1.0;
  double temperature = -1.0;
  double anneal = -1.0;
  int workers = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "flat key = value config file");
  cmd->add_option("--seed", flags.seed, "random seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--estimator", flags.estimator,
                  "gradient estimator: score | pathwise")
      ->check(CLI::IsMember({"score", "pathwise"}));
  cmd->add_option("--epochs", flags.epochs, "training epochs");
  cmd->add_option("--lr", flags.lr, "initial learning rate");
  cmd->add_option("--temperature", flags.temperature,
                  "initial relaxation temperature");
  cmd->add_option("--anneal", flags.anneal,
                  "temperature multiplier per epoch");
  cmd->add_option("--workers", flags.workers,
                  "worker threads (0 = hardware)");
}

ExperimentConfig resolve(const CommonFlags& flags) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) {
    diffsnn::tools::apply_config_file(config, flags.config_path);
  }
  // Flags override file values.
  if (flags.seed_set) config.seed = flags.seed;
  if (!flags.estimator.empty()) config.estimator = flags.estimator;
  if (flags.epochs >= 0) config.epochs = flags.epochs;
  if (flags.lr >= 0.0) config.learning_rate = flags.lr;
  if (flags.temperature > 0.0) config.temperature = flags.temperature;
  if (flags.anneal > 0.0) config.anneal_ratio = flags.anneal;
  if (flags.workers >= 0) config.workers = flags.workers;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Temporal point processes, relaxed-mark sampling and variational "
      "training of probabilistic spiking networks"};
  app.require_subcommand(1);

  CommonFlags gen_flags;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand(
      "generate", "synthesize a dataset from a random ground-truth network");
  add_common(gen, gen_flags);
  gen->add_option("--out", gen_out, "output directory")->required();

  CommonFlags train_flags;
  std::string train_data;
  std::string train_out;
  std::string train_init;
  CLI::App* trn = app.add_subcommand("train", "train on observed trains");
  add_common(trn, train_flags);
  trn->add_option("--data", train_data, "JSON-Lines dataset")->required();
  trn->add_option("--out", train_out, "output directory")->required();
  trn->add_option("--init-params", train_init,
                  "initial parameter file (default: random from seed)");

  CommonFlags eval_flags;
  std::string eval_params;
  std::string eval_phi;
  std::string eval_data;
  std::string eval_out;
  CLI::App* evl = app.add_subcommand("eval", "mean test ELBO of parameters");
  add_common(evl, eval_flags);
  evl->add_option("--params", eval_params, "model parameter file")->required();
  evl->add_option("--phi-params", eval_phi,
                  "variational parameter file (default: --params)");
  evl->add_option("--data", eval_data, "JSON-Lines test set")->required();
  evl->add_option("--out", eval_out, "CSV output path");

  CommonFlags var_flags;
  std::string var_data;
  std::string var_params;
  std::string var_out;
  CLI::App* var = app.add_subcommand(
      "grad-variance", "standard deviation of both gradient estimators");
  add_common(var, var_flags);
  var->add_option("--data", var_data, "JSON-Lines dataset")->required();
  var->add_option("--params", var_params,
                  "parameter setting (default: random from seed)");
  var->add_option("--out", var_out, "CSV output path");

  CommonFlags bench_flags;
  std::string bench_data;
  std::string bench_out;
  CLI::App* bch = app.add_subcommand(
      "bench", "per-epoch training time across amplitudes");
  add_common(bch, bench_flags);
  bch->add_option("--data", bench_data, "JSON-Lines dataset")->required();
  bch->add_option("--out", bench_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      diffsnn::tools::cmd_generate(resolve(gen_flags), gen_out);
    } else if (trn->parsed()) {
      diffsnn::tools::cmd_train(resolve(train_flags), train_data, train_out,
                                train_init);
    } else if (evl->parsed()) {
      diffsnn::tools::cmd_eval(resolve(eval_flags), eval_params, eval_phi,
                               eval_data, eval_out);
    } else if (var->parsed()) {
      diffsnn::tools::cmd_grad_variance(resolve(var_flags), var_data,
                                        var_params, var_out);
    } else if (bch->parsed()) {
      diffsnn::tools::cmd_bench(resolve(bench_flags), bench_data, bench_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
