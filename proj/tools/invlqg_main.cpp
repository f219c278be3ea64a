// Copyright 2026 The invlqg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "invlqg/config.hpp"
#include "invlqg/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Invariant vs conventional LQG trajectory-tracking benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string in_dir;
  int threads = -1;
  std::int64_t seed = -1;
  std::int64_t dump_trial = -1;
  bool log_trials = false;

  CLI::App* run = app.add_subcommand("run", "run the Monte Carlo experiment grid");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides out_dir)");
  run->add_option("--threads", threads, "worker threads (0 = all cores)");
  run->add_option("--seed", seed, "base seed (overrides base_seed)");
  run->add_flag("--log-trials", log_trials, "write per-trial cost/lost logs");
  run->add_option("--dump-trajectory", dump_trial, "dump the trajectory of this trial id");

  CLI::App* validate = app.add_subcommand("validate", "validate a config file");
  validate->add_option("--config", config_path, "experiment config file")->required();

  CLI::App* plot = app.add_subcommand("plot", "emit gnuplot scripts for experiment outputs");
  plot->add_option("--in", in_dir, "directory holding the experiment CSVs")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    auto parsed = invlqg::parse_config_file(config_path);
    if (!parsed.config) {
      for (const auto& e : parsed.errors) std::cerr << "config error: " << e << "\n";
      return 1;
    }
    invlqg::ExperimentConfig config = *parsed.config;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (threads >= 0) config.threads = threads;
    if (seed >= 0) config.base_seed = static_cast<std::uint64_t>(seed);
    if (log_trials) config.log_trials = true;
    if (dump_trial >= 0) config.dump_trajectory = static_cast<std::uint64_t>(dump_trial);
    return invlqg::run_experiment(config, std::cout);
  }

  if (validate->parsed()) {
    auto parsed = invlqg::parse_config_file(config_path);
    if (!parsed.config) {
      for (const auto& e : parsed.errors) std::cerr << "config error: " << e << "\n";
      return 1;
    }
    std::cout << "config ok; effective settings:\n" << invlqg::render_config(*parsed.config);
    return 0;
  }

  try {
    invlqg::emit_plot_scripts(in_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote plot_cost.gp, plot_lost.gp, plot_kl.gp, plot_prediction.gp to " << in_dir
            << "\n";
  return 0;
}
