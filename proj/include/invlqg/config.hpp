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

#ifndef INVLQG_CONFIG_HPP_
#define INVLQG_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "invlqg/model.hpp"

namespace invlqg {

/// Experiment parameters. The defaults reproduce the benchmark study:
/// mixed straight/arc path, position-dominant weights, 3x3 factor grid,
/// 500 paired trials per cell.
struct ExperimentConfig {
  double tau = 0.05;
  std::vector<Segment> segments = benchmark_segments();
  Eigen::Vector3d weights_c{1.0, 1.0, 0.5};   // diagonal of C
  Eigen::Vector2d weights_d{0.1, 0.1};        // diagonal of D
  Eigen::Vector3d p0_diag{0.01, 0.01, 0.02};  // nominal initial covariance
  Eigen::Vector2d m0_diag{0.01, 0.01};        // nominal process covariance
  double lambda0 = 0.01;                      // nominal measurement variance
  std::vector<double> alpha_sq{1.0, 10.0, 100.0};
  std::vector<double> beta_sq{1.0, 10.0, 100.0};
  int trials_per_cell = 500;
  std::uint64_t base_seed = 1;
  std::string out_dir = "out";
  bool log_trials = false;
  std::optional<std::uint64_t> dump_trajectory;
  bool time_averaged_kl = false;
  int threads = 0;  // 0 = all cores
};

/// Result of parsing: either a fully validated config or the complete list of
/// violations (parsing does not stop at the first error).
struct ConfigParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
};

/// Parses flat `key = value` text ('#' comments, blank lines ignored).
/// Unknown and duplicate keys are errors. An empty document yields the
/// defaults.
ConfigParseResult parse_config(std::string_view text);

ConfigParseResult parse_config_file(const std::string& path);

/// Renders a config as parseable key-value text (documents the defaults).
std::string render_config(const ExperimentConfig& config);

}  // namespace invlqg

#endif  // INVLQG_CONFIG_HPP_
