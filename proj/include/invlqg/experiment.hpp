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

#ifndef INVLQG_EXPERIMENT_HPP_
#define INVLQG_EXPERIMENT_HPP_

#include <filesystem>
#include <iosfwd>

#include "invlqg/config.hpp"

namespace invlqg {

/// Runs the whole study for a validated config: builds the reference,
/// precomputes the gain schedules, sweeps the paired Monte Carlo grid,
/// propagates the a-priori covariance predictions, and writes
/// summary.csv, kl.csv, prediction_inv.csv, prediction_conv.csv (plus the
/// flag-gated per-trial logs and trajectory dumps) into config.out_dir.
/// Prints a comparison table to `log`. Returns 0 on success; on failure
/// prints a diagnostic, removes the file being written, and returns 1.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Writes gnuplot scripts next to the CSVs produced by run_experiment.
void emit_plot_scripts(const std::filesystem::path& dir);

}  // namespace invlqg

#endif  // INVLQG_EXPERIMENT_HPP_
