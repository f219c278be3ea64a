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

#ifndef INVLQG_CLOSEDLOOP_HPP_
#define INVLQG_CLOSEDLOOP_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "invlqg/controllers.hpp"
#include "invlqg/estimators.hpp"
#include "invlqg/geometry.hpp"
#include "invlqg/model.hpp"

namespace invlqg {

/// One Monte Carlo trial: scale factors, nominal covariances and the seeding
/// key. Initial covariance alpha_sq * base_P0, noises beta_sq * (M, lambda).
struct TrialConfig {
  double alpha_sq = 1.0;
  double beta_sq = 1.0;
  Eigen::Matrix3d base_P0 = Eigen::Matrix3d::Zero();
  Eigen::Matrix2d base_M = Eigen::Matrix2d::Zero();
  double base_lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t trial_index = 0;
};

/// All randomness a trial consumes, drawn up front so the conventional and
/// invariant runs of a pair see element-wise identical streams.
struct NoiseRealization {
  Eigen::Vector3d initial_offset = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector2d> process;      // one per step
  std::vector<Eigen::Vector2d> measurement;  // one per step
};

/// Sub-stream ids for the splittable seeding scheme.
enum StreamId : std::uint64_t { kInitialDraw = 1, kProcessNoise = 2, kMeasurementNoise = 3 };

/// Draws the initial-state offset (N(0, alpha_sq P0)) and both noise streams
/// (N(0, beta_sq M), N(0, beta_sq lambda I)) for `horizon` steps.
NoiseRealization draw_noise_realization(const TrialConfig& trial, std::size_t horizon);

struct TrajectoryPoint {
  Pose truth;
  Pose estimate;
};

struct TrialResult {
  double cost = 0.0;
  bool lost = false;
  Eigen::Vector3d final_error = Eigen::Vector3d::Zero();     // truth - estimate, angle wrapped
  Eigen::Vector3d final_tracking = Eigen::Vector3d::Zero();  // truth - reference at t = n
  double final_nees = 0.0;
  std::optional<std::vector<TrajectoryPoint>> trajectory;
  std::optional<std::vector<Eigen::Vector3d>> step_tracking_errors;  // truth - reference per step
};

struct SimulationOptions {
  bool record_trajectory = false;
  bool record_step_tracking = false;
};

/// 99.9%-style chi-squared quantile with 2 degrees of freedom:
/// -2 ln(1 - p).
double chi_squared_quantile_2dof(double p);

/// Lost-trajectory criterion: squared Mahalanobis distance of the final
/// position estimation error, under the filter's global-frame position
/// covariance, beyond the 99.9% chi-squared(2) quantile. The covariance is
/// regularized by 1e-12 I when near-singular.
bool is_lost(const Pose& truth, const Pose& estimate, const Eigen::Matrix2d& position_cov);

/// Core closed-loop simulation with injected noise. The schedule flavor
/// selects the filter (EKF for conventional, IEKF for invariant) and the
/// feedback law. `noise` is the effective (already scaled) model; P0 the
/// effective initial covariance.
TrialResult run_lqg_with_noise(const ReferenceTrajectory& ref, const CostWeights& weights,
                               const GainSchedule& schedule, const Eigen::Matrix3d& P0,
                               const NoiseModel& noise, const NoiseRealization& draws,
                               const SimulationOptions& options = {});

/// Algorithm-level entry points: compute the gain schedule, draw the trial's
/// noise realization from its seeds, and simulate.
TrialResult run_conventional_lqg(const ReferenceTrajectory& ref, const CostWeights& weights,
                                 const TrialConfig& trial, const SimulationOptions& options = {});
TrialResult run_invariant_lqg(const ReferenceTrajectory& ref, const CostWeights& weights,
                              const TrialConfig& trial, const SimulationOptions& options = {});

/// Effective measurement variance: scaled and floored at 1e-12 so degenerate
/// zero-noise configs keep the innovation covariance invertible.
double effective_lambda(double base_lambda, double beta_sq);

struct CellSummary {
  double alpha_sq = 1.0;
  double beta_sq = 1.0;
  double mean_cost_conv = 0.0;
  double mean_cost_inv = 0.0;
  double win_rate_inv = 0.0;  // fraction in [0,1]; exact cost ties count 0.5
  int lost_conv = 0;
  int lost_inv = 0;
  int trials = 0;
};

struct TrialRecord {
  double cost_conv = 0.0;
  double cost_inv = 0.0;
  bool lost_conv = false;
  bool lost_inv = false;
};

struct CellData {
  CellSummary summary;
  std::vector<TrialRecord> trial_log;                     // when log_trials
  std::vector<Eigen::Vector3d> final_tracking_conv;       // when capture_final_tracking
  std::vector<Eigen::Vector3d> final_tracking_inv;
  // per-step moment sums over trials, for time-averaged comparisons
  std::vector<Eigen::Vector3d> step_sum_conv, step_sum_inv;
  std::vector<Eigen::Matrix3d> step_outer_conv, step_outer_inv;
};

struct GridOptions {
  int threads = 0;  // 0 = hardware concurrency
  bool log_trials = false;
  bool capture_final_tracking = false;
  bool capture_step_moments = false;
};

struct GridResult {
  std::vector<CellData> cells;
};

/// Paired Monte Carlo sweep: for every cell and trial index the identical
/// noise realization is fed to both observer-controllers. Results are
/// bit-identical for any thread count (per-trial seeding, indexed storage,
/// sequential reduction).
GridResult monte_carlo_grid(const ReferenceTrajectory& ref, const CostWeights& weights,
                            const Eigen::Matrix3d& base_P0, const Eigen::Matrix2d& base_M,
                            double base_lambda,
                            std::span<const std::pair<double, double>> cells, int trials_per_cell,
                            std::uint64_t base_seed, const GridOptions& options = {});

}  // namespace invlqg

#endif  // INVLQG_CLOSEDLOOP_HPP_
