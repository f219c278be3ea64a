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

#include "invlqg/closedloop.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <Eigen/Cholesky>

#include "invlqg/random.hpp"

namespace invlqg {

NoiseRealization draw_noise_realization(const TrialConfig& trial, std::size_t horizon) {
  NoiseRealization draws;
  {
    NormalStream init(stream_seed(trial.seed, trial.trial_index, kInitialDraw));
    draws.initial_offset = sample_gaussian(init, Eigen::Matrix3d(trial.alpha_sq * trial.base_P0));
  }
  {
    NormalStream process(stream_seed(trial.seed, trial.trial_index, kProcessNoise));
    const Eigen::Matrix2d factor = psd_sqrt<2>(Eigen::Matrix2d(trial.beta_sq * trial.base_M));
    draws.process.reserve(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
      draws.process.push_back(factor * process.next2());
    }
  }
  {
    NormalStream meas(stream_seed(trial.seed, trial.trial_index, kMeasurementNoise));
    const double sigma = std::sqrt(trial.beta_sq * trial.base_lambda);
    draws.measurement.reserve(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
      draws.measurement.push_back(sigma * meas.next2());
    }
  }
  return draws;
}

double chi_squared_quantile_2dof(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("chi_squared_quantile_2dof: p must be in (0,1)");
  }
  return -2.0 * std::log(1.0 - p);
}

bool is_lost(const Pose& truth, const Pose& estimate, const Eigen::Matrix2d& position_cov) {
  Eigen::Matrix2d cov = 0.5 * (position_cov + position_cov.transpose());
  const double a = cov(0, 0);
  const double c = cov(1, 1);
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), cov(0, 1));
  if (mean - radius < 1e-12) {
    cov += 1e-12 * Eigen::Matrix2d::Identity();
  }
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  const Eigen::Vector2d d(truth.x - estimate.x, truth.y - estimate.y);
  const double mahalanobis_sq =
      (cov(1, 1) * d(0) * d(0) - 2.0 * cov(0, 1) * d(0) * d(1) + cov(0, 0) * d(1) * d(1)) / det;
  return mahalanobis_sq > chi_squared_quantile_2dof(0.999);
}

double effective_lambda(double base_lambda, double beta_sq) {
  return std::max(base_lambda * beta_sq, 1e-12);
}

namespace {

double quadratic(const Eigen::Vector3d& v, const Eigen::Matrix3d& w) { return v.dot(w * v); }
double quadratic(const Eigen::Vector2d& v, const Eigen::Matrix2d& w) { return v.dot(w * v); }

// NEES of the estimation error in the frame the filter's covariance lives in.
double final_nees(const Belief& belief, const Pose& truth) {
  Eigen::Vector3d error = pose_difference(belief.estimate, truth);
  if (belief.frame == Frame::FrenetLocal) {
    error = to_local_error(error, truth.theta);
  }
  return error.dot(belief.covariance.ldlt().solve(error));
}

}  // namespace

TrialResult run_lqg_with_noise(const ReferenceTrajectory& ref, const CostWeights& weights,
                               const GainSchedule& schedule, const Eigen::Matrix3d& P0,
                               const NoiseModel& noise, const NoiseRealization& draws,
                               const SimulationOptions& options) {
  const std::size_t n = ref.horizon();
  if (schedule.gains.size() != n) {
    throw std::invalid_argument("gain schedule length does not match the reference horizon");
  }
  if (draws.process.size() < n || draws.measurement.size() < n) {
    throw std::invalid_argument("noise realization shorter than the reference horizon");
  }
  const bool invariant = schedule.flavor == ControlFlavor::Invariant;

  Pose truth{ref.poses[0].x + draws.initial_offset(0), ref.poses[0].y + draws.initial_offset(1),
             ref.poses[0].theta + Angle(draws.initial_offset(2))};
  Belief belief;
  belief.estimate = ref.poses[0];
  belief.covariance = P0;
  belief.frame = invariant ? Frame::FrenetLocal : Frame::Global;

  TrialResult result;
  if (options.record_trajectory) result.trajectory.emplace();
  if (options.record_step_tracking) result.step_tracking_errors.emplace();

  ControlInput input = ref.controls[0];
  Eigen::Vector3d tracking = pose_difference(truth, ref.poses[0]);
  result.cost += quadratic(tracking, weights.state_weight());
  // u_0 = ref input exactly; its deviation term is zero
  if (options.record_trajectory) result.trajectory->push_back({truth, belief.estimate});
  if (options.record_step_tracking) result.step_tracking_errors->push_back(tracking);

  for (std::size_t t = 0; t < n; ++t) {
    truth = step(truth, input, draws.process[t], ref.tau);
    belief = invariant ? iekf_predict(belief, input, noise, ref.tau)
                       : ekf_predict(belief, input, noise, ref.tau);
    const Measurement z = measure(truth, draws.measurement[t]);
    belief = (invariant ? iekf_update(belief, z, noise) : ekf_update(belief, z, noise)).first;

    tracking = pose_difference(truth, ref.poses[t + 1]);
    result.cost += quadratic(tracking, weights.state_weight());
    if (t + 1 < n) {
      input = invariant ? control_invariant(schedule.gains[t + 1], belief.estimate,
                                            ref.poses[t + 1], ref.controls[t + 1])
                        : control_conventional(schedule.gains[t + 1], belief.estimate,
                                               ref.poses[t + 1], ref.controls[t + 1]);
      const Eigen::Vector2d input_dev(input.u - ref.controls[t + 1].u,
                                      input.omega - ref.controls[t + 1].omega);
      result.cost += quadratic(input_dev, weights.input_weight());
    }
    if (options.record_trajectory) result.trajectory->push_back({truth, belief.estimate});
    if (options.record_step_tracking) result.step_tracking_errors->push_back(tracking);
  }

  result.final_error = pose_difference(truth, belief.estimate);
  result.final_tracking = tracking;
  result.final_nees = final_nees(belief, truth);
  const Eigen::Matrix2d position_cov = global_covariance(belief).topLeftCorner<2, 2>();
  result.lost = is_lost(truth, belief.estimate, position_cov);
  return result;
}

namespace {

TrialResult run_single(const ReferenceTrajectory& ref, const CostWeights& weights,
                       const GainSchedule& schedule, const TrialConfig& trial,
                       const SimulationOptions& options) {
  const Eigen::Matrix3d p0 = trial.alpha_sq * trial.base_P0;
  const NoiseModel noise(trial.beta_sq * trial.base_M,
                         effective_lambda(trial.base_lambda, trial.beta_sq));
  const NoiseRealization draws = draw_noise_realization(trial, ref.horizon());
  return run_lqg_with_noise(ref, weights, schedule, p0, noise, draws, options);
}

}  // namespace

TrialResult run_conventional_lqg(const ReferenceTrajectory& ref, const CostWeights& weights,
                                 const TrialConfig& trial, const SimulationOptions& options) {
  return run_single(ref, weights, riccati_conventional(ref, weights), trial, options);
}

TrialResult run_invariant_lqg(const ReferenceTrajectory& ref, const CostWeights& weights,
                              const TrialConfig& trial, const SimulationOptions& options) {
  return run_single(ref, weights, riccati_invariant(ref.controls, weights, ref.tau), trial,
                    options);
}

GridResult monte_carlo_grid(const ReferenceTrajectory& ref, const CostWeights& weights,
                            const Eigen::Matrix3d& base_P0, const Eigen::Matrix2d& base_M,
                            double base_lambda,
                            std::span<const std::pair<double, double>> cells, int trials_per_cell,
                            std::uint64_t base_seed, const GridOptions& options) {
  if (trials_per_cell < 1) {
    throw std::invalid_argument("monte_carlo_grid: trials_per_cell must be >= 1");
  }
  const std::size_t n = ref.horizon();
  const GainSchedule schedule_conv = riccati_conventional(ref, weights);
  const GainSchedule schedule_inv = riccati_invariant(ref.controls, weights, ref.tau);

  int threads = options.threads > 0 ? options.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min<int>(threads, trials_per_cell);

  SimulationOptions sim_options;
  sim_options.record_step_tracking = options.capture_step_moments;

  GridResult grid;
  grid.cells.reserve(cells.size());
  for (const auto& [alpha_sq, beta_sq] : cells) {
    std::vector<TrialResult> conv(trials_per_cell);
    std::vector<TrialResult> inv(trials_per_cell);

    std::atomic<int> next{0};
    auto worker = [&] {
      for (int i = next.fetch_add(1); i < trials_per_cell; i = next.fetch_add(1)) {
        TrialConfig trial;
        trial.alpha_sq = alpha_sq;
        trial.beta_sq = beta_sq;
        trial.base_P0 = base_P0;
        trial.base_M = base_M;
        trial.base_lambda = base_lambda;
        trial.seed = base_seed;
        trial.trial_index = static_cast<std::uint64_t>(i);
        const Eigen::Matrix3d p0 = trial.alpha_sq * trial.base_P0;
        const NoiseModel noise(trial.beta_sq * trial.base_M,
                               effective_lambda(trial.base_lambda, trial.beta_sq));
        const NoiseRealization draws = draw_noise_realization(trial, n);
        conv[i] = run_lqg_with_noise(ref, weights, schedule_conv, p0, noise, draws, sim_options);
        inv[i] = run_lqg_with_noise(ref, weights, schedule_inv, p0, noise, draws, sim_options);
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(threads);
      for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    // sequential reduction in trial order keeps results thread-count independent
    CellData cell;
    cell.summary.alpha_sq = alpha_sq;
    cell.summary.beta_sq = beta_sq;
    cell.summary.trials = trials_per_cell;
    if (options.capture_step_moments) {
      cell.step_sum_conv.assign(n + 1, Eigen::Vector3d::Zero());
      cell.step_sum_inv.assign(n + 1, Eigen::Vector3d::Zero());
      cell.step_outer_conv.assign(n + 1, Eigen::Matrix3d::Zero());
      cell.step_outer_inv.assign(n + 1, Eigen::Matrix3d::Zero());
    }
    double wins = 0.0;
    for (int i = 0; i < trials_per_cell; ++i) {
      cell.summary.mean_cost_conv += conv[i].cost;
      cell.summary.mean_cost_inv += inv[i].cost;
      if (inv[i].cost < conv[i].cost) {
        wins += 1.0;
      } else if (inv[i].cost == conv[i].cost) {
        wins += 0.5;
      }
      cell.summary.lost_conv += conv[i].lost ? 1 : 0;
      cell.summary.lost_inv += inv[i].lost ? 1 : 0;
      if (options.log_trials) {
        cell.trial_log.push_back({conv[i].cost, inv[i].cost, conv[i].lost, inv[i].lost});
      }
      if (options.capture_final_tracking) {
        cell.final_tracking_conv.push_back(conv[i].final_tracking);
        cell.final_tracking_inv.push_back(inv[i].final_tracking);
      }
      if (options.capture_step_moments) {
        for (std::size_t t = 0; t <= n; ++t) {
          const Eigen::Vector3d& ec = (*conv[i].step_tracking_errors)[t];
          const Eigen::Vector3d& ei = (*inv[i].step_tracking_errors)[t];
          cell.step_sum_conv[t] += ec;
          cell.step_sum_inv[t] += ei;
          cell.step_outer_conv[t] += ec * ec.transpose();
          cell.step_outer_inv[t] += ei * ei.transpose();
        }
      }
    }
    cell.summary.mean_cost_conv /= trials_per_cell;
    cell.summary.mean_cost_inv /= trials_per_cell;
    cell.summary.win_rate_inv = wins / trials_per_cell;
    grid.cells.push_back(std::move(cell));
  }
  return grid;
}

}  // namespace invlqg
