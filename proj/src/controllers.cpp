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

#include "invlqg/controllers.hpp"

#include <cstddef>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "invlqg/csv.hpp"

namespace invlqg {

namespace {

void require_spd(const Eigen::MatrixXd& m, const char* name) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw std::invalid_argument(std::string(name) + " must be positive definite");
  }
}

using StateJacobianAt = std::function<Eigen::Matrix3d(std::size_t)>;
using NoiseJacobianAt = std::function<Eigen::Matrix<double, 3, 2>(std::size_t)>;

std::vector<FeedbackGain> backward_riccati(std::size_t horizon, const CostWeights& weights,
                                           const StateJacobianAt& a_at, const NoiseJacobianAt& b_at,
                                           std::vector<Eigen::Matrix3d>* cost_to_go) {
  if (horizon < 1) {
    throw std::invalid_argument("riccati: horizon must be >= 1");
  }
  std::vector<FeedbackGain> gains(horizon);
  if (cost_to_go) cost_to_go->assign(horizon + 1, Eigen::Matrix3d::Zero());
  Eigen::Matrix3d s = weights.state_weight();
  if (cost_to_go) (*cost_to_go)[horizon] = s;
  for (std::size_t t = horizon; t-- > 0;) {
    const Eigen::Matrix3d a = a_at(t);
    const Eigen::Matrix<double, 3, 2> b = b_at(t);
    const Eigen::Matrix2d gram = b.transpose() * s * b + weights.input_weight();
    // cannot be singular for D > 0; assert via the closed-form determinant
    const double det = gram(0, 0) * gram(1, 1) - gram(0, 1) * gram(1, 0);
    if (!(det > 0.0) || !std::isfinite(det)) {
      throw std::runtime_error("riccati: input-weighted Gram matrix not invertible");
    }
    Eigen::Matrix2d gram_inv;
    gram_inv << gram(1, 1) / det, -gram(0, 1) / det, -gram(1, 0) / det, gram(0, 0) / det;
    gains[t] = -gram_inv * b.transpose() * s * a;
    s = weights.state_weight() + a.transpose() * s * (a + b * gains[t]);
    s = 0.5 * (s + s.transpose());
    if (cost_to_go) (*cost_to_go)[t] = s;
  }
  return gains;
}

}  // namespace

CostWeights::CostWeights(const Eigen::Matrix3d& state_weight, const Eigen::Matrix2d& input_weight) {
  require_spd(state_weight, "state weight C");
  require_spd(input_weight, "input weight D");
  state_weight_ = 0.5 * (state_weight + state_weight.transpose());
  input_weight_ = 0.5 * (input_weight + input_weight.transpose());
}

GainSchedule riccati_conventional(const ReferenceTrajectory& ref, const CostWeights& weights,
                                  std::vector<Eigen::Matrix3d>* cost_to_go) {
  GainSchedule schedule;
  schedule.flavor = ControlFlavor::Conventional;
  schedule.gains = backward_riccati(
      ref.horizon(), weights,
      [&](std::size_t t) {
        return global_state_jacobian(ref.poses[t].theta, ref.controls[t].u, ref.tau);
      },
      [&](std::size_t t) { return global_noise_jacobian(ref.poses[t].theta, ref.tau); },
      cost_to_go);
  return schedule;
}

GainSchedule riccati_invariant(std::span<const ControlInput> controls, const CostWeights& weights,
                               double tau, std::vector<Eigen::Matrix3d>* cost_to_go) {
  GainSchedule schedule;
  schedule.flavor = ControlFlavor::Invariant;
  const Eigen::Matrix<double, 3, 2> b = frenet_noise_jacobian(tau);
  schedule.gains = backward_riccati(
      controls.size(), weights,
      [&](std::size_t t) { return frenet_state_jacobian(controls[t], tau); },
      [&](std::size_t) { return b; }, cost_to_go);
  return schedule;
}

ControlInput control_conventional(const FeedbackGain& gain, const Pose& estimate,
                                  const Pose& ref_pose, ControlInput ref_input) {
  const Eigen::Vector2d correction = gain * pose_difference(estimate, ref_pose);
  return {ref_input.u + correction(0), ref_input.omega + correction(1)};
}

ControlInput control_invariant(const FeedbackGain& gain, const Pose& estimate,
                               const Pose& ref_pose, ControlInput ref_input) {
  const Eigen::Vector3d local_error =
      to_local_error(pose_difference(estimate, ref_pose), ref_pose.theta);
  const Eigen::Vector2d correction = gain * local_error;
  return {ref_input.u + correction(0), ref_input.omega + correction(1)};
}

void save_gain_schedule_csv(const GainSchedule& schedule, std::ostream& out) {
  out << "t,L11,L12,L13,L21,L22,L23\n";
  for (std::size_t t = 0; t < schedule.gains.size(); ++t) {
    const FeedbackGain& l = schedule.gains[t];
    out << format_int(static_cast<std::int64_t>(t));
    for (int row = 0; row < 2; ++row) {
      for (int col = 0; col < 3; ++col) {
        out << ',' << format_double(l(row, col));
      }
    }
    out << '\n';
  }
}

void save_gain_schedule_csv(const GainSchedule& schedule, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  save_gain_schedule_csv(schedule, out);
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace invlqg
