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

#ifndef INVLQG_CONTROLLERS_HPP_
#define INVLQG_CONTROLLERS_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "invlqg/geometry.hpp"
#include "invlqg/model.hpp"

namespace invlqg {

/// Quadratic tracking weights: C penalizes state deviation, D input
/// deviation. Both must be symmetric positive definite.
class CostWeights {
 public:
  CostWeights(const Eigen::Matrix3d& state_weight, const Eigen::Matrix2d& input_weight);

  const Eigen::Matrix3d& state_weight() const { return state_weight_; }
  const Eigen::Matrix2d& input_weight() const { return input_weight_; }

 private:
  Eigen::Matrix3d state_weight_;
  Eigen::Matrix2d input_weight_;
};

using FeedbackGain = Eigen::Matrix<double, 2, 3>;

enum class ControlFlavor { Conventional, Invariant };

/// Backward Riccati solution: gains[t] is applied to the error at step t,
/// t = 0..n-1.
struct GainSchedule {
  std::vector<FeedbackGain> gains;
  ControlFlavor flavor = ControlFlavor::Conventional;
};

/// Finite-horizon LQ gains for the linearization about the reference poses.
/// Terminal condition S_n = C; backward pass
///   L_t = -(B_t^T S_{t+1} B_t + D)^{-1} B_t^T S_{t+1} A_t
///   S_t = C + A_t^T S_{t+1} (A_t + B_t L_t).
/// If `cost_to_go` is non-null it receives S_0..S_n.
GainSchedule riccati_conventional(const ReferenceTrajectory& ref, const CostWeights& weights,
                                  std::vector<Eigen::Matrix3d>* cost_to_go = nullptr);

/// Same recursion for the Frenet-frame linearization; a pure function of the
/// input sequence, independent of the reference poses.
GainSchedule riccati_invariant(std::span<const ControlInput> controls, const CostWeights& weights,
                               double tau, std::vector<Eigen::Matrix3d>* cost_to_go = nullptr);

/// u = u_ref + L (x_hat - x_ref), error angle wrapped.
ControlInput control_conventional(const FeedbackGain& gain, const Pose& estimate,
                                  const Pose& ref_pose, ControlInput ref_input);

/// u = u_ref + L Upsilon_{-theta_ref} (x_hat - x_ref), error angle wrapped
/// before the rotation.
ControlInput control_invariant(const FeedbackGain& gain, const Pose& estimate,
                               const Pose& ref_pose, ControlInput ref_input);

// Schedule export, header t,L11,L12,L13,L21,L22,L23.
void save_gain_schedule_csv(const GainSchedule& schedule, std::ostream& out);
void save_gain_schedule_csv(const GainSchedule& schedule, const std::filesystem::path& path);

}  // namespace invlqg

#endif  // INVLQG_CONTROLLERS_HPP_
