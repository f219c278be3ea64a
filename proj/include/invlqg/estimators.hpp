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

#ifndef INVLQG_ESTIMATORS_HPP_
#define INVLQG_ESTIMATORS_HPP_

#include <utility>

#include <Eigen/Core>

#include "invlqg/geometry.hpp"
#include "invlqg/model.hpp"

namespace invlqg {

/// Frame the covariance lives in. The EKF keeps a global-frame covariance;
/// the IEKF propagates its covariance in the Frenet (body) frame.
enum class Frame { Global, FrenetLocal };

struct Belief {
  Pose estimate;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  Frame frame = Frame::Global;
};

/// 3x2 Kalman gain mapping position innovations to state corrections.
using GainMatrix = Eigen::Matrix<double, 3, 2>;

/// Covariance update form for the measurement step. The plain form is
/// (I - K H) P; Joseph adds the K N K^T completion.
enum class CovarianceUpdate { Plain, Joseph };

/// EKF process update: estimate through the noise-free dynamics, covariance
/// through the Jacobians at the current estimate.
Belief ekf_predict(const Belief& belief, ControlInput input, const NoiseModel& noise, double tau);

/// EKF measurement update. Throws std::runtime_error if the innovation
/// covariance is numerically singular (condition number > 1e12).
std::pair<Belief, GainMatrix> ekf_update(const Belief& belief, const Measurement& z,
                                         const NoiseModel& noise,
                                         CovarianceUpdate form = CovarianceUpdate::Plain);

/// IEKF process update: the Frenet-frame covariance recursion whose
/// transition matrix depends on the inputs only, never on the estimate.
Belief iekf_predict(const Belief& belief, ControlInput input, const NoiseModel& noise, double tau);

/// IEKF measurement update: the innovation is rotated into the predicted
/// Frenet frame, corrected by the gain, and mapped back.
std::pair<Belief, GainMatrix> iekf_update(const Belief& belief, const Measurement& z,
                                          const NoiseModel& noise,
                                          CovarianceUpdate form = CovarianceUpdate::Plain);

/// Reporting helper: the belief covariance expressed in the global frame
/// (identity for EKF beliefs, Upsilon-conjugation for IEKF beliefs).
Eigen::Matrix3d global_covariance(const Belief& belief);

}  // namespace invlqg

#endif  // INVLQG_ESTIMATORS_HPP_
