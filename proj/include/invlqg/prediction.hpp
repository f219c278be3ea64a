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

#ifndef INVLQG_PREDICTION_HPP_
#define INVLQG_PREDICTION_HPP_

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "invlqg/controllers.hpp"
#include "invlqg/model.hpp"

namespace invlqg {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// A-priori joint covariance of the stacked (tracking error, estimation
/// error) along the reference, plus the global-frame 3x3 tracking-error
/// marginal per step. joint and tracking_global have length n+1.
struct PredictionSeries {
  std::vector<Matrix6d> joint;
  std::vector<Eigen::Matrix3d> tracking_global;
};

/// Frenet-frame joint recursion for the invariant LQG. Kalman gains are
/// computed from the reference input sequence (the same gains the online
/// filter would produce for those inputs); the LQ gains are the invariant
/// schedule. `noise` and `P0` are effective (already scaled) values.
PredictionSeries predict_invariant(const ReferenceTrajectory& ref, const CostWeights& weights,
                                   const NoiseModel& noise, const Eigen::Matrix3d& P0);

/// Global-frame joint recursion for the conventional LQG, with observer and
/// controller both linearized about the reference.
PredictionSeries predict_conventional(const ReferenceTrajectory& ref, const CostWeights& weights,
                                      const NoiseModel& noise, const Eigen::Matrix3d& P0);

/// Symmetric Kullback-Leibler divergence between two Gaussians,
/// (KL(N0||N1) + KL(N1||N0)) / 2. Covariances must be positive definite;
/// near-singular inputs are regularized once by +1e-12 I, then rejected.
double symmetric_kl(const Eigen::VectorXd& mean0, const Eigen::MatrixXd& cov0,
                    const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1);

/// Sample mean and unbiased sample covariance; `samples` holds one
/// observation per row. Requires at least k+1 samples for k columns.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> empirical_gaussian(const Eigen::MatrixXd& samples);

}  // namespace invlqg

#endif  // INVLQG_PREDICTION_HPP_
