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

#include "invlqg/prediction.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace invlqg {

namespace {

using Matrix32 = Eigen::Matrix<double, 3, 2>;
using Matrix64 = Eigen::Matrix<double, 6, 4>;
using Matrix4d = Eigen::Matrix<double, 4, 4>;

Eigen::Matrix3d sym3(const Eigen::Matrix3d& m) { return 0.5 * (m + m.transpose()); }
Matrix6d sym6(const Matrix6d& m) { return 0.5 * (m + m.transpose()); }

// Kalman gain for a covariance recursion driven by the given per-step state
// Jacobian; P evolves as (I - K H)(A P A^T + B M B^T). Returns K_0..K_{n-1},
// where K_t is the gain of the update following the propagation t -> t+1.
template <typename StateJac, typename NoiseJac>
std::vector<Matrix32> kalman_gain_sequence(std::size_t horizon, const Eigen::Matrix3d& P0,
                                           const NoiseModel& noise, StateJac&& a_at,
                                           NoiseJac&& b_at) {
  std::vector<Matrix32> gains;
  gains.reserve(horizon);
  Eigen::Matrix3d p = P0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const Eigen::Matrix3d a = a_at(t);
    const Matrix32 b = b_at(t);
    const Eigen::Matrix3d prior = sym3(a * p * a.transpose() + b * noise.process_cov() * b.transpose());
    const Eigen::Matrix2d s =
        prior.topLeftCorner<2, 2>() + noise.lambda() * Eigen::Matrix2d::Identity();
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
    if (!(det > 0.0)) {
      throw std::runtime_error("prediction: innovation covariance not invertible");
    }
    Eigen::Matrix2d s_inv;
    s_inv << s(1, 1) / det, -s(0, 1) / det, -s(1, 0) / det, s(0, 0) / det;
    const Matrix32 k = prior.leftCols<2>() * s_inv;
    gains.push_back(k);
    p = sym3((Eigen::Matrix3d::Identity() - k * position_h()) * prior);
  }
  return gains;
}

}  // namespace

PredictionSeries predict_invariant(const ReferenceTrajectory& ref, const CostWeights& weights,
                                   const NoiseModel& noise, const Eigen::Matrix3d& P0) {
  const std::size_t n = ref.horizon();
  const GainSchedule lq = riccati_invariant(ref.controls, weights, ref.tau);
  const Matrix32 b = frenet_noise_jacobian(ref.tau);
  const std::vector<Matrix32> kalman = kalman_gain_sequence(
      n, P0, noise, [&](std::size_t t) { return frenet_state_jacobian(ref.controls[t], ref.tau); },
      [&](std::size_t) { return b; });

  Matrix4d q = Matrix4d::Zero();
  q.topLeftCorner<2, 2>() = noise.process_cov();
  q.bottomRightCorner<2, 2>() = noise.measurement_cov();
  const Eigen::Matrix<double, 2, 3> h = position_h();

  PredictionSeries series;
  series.joint.reserve(n + 1);
  series.tracking_global.reserve(n + 1);
  Matrix6d sigma;
  // x_hat_0 = ref pose, so the estimation error is minus the tracking error
  sigma << P0, -P0, -P0, P0;
  series.joint.push_back(sigma);
  for (std::size_t t = 0; t < n; ++t) {
    const Eigen::Matrix3d a = frenet_state_jacobian(ref.controls[t], ref.tau);
    const Matrix32& k = kalman[t];
    const Eigen::Matrix3d bl = b * lq.gains[t];
    Matrix6d f = Matrix6d::Zero();
    f.topLeftCorner<3, 3>() = a + bl;
    f.topRightCorner<3, 3>() = bl;
    f.bottomRightCorner<3, 3>() = a - k * h * a;
    Matrix64 g = Matrix64::Zero();
    g.topLeftCorner<3, 2>() = b;
    g.bottomLeftCorner<3, 2>() = k * h * b - b;
    g.bottomRightCorner<3, 2>() = k;
    sigma = sym6(f * sigma * f.transpose() + g * q * g.transpose());
    series.joint.push_back(sigma);
  }
  for (std::size_t t = 0; t <= n; ++t) {
    series.tracking_global.push_back(
        Upsilon(ref.poses[t].theta).rotate_covariance(series.joint[t].topLeftCorner<3, 3>()));
  }
  return series;
}

PredictionSeries predict_conventional(const ReferenceTrajectory& ref, const CostWeights& weights,
                                      const NoiseModel& noise, const Eigen::Matrix3d& P0) {
  const std::size_t n = ref.horizon();
  const GainSchedule lq = riccati_conventional(ref, weights);
  auto a_at = [&](std::size_t t) {
    return global_state_jacobian(ref.poses[t].theta, ref.controls[t].u, ref.tau);
  };
  auto b_at = [&](std::size_t t) { return global_noise_jacobian(ref.poses[t].theta, ref.tau); };
  const std::vector<Matrix32> kalman = kalman_gain_sequence(n, P0, noise, a_at, b_at);

  Matrix4d q = Matrix4d::Zero();
  q.topLeftCorner<2, 2>() = noise.process_cov();
  q.bottomRightCorner<2, 2>() = noise.measurement_cov();
  const Eigen::Matrix<double, 2, 3> h = position_h();

  PredictionSeries series;
  series.joint.reserve(n + 1);
  series.tracking_global.reserve(n + 1);
  Matrix6d sigma = Matrix6d::Zero();
  // x_hat_0 = ref pose exactly: the estimate deviation starts at zero
  sigma.topLeftCorner<3, 3>() = P0;
  series.joint.push_back(sigma);
  for (std::size_t t = 0; t < n; ++t) {
    const Eigen::Matrix3d a = a_at(t);
    const Matrix32 b = b_at(t);
    const Matrix32& k = kalman[t];
    const Eigen::Matrix3d bl = b * lq.gains[t];
    const Eigen::Matrix3d kha = k * h * a;
    Matrix6d f = Matrix6d::Zero();
    f.topLeftCorner<3, 3>() = a;
    f.topRightCorner<3, 3>() = bl;
    f.bottomLeftCorner<3, 3>() = kha;
    f.bottomRightCorner<3, 3>() = a + bl - kha;
    Matrix64 g = Matrix64::Zero();
    g.topLeftCorner<3, 2>() = b;
    g.bottomLeftCorner<3, 2>() = k * h * b;
    g.bottomRightCorner<3, 2>() = k;
    sigma = sym6(f * sigma * f.transpose() + g * q * g.transpose());
    series.joint.push_back(sigma);
  }
  for (std::size_t t = 0; t <= n; ++t) {
    series.tracking_global.push_back(series.joint[t].topLeftCorner<3, 3>());
  }
  return series;
}

namespace {

struct CholeskyInfo {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_det = 0.0;
};

CholeskyInfo factor_spd(const Eigen::MatrixXd& cov, const char* name) {
  Eigen::MatrixXd m = 0.5 * (cov + cov.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    m += 1e-12 * Eigen::MatrixXd::Identity(m.rows(), m.cols());
    llt.compute(m);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument(std::string(name) + ": covariance not positive definite");
    }
  }
  double log_det = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
  return {std::move(llt), log_det};
}

double kl_divergence(const Eigen::VectorXd& mean0, const CholeskyInfo& f0,
                     const Eigen::MatrixXd& cov0, const Eigen::VectorXd& mean1,
                     const CholeskyInfo& f1) {
  const Eigen::Index k = mean0.size();
  const Eigen::VectorXd d = mean1 - mean0;
  const double trace = f1.llt.solve(cov0).trace();
  const double maha = d.dot(f1.llt.solve(d));
  return 0.5 * (trace + maha - static_cast<double>(k) + f1.log_det - f0.log_det);
}

}  // namespace

double symmetric_kl(const Eigen::VectorXd& mean0, const Eigen::MatrixXd& cov0,
                    const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1) {
  if (mean0.size() != mean1.size() || cov0.rows() != cov1.rows() || cov0.rows() != mean0.size() ||
      cov0.rows() != cov0.cols() || cov1.rows() != cov1.cols()) {
    throw std::invalid_argument("symmetric_kl: dimension mismatch");
  }
  const CholeskyInfo f0 = factor_spd(cov0, "symmetric_kl cov0");
  const CholeskyInfo f1 = factor_spd(cov1, "symmetric_kl cov1");
  return 0.5 * (kl_divergence(mean0, f0, cov0, mean1, f1) +
                kl_divergence(mean1, f1, cov1, mean0, f0));
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> empirical_gaussian(const Eigen::MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index k = samples.cols();
  if (n < k + 1) {
    throw std::invalid_argument("empirical_gaussian: need at least k+1 samples");
  }
  const Eigen::VectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);
  return {mean, cov};
}

}  // namespace invlqg
