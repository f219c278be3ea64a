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

#include "invlqg/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace invlqg {

namespace {

Eigen::Matrix3d symmetrize(const Eigen::Matrix3d& m) { return 0.5 * (m + m.transpose()); }

void require_frame(const Belief& belief, Frame frame, const char* op) {
  if (belief.frame != frame) {
    throw std::invalid_argument(std::string(op) + ": belief is in the wrong frame");
  }
}

// Closed-form inverse of a symmetric 2x2; rejects condition number > 1e12.
Eigen::Matrix2d invert_innovation(const Eigen::Matrix2d& s) {
  const double a = s(0, 0);
  const double b = s(0, 1);
  const double c = s(1, 1);
  const double mean = 0.5 * (a + c);
  const double radius = std::hypot(0.5 * (a - c), b);
  const double eig_min = mean - radius;
  const double eig_max = mean + radius;
  if (!(eig_min > 0.0) || eig_max > 1e12 * eig_min) {
    throw std::runtime_error("innovation covariance numerically singular");
  }
  const double det = a * c - b * b;
  Eigen::Matrix2d inv;
  inv << c / det, -b / det, -b / det, a / det;
  return inv;
}

struct UpdateCore {
  GainMatrix gain;
  Eigen::Matrix3d covariance;
};

// Gain and covariance part of the measurement update, shared by both filters
// (identical because H Upsilon_phi = R_phi H and N is isotropic).
UpdateCore kalman_update_core(const Eigen::Matrix3d& prior_cov, const NoiseModel& noise,
                              CovarianceUpdate form) {
  const Eigen::Matrix<double, 2, 3> h = position_h();
  const Eigen::Matrix2d s =
      prior_cov.topLeftCorner<2, 2>() + noise.lambda() * Eigen::Matrix2d::Identity();
  const GainMatrix gain = prior_cov.leftCols<2>() * invert_innovation(s);
  Eigen::Matrix3d cov;
  if (form == CovarianceUpdate::Joseph) {
    const Eigen::Matrix3d ikh = Eigen::Matrix3d::Identity() - gain * h;
    cov = ikh * prior_cov * ikh.transpose() + gain * noise.measurement_cov() * gain.transpose();
  } else {
    cov = (Eigen::Matrix3d::Identity() - gain * h) * prior_cov;
  }
  return {gain, symmetrize(cov)};
}

}  // namespace

Belief ekf_predict(const Belief& belief, ControlInput input, const NoiseModel& noise, double tau) {
  require_frame(belief, Frame::Global, "ekf_predict");
  const Eigen::Matrix3d a = global_state_jacobian(belief.estimate.theta, input.u, tau);
  const Eigen::Matrix<double, 3, 2> b = global_noise_jacobian(belief.estimate.theta, tau);
  Belief out;
  out.frame = Frame::Global;
  out.estimate = step(belief.estimate, input, Eigen::Vector2d::Zero(), tau);
  out.covariance = symmetrize(a * belief.covariance * a.transpose() +
                              b * noise.process_cov() * b.transpose());
  return out;
}

std::pair<Belief, GainMatrix> ekf_update(const Belief& belief, const Measurement& z,
                                         const NoiseModel& noise, CovarianceUpdate form) {
  require_frame(belief, Frame::Global, "ekf_update");
  const auto core = kalman_update_core(belief.covariance, noise, form);
  const Eigen::Vector2d innovation = z.vector() - belief.estimate.position();
  const Eigen::Vector3d correction = core.gain * innovation;
  Belief out;
  out.frame = Frame::Global;
  out.estimate = {belief.estimate.x + correction(0), belief.estimate.y + correction(1),
                  belief.estimate.theta + Angle(correction(2))};
  out.covariance = core.covariance;
  return {out, core.gain};
}

Belief iekf_predict(const Belief& belief, ControlInput input, const NoiseModel& noise, double tau) {
  require_frame(belief, Frame::FrenetLocal, "iekf_predict");
  const Eigen::Matrix3d a = frenet_state_jacobian(input, tau);
  const Eigen::Matrix<double, 3, 2> b = frenet_noise_jacobian(tau);
  Belief out;
  out.frame = Frame::FrenetLocal;
  out.estimate = step(belief.estimate, input, Eigen::Vector2d::Zero(), tau);
  out.covariance = symmetrize(a * belief.covariance * a.transpose() +
                              b * noise.process_cov() * b.transpose());
  return out;
}

std::pair<Belief, GainMatrix> iekf_update(const Belief& belief, const Measurement& z,
                                          const NoiseModel& noise, CovarianceUpdate form) {
  require_frame(belief, Frame::FrenetLocal, "iekf_update");
  const auto core = kalman_update_core(belief.covariance, noise, form);
  const Angle predicted_heading = belief.estimate.theta;
  const Eigen::Vector2d innovation = z.vector() - belief.estimate.position();
  const Eigen::Vector2d local_innovation = Rot2(-predicted_heading).apply(innovation);
  const Eigen::Vector3d correction =
      Upsilon(predicted_heading).apply(core.gain * local_innovation);
  Belief out;
  out.frame = Frame::FrenetLocal;
  out.estimate = {belief.estimate.x + correction(0), belief.estimate.y + correction(1),
                  belief.estimate.theta + Angle(correction(2))};
  out.covariance = core.covariance;
  return {out, core.gain};
}

Eigen::Matrix3d global_covariance(const Belief& belief) {
  if (belief.frame == Frame::Global) return belief.covariance;
  return Upsilon(belief.estimate.theta).rotate_covariance(belief.covariance);
}

}  // namespace invlqg
