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

#ifndef INVLQG_MODEL_HPP_
#define INVLQG_MODEL_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "invlqg/geometry.hpp"
#include "invlqg/random.hpp"

namespace invlqg {

/// Forward speed u (m/s) and turn rate omega (rad/s).
struct ControlInput {
  double u = 0.0;
  double omega = 0.0;
};

/// Process covariance M for the input noise (v, w) and isotropic measurement
/// covariance N = lambda * I2. Validated at construction: M symmetric PSD
/// (eigenvalues >= -1e-12), lambda >= 0.
class NoiseModel {
 public:
  NoiseModel(const Eigen::Matrix2d& process_cov, double lambda);

  const Eigen::Matrix2d& process_cov() const { return process_cov_; }
  double lambda() const { return lambda_; }
  Eigen::Matrix2d measurement_cov() const { return lambda_ * Eigen::Matrix2d::Identity(); }

  /// Both covariances scaled by `factor` (the beta^2 of the experiments).
  NoiseModel scaled(double factor) const { return NoiseModel(factor * process_cov_, factor * lambda_); }

 private:
  Eigen::Matrix2d process_cov_;
  double lambda_;
};

/// Planar position measurement z = (x + n_x, y + n_y); heading unobserved.
struct Measurement {
  double zx = 0.0;
  double zy = 0.0;

  Eigen::Vector2d vector() const { return {zx, zy}; }
};

/// Noise-free trajectory: poses[t+1] = step(poses[t], controls[t], 0) for all
/// t. poses has length n+1, controls length n.
struct ReferenceTrajectory {
  double tau = 0.0;
  std::vector<Pose> poses;
  std::vector<ControlInput> controls;

  std::size_t horizon() const { return controls.size(); }
};

/// One constant-input piece of a reference path.
struct Segment {
  double duration = 0.0;  // seconds; rounded to whole steps of tau
  double u = 0.0;
  double omega = 0.0;
};

/// Discrete unicycle update:
///   x += tau (u + v) cos(theta), y += tau (u + v) sin(theta),
///   theta += tau (omega + w), with noise = (v, w).
Pose step(const Pose& state, ControlInput input, const Eigen::Vector2d& noise, double tau);

/// z = (x + noise_x, y + noise_y).
Measurement measure(const Pose& state, const Eigen::Vector2d& noise);

Eigen::Vector2d sample_process_noise(NormalStream& stream, const Eigen::Matrix2d& process_cov);
Eigen::Vector2d sample_measurement_noise(NormalStream& stream, double lambda);

/// Open-loop zero-noise integration of the dynamics.
ReferenceTrajectory generate_reference(const Pose& initial, std::span<const ControlInput> controls,
                                       double tau);

/// Concatenation of constant-input segments starting from the origin pose.
ReferenceTrajectory mixed_reference(double tau, std::span<const Segment> segments,
                                    const Pose& initial = Pose());

/// The default benchmark path: straight / left arc / straight / right arc /
/// straight at unit speed.
std::vector<Segment> benchmark_segments();

// --- Model Jacobians (shared by filters, controllers, and prediction) ---

/// d f / d state at heading `theta`, speed `u` (global frame).
Eigen::Matrix3d global_state_jacobian(Angle theta, double u, double tau);

/// d f / d noise at heading `theta` (global frame).
Eigen::Matrix<double, 3, 2> global_noise_jacobian(Angle theta, double tau);

/// Frenet-frame error-state transition; depends on the inputs only.
Eigen::Matrix3d frenet_state_jacobian(ControlInput input, double tau);

/// Frenet-frame noise Jacobian; constant.
Eigen::Matrix<double, 3, 2> frenet_noise_jacobian(double tau);

// --- CSV I/O (header: t,x,y,theta,u,omega) ---

void save_reference_csv(const ReferenceTrajectory& ref, std::ostream& out);
void save_reference_csv(const ReferenceTrajectory& ref, const std::filesystem::path& path);

/// Throws std::runtime_error naming the first row whose pose is inconsistent
/// with the dynamics (tolerance 1e-9 per component).
ReferenceTrajectory load_reference_csv(std::istream& in);
ReferenceTrajectory load_reference_csv(const std::filesystem::path& path);

}  // namespace invlqg

#endif  // INVLQG_MODEL_HPP_
