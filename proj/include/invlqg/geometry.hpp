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

#ifndef INVLQG_GEOMETRY_HPP_
#define INVLQG_GEOMETRY_HPP_

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace invlqg {

/// Wraps an angle in radians to (-pi, pi].
inline double normalize_radians(double radians) {
  double r = std::remainder(radians, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

/// Plane angle, always normalized to (-pi, pi].
class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians) : value_(normalize_radians(radians)) {}

  double radians() const { return value_; }

  Angle operator+(Angle other) const { return Angle(value_ + other.value_); }
  Angle operator-(Angle other) const { return Angle(value_ - other.value_); }
  Angle operator-() const { return Angle(-value_); }

 private:
  double value_ = 0.0;
};

/// 2D rotation. Stored as an angle so that composition is exact angle
/// addition; the matrix form is materialized on demand.
class Rot2 {
 public:
  Rot2() = default;
  explicit Rot2(Angle angle) : angle_(angle) {}
  static Rot2 from_radians(double radians) { return Rot2(Angle(radians)); }

  Angle angle() const { return angle_; }

  Eigen::Vector2d apply(const Eigen::Vector2d& v) const {
    const double c = std::cos(angle_.radians());
    const double s = std::sin(angle_.radians());
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
  }

  Eigen::Matrix2d matrix() const {
    const double c = std::cos(angle_.radians());
    const double s = std::sin(angle_.radians());
    Eigen::Matrix2d m;
    m << c, -s, s, c;
    return m;
  }

  Rot2 operator*(Rot2 other) const { return Rot2(angle_ + other.angle_); }
  Rot2 inverse() const { return Rot2(-angle_); }

 private:
  Angle angle_;
};

/// Block operator diag(R_phi, 1): rotates the position part of a pose-error
/// vector and leaves the heading component untouched.
class Upsilon {
 public:
  Upsilon() = default;
  explicit Upsilon(Angle phi) : rot_(phi) {}
  static Upsilon from_radians(double radians) { return Upsilon(Angle(radians)); }

  Angle angle() const { return rot_.angle(); }

  Eigen::Vector3d apply(const Eigen::Vector3d& v) const {
    const Eigen::Vector2d p = rot_.apply(v.head<2>());
    return {p.x(), p.y(), v.z()};
  }

  Eigen::Matrix3d matrix() const {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m.topLeftCorner<2, 2>() = rot_.matrix();
    return m;
  }

  /// U * cov * U^T (U is orthogonal, so this maps covariances between frames).
  Eigen::Matrix3d rotate_covariance(const Eigen::Matrix3d& cov) const {
    const Eigen::Matrix3d u = matrix();
    return u * cov * u.transpose();
  }

  Upsilon operator*(Upsilon other) const { return Upsilon(rot_.angle() + other.rot_.angle()); }
  Upsilon inverse() const { return Upsilon(-rot_.angle()); }

 private:
  Rot2 rot_;
};

/// Planar pose (x, y, theta); theta kept normalized by construction.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  Angle theta;

  Pose() = default;
  Pose(double x_, double y_, double theta_radians) : x(x_), y(y_), theta(theta_radians) {}
  Pose(double x_, double y_, Angle theta_) : x(x_), y(y_), theta(theta_) {}

  Eigen::Vector2d position() const { return {x, y}; }
};

/// Position-extraction matrix H = [I2 | 0].
inline Eigen::Matrix<double, 2, 3> position_h() {
  Eigen::Matrix<double, 2, 3> h = Eigen::Matrix<double, 2, 3>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return h;
}

inline Eigen::Vector3d upsilon_apply(Angle phi, const Eigen::Vector3d& v) {
  return Upsilon(phi).apply(v);
}

/// Maps a global-frame error vector into the frame at `frame_angle`
/// (Upsilon_{-frame_angle} * error).
inline Eigen::Vector3d to_local_error(const Eigen::Vector3d& error, Angle frame_angle) {
  return Upsilon(-frame_angle).apply(error);
}

/// Inverse of to_local_error.
inline Eigen::Vector3d to_global_error(const Eigen::Vector3d& error, Angle frame_angle) {
  return Upsilon(frame_angle).apply(error);
}

/// Componentwise pose error a - b; positions subtract plainly, the angle
/// component is wrapped to (-pi, pi].
inline Eigen::Vector3d pose_difference(const Pose& a, const Pose& b) {
  return {a.x - b.x, a.y - b.y, (a.theta - b.theta).radians()};
}

/// Rigid transform of the plane: p -> R_{theta0} p + (x0, y0), headings shift
/// by theta0.
struct RigidTransform {
  double x0 = 0.0;
  double y0 = 0.0;
  Angle theta0;

  Pose apply(const Pose& p) const {
    const Eigen::Vector2d q = Rot2(theta0).apply(p.position());
    return {x0 + q.x(), y0 + q.y(), p.theta + theta0};
  }
};

}  // namespace invlqg

#endif  // INVLQG_GEOMETRY_HPP_
