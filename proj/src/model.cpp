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

#include "invlqg/model.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "invlqg/csv.hpp"

namespace invlqg {

NoiseModel::NoiseModel(const Eigen::Matrix2d& process_cov, double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("measurement noise lambda must be >= 0");
  }
  if ((process_cov - process_cov.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("process covariance must be symmetric");
  }
  process_cov_ = 0.5 * (process_cov + process_cov.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(process_cov_);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw std::invalid_argument("process covariance must be positive semi-definite");
  }
}

Pose step(const Pose& state, ControlInput input, const Eigen::Vector2d& noise, double tau) {
  const double c = std::cos(state.theta.radians());
  const double s = std::sin(state.theta.radians());
  return {state.x + tau * (input.u + noise(0)) * c,
          state.y + tau * (input.u + noise(0)) * s,
          state.theta + Angle(tau * (input.omega + noise(1)))};
}

Measurement measure(const Pose& state, const Eigen::Vector2d& noise) {
  return {state.x + noise(0), state.y + noise(1)};
}

Eigen::Vector2d sample_process_noise(NormalStream& stream, const Eigen::Matrix2d& process_cov) {
  return sample_gaussian(stream, process_cov);
}

Eigen::Vector2d sample_measurement_noise(NormalStream& stream, double lambda) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("measurement noise lambda must be >= 0");
  }
  return std::sqrt(lambda) * stream.next2();
}

ReferenceTrajectory generate_reference(const Pose& initial, std::span<const ControlInput> controls,
                                       double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("tau must be > 0");
  }
  ReferenceTrajectory ref;
  ref.tau = tau;
  ref.poses.reserve(controls.size() + 1);
  ref.controls.assign(controls.begin(), controls.end());
  ref.poses.push_back(initial);
  for (const ControlInput& input : controls) {
    ref.poses.push_back(step(ref.poses.back(), input, Eigen::Vector2d::Zero(), tau));
  }
  return ref;
}

ReferenceTrajectory mixed_reference(double tau, std::span<const Segment> segments,
                                    const Pose& initial) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("tau must be > 0");
  }
  std::vector<ControlInput> controls;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& seg = segments[i];
    if (!(seg.duration > 0.0)) {
      throw std::invalid_argument("segment " + std::to_string(i) + ": duration must be > 0");
    }
    const auto steps = static_cast<std::size_t>(std::llround(seg.duration / tau));
    if (steps == 0) {
      throw std::invalid_argument("segment " + std::to_string(i) + ": shorter than one step");
    }
    controls.insert(controls.end(), steps, ControlInput{seg.u, seg.omega});
  }
  return generate_reference(initial, controls, tau);
}

std::vector<Segment> benchmark_segments() {
  return {{5.0, 1.0, 0.0}, {4.0, 1.0, 0.5}, {5.0, 1.0, 0.0}, {4.0, 1.0, -0.5}, {5.0, 1.0, 0.0}};
}

Eigen::Matrix3d global_state_jacobian(Angle theta, double u, double tau) {
  Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
  a(0, 2) = -tau * u * std::sin(theta.radians());
  a(1, 2) = tau * u * std::cos(theta.radians());
  return a;
}

Eigen::Matrix<double, 3, 2> global_noise_jacobian(Angle theta, double tau) {
  Eigen::Matrix<double, 3, 2> b = Eigen::Matrix<double, 3, 2>::Zero();
  b(0, 0) = tau * std::cos(theta.radians());
  b(1, 0) = tau * std::sin(theta.radians());
  b(2, 1) = tau;
  return b;
}

Eigen::Matrix3d frenet_state_jacobian(ControlInput input, double tau) {
  Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
  a(0, 1) = tau * input.omega;
  a(1, 0) = -tau * input.omega;
  a(1, 2) = tau * input.u;
  return a;
}

Eigen::Matrix<double, 3, 2> frenet_noise_jacobian(double tau) {
  Eigen::Matrix<double, 3, 2> b = Eigen::Matrix<double, 3, 2>::Zero();
  b(0, 0) = tau;
  b(2, 1) = tau;
  return b;
}

void save_reference_csv(const ReferenceTrajectory& ref, std::ostream& out) {
  out << "t,x,y,theta,u,omega\n";
  for (std::size_t t = 0; t < ref.poses.size(); ++t) {
    const Pose& p = ref.poses[t];
    // the terminal row has no control; write zeros, ignored on load
    const ControlInput input = t < ref.controls.size() ? ref.controls[t] : ControlInput{};
    out << format_double(static_cast<double>(t) * ref.tau) << ',' << format_double(p.x) << ','
        << format_double(p.y) << ',' << format_double(p.theta.radians()) << ','
        << format_double(input.u) << ',' << format_double(input.omega) << '\n';
  }
}

void save_reference_csv(const ReferenceTrajectory& ref, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  save_reference_csv(ref, out);
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

ReferenceTrajectory load_reference_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("reference csv: empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x,y,theta,u,omega") {
    throw std::runtime_error("reference csv: expected header 't,x,y,theta,u,omega'");
  }
  ReferenceTrajectory ref;
  ref.tau = 0.0;
  std::vector<double> times;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 6) {
      throw std::runtime_error("reference csv row " + std::to_string(row) +
                               ": expected 6 fields, got " + std::to_string(fields.size()));
    }
    try {
      times.push_back(parse_double(fields[0]));
      ref.poses.emplace_back(parse_double(fields[1]), parse_double(fields[2]),
                             parse_double(fields[3]));
      ref.controls.push_back({parse_double(fields[4]), parse_double(fields[5])});
    } catch (const std::exception& e) {
      throw std::runtime_error("reference csv row " + std::to_string(row) + ": " + e.what());
    }
  }
  if (ref.poses.size() < 2) {
    throw std::runtime_error("reference csv: need at least two rows");
  }
  ref.controls.pop_back();  // the terminal row carries no control
  // t is time in seconds; tau recovered from the first two rows
  ref.tau = times[1] - times[0];
  if (!(ref.tau > 0.0)) {
    throw std::runtime_error("reference csv: time column must be strictly increasing");
  }
  for (std::size_t t = 0; t + 1 < ref.poses.size(); ++t) {
    const Pose expected = step(ref.poses[t], ref.controls[t], Eigen::Vector2d::Zero(), ref.tau);
    const Eigen::Vector3d dev = pose_difference(ref.poses[t + 1], expected);
    if (dev.cwiseAbs().maxCoeff() > 1e-9) {
      throw std::runtime_error("reference csv row " + std::to_string(t + 2) +
                               ": pose inconsistent with dynamics (max deviation " +
                               format_double(dev.cwiseAbs().maxCoeff()) + ")");
    }
  }
  return ref;
}

ReferenceTrajectory load_reference_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return load_reference_csv(in);
}

}  // namespace invlqg
