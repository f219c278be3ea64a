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

#ifndef INVLQG_RANDOM_HPP_
#define INVLQG_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace invlqg {

/// SplitMix64 finalizer; full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Splittable seeding: independent sub-stream seeds keyed by
/// (base_seed, trial_index, stream_id).
inline std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t trial_index,
                                 std::uint64_t stream_id) {
  return mix64(mix64(mix64(base_seed) ^ trial_index) ^ stream_id);
}

/// Deterministic N(0,1) stream. Each draw consumes exactly two engine outputs
/// (Box-Muller, cosine branch only), so the sequence is fully pinned by the
/// seed with no hidden pair cache.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    // u1 in (0,1], u2 in [0,1)
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::Vector2d next2() {
    const double a = next();
    const double b = next();
    return {a, b};
  }

  Eigen::Vector3d next3() {
    const double a = next();
    const double b = next();
    const double c = next();
    return {a, b, c};
  }

 private:
  double uniform01() {
    // 53-bit mantissa in [0,1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
};

/// Symmetric PSD square root via eigendecomposition; tolerates singular
/// matrices, rejects eigenvalues below -1e-12.
template <int N>
Eigen::Matrix<double, N, N> psd_sqrt(const Eigen::Matrix<double, N, N>& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> eig(cov);
  Eigen::Matrix<double, N, 1> values = eig.eigenvalues();
  for (int i = 0; i < N; ++i) {
    if (values(i) < -1e-12) {
      throw std::invalid_argument("covariance has eigenvalue below -1e-12");
    }
    values(i) = std::sqrt(std::max(values(i), 0.0));
  }
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

/// Zero-mean draw with covariance `cov` (k normals consumed per call).
inline Eigen::Vector2d sample_gaussian(NormalStream& stream, const Eigen::Matrix2d& cov) {
  return psd_sqrt<2>(cov) * stream.next2();
}

inline Eigen::Vector3d sample_gaussian(NormalStream& stream, const Eigen::Matrix3d& cov) {
  return psd_sqrt<3>(cov) * stream.next3();
}

}  // namespace invlqg

#endif  // INVLQG_RANDOM_HPP_
