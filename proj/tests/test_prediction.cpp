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

#include <cmath>
#include <numbers>

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "invlqg/closedloop.hpp"
#include "invlqg/prediction.hpp"
#include "invlqg/random.hpp"

using namespace invlqg;

namespace {

CostWeights default_weights() {
  return CostWeights(Eigen::Vector3d(1.0, 1.0, 0.5).asDiagonal(),
                     Eigen::Vector2d(0.1, 0.1).asDiagonal());
}

Eigen::MatrixXd stack(const std::vector<Eigen::Vector3d>& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
  return m;
}

// final tracking errors of `trials` invariant-LQG runs at the given factors
std::vector<Eigen::Vector3d> simulate_final_tracking(const ReferenceTrajectory& ref,
                                                     const CostWeights& weights, double alpha_sq,
                                                     double beta_sq, int trials,
                                                     std::uint64_t seed) {
  const GainSchedule schedule = riccati_invariant(ref.controls, weights, ref.tau);
  TrialConfig trial;
  trial.alpha_sq = alpha_sq;
  trial.beta_sq = beta_sq;
  trial.base_P0 = Eigen::Vector3d(0.01, 0.01, 0.02).asDiagonal();
  trial.base_M = Eigen::Vector2d(0.01, 0.01).asDiagonal();
  trial.base_lambda = 0.01;
  trial.seed = seed;
  const Eigen::Matrix3d p0 = alpha_sq * trial.base_P0;
  const NoiseModel noise(beta_sq * trial.base_M, effective_lambda(trial.base_lambda, beta_sq));
  std::vector<Eigen::Vector3d> out;
  out.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    trial.trial_index = static_cast<std::uint64_t>(i);
    const NoiseRealization draws = draw_noise_realization(trial, ref.horizon());
    out.push_back(run_lqg_with_noise(ref, weights, schedule, p0, noise, draws).final_tracking);
  }
  return out;
}

}  // namespace

TEST_SUITE("prediction") {

TEST_CASE("noiseless prediction stays at zero") {
  const ReferenceTrajectory ref = mixed_reference(0.05, benchmark_segments());
  const CostWeights weights = default_weights();
  const NoiseModel silent(Eigen::Matrix2d::Zero(), 1e-12);
  const Eigen::Matrix3d p0 = Eigen::Matrix3d::Zero();
  for (const PredictionSeries& series : {predict_invariant(ref, weights, silent, p0),
                                         predict_conventional(ref, weights, silent, p0)}) {
    REQUIRE(series.joint.size() == ref.horizon() + 1);
    for (const Matrix6d& sigma : series.joint) {
      CHECK(sigma.cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("joint covariances stay symmetric PSD along the benchmark") {
  const ReferenceTrajectory ref = mixed_reference(0.05, benchmark_segments());
  const CostWeights weights = default_weights();
  const NoiseModel noise(Eigen::Matrix2d(Eigen::Vector2d(0.01, 0.01).asDiagonal()), 0.01);
  const Eigen::Matrix3d p0 = Eigen::Vector3d(0.01, 0.01, 0.02).asDiagonal();
  for (const PredictionSeries& series : {predict_invariant(ref, weights, noise, p0),
                                         predict_conventional(ref, weights, noise, p0)}) {
    for (const Matrix6d& sigma : series.joint) {
      CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() < 1e-10);
      const Eigen::SelfAdjointEigenSolver<Matrix6d> eig(sigma);
      CHECK(eig.eigenvalues().minCoeff() > -1e-9);
    }
  }
}

TEST_CASE("straight reference: both predictions coincide") {
  const std::vector<ControlInput> controls(200, {1.0, 0.0});
  const ReferenceTrajectory ref = generate_reference(Pose(0, 0, 0), controls, 0.05);
  const CostWeights weights = default_weights();
  const NoiseModel noise(Eigen::Matrix2d(Eigen::Vector2d(0.01, 0.01).asDiagonal()), 0.01);
  const Eigen::Matrix3d p0 = Eigen::Vector3d(0.01, 0.01, 0.02).asDiagonal();
  const PredictionSeries inv = predict_invariant(ref, weights, noise, p0);
  const PredictionSeries conv = predict_conventional(ref, weights, noise, p0);
  for (std::size_t t = 0; t < inv.tracking_global.size(); ++t) {
    CHECK((inv.tracking_global[t] - conv.tracking_global[t]).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("frame-aligned predictions stay close at high noise") {
  const ReferenceTrajectory ref = mixed_reference(0.05, benchmark_segments());
  const CostWeights weights = default_weights();
  const double beta_sq = 100.0;
  const NoiseModel noise(Eigen::Matrix2d(beta_sq * 0.01 * Eigen::Matrix2d::Identity()),
                         effective_lambda(0.01, beta_sq));
  const Eigen::Matrix3d p0 = 100.0 * Eigen::Vector3d(0.01, 0.01, 0.02).asDiagonal();
  const PredictionSeries inv = predict_invariant(ref, weights, noise, p0);
  const PredictionSeries conv = predict_conventional(ref, weights, noise, p0);
  for (std::size_t t = 0; t < inv.tracking_global.size(); ++t) {
    const Eigen::Matrix3d& a = inv.tracking_global[t];
    const Eigen::Matrix3d& b = conv.tracking_global[t];
    const double floor = 1e-3 * std::max(a.diagonal().maxCoeff(), b.diagonal().maxCoeff());
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double scale = std::max(std::abs(a(i, j)), std::abs(b(i, j)));
        CHECK(std::abs(a(i, j) - b(i, j)) <= 0.05 * scale + floor);
      }
    }
  }
}

TEST_CASE("symmetric KL closed forms") {
  const Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  const Eigen::MatrixXd eye2 = Eigen::MatrixXd::Identity(2, 2);

  CHECK(symmetric_kl(zero2, eye2, zero2, eye2) == doctest::Approx(0.0).scale(1.0));

  // N(0, I2) vs N(0, 4 I2)
  const double kl = symmetric_kl(zero2, eye2, zero2, 4.0 * eye2);
  CHECK(std::abs(kl - 1.125) < 1e-9);

  Eigen::MatrixXd c0(2, 2), c1(2, 2);
  c0 << 0.9, 0.2, 0.2, 1.4;
  c1 << 1.1, -0.3, -0.3, 0.8;
  Eigen::VectorXd m0(2), m1(2);
  m0 << 0.4, -0.2;
  m1 << -0.1, 0.3;
  CHECK(std::abs(symmetric_kl(m0, c0, m1, c1) - symmetric_kl(m1, c1, m0, c0)) < 1e-12);
  CHECK(symmetric_kl(m0, c0, m1, c1) >= 0.0);

  // dimension mismatch and non-PD inputs are rejected
  CHECK_THROWS_AS(symmetric_kl(zero2, eye2, Eigen::VectorXd::Zero(3),
                               Eigen::MatrixXd::Identity(3, 3)),
                  std::invalid_argument);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(symmetric_kl(zero2, indefinite, zero2, eye2), std::invalid_argument);
}

TEST_CASE("empirical_gaussian basics") {
  Eigen::MatrixXd constant(5, 2);
  for (int i = 0; i < 5; ++i) constant.row(i) << 2.0, -1.0;
  const auto [mean_c, cov_c] = empirical_gaussian(constant);
  CHECK((mean_c - Eigen::Vector2d(2.0, -1.0)).isZero(1e-14));
  CHECK(cov_c.cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(empirical_gaussian(Eigen::MatrixXd::Zero(2, 2)), std::invalid_argument);

  // LLN: recover a known covariance within 5%
  Eigen::Matrix2d target;
  target << 0.5, 0.2, 0.2, 0.3;
  NormalStream stream(17);
  const int n = 100000;
  Eigen::MatrixXd samples(n, 2);
  for (int i = 0; i < n; ++i) samples.row(i) = sample_gaussian(stream, target).transpose();
  const auto [mean, cov] = empirical_gaussian(samples);
  CHECK((cov - target).cwiseAbs().maxCoeff() < 0.05 * 0.5);
  // translating every sample moves the mean, not the covariance
  Eigen::MatrixXd shifted = samples;
  shifted.rowwise() += Eigen::RowVector2d(3.0, -4.0);
  const auto [mean_s, cov_s] = empirical_gaussian(shifted);
  CHECK((mean_s - mean - Eigen::Vector2d(3.0, -4.0)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((cov_s - cov).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("invariant prediction matches the Monte Carlo spread at nominal noise") {
  const ReferenceTrajectory ref = mixed_reference(0.05, benchmark_segments());
  const CostWeights weights = default_weights();
  const Eigen::Matrix3d p0 = Eigen::Vector3d(0.01, 0.01, 0.02).asDiagonal();
  const NoiseModel noise(Eigen::Matrix2d(Eigen::Vector2d(0.01, 0.01).asDiagonal()), 0.01);
  const PredictionSeries prediction = predict_invariant(ref, weights, noise, p0);

  const std::vector<Eigen::Vector3d> finals =
      simulate_final_tracking(ref, weights, 1.0, 1.0, 5000, 2026);
  const auto [mean, cov] = empirical_gaussian(stack(finals));
  const double kl = symmetric_kl(mean, cov, Eigen::Vector3d::Zero(),
                                 prediction.tracking_global.back());
  CHECK(kl < 0.1);

  // the divergence is sampling-dominated: more trials, smaller divergence
  const std::vector<Eigen::Vector3d> small(finals.begin(), finals.begin() + 500);
  const auto [mean_s, cov_s] = empirical_gaussian(stack(small));
  const double kl_small = symmetric_kl(mean_s, cov_s, Eigen::Vector3d::Zero(),
                                       prediction.tracking_global.back());
  CHECK(kl < kl_small);
}

}  // TEST_SUITE
