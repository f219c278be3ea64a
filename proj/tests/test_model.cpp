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
#include <random>
#include <sstream>

#include <doctest.h>

#include "invlqg/model.hpp"

using namespace invlqg;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("model") {

TEST_CASE("step follows the discrete unicycle update") {
  const Pose straight = step(Pose(0, 0, 0), {1.0, 0.0}, Eigen::Vector2d::Zero(), 0.1);
  CHECK(straight.x == doctest::Approx(0.1));
  CHECK(straight.y == doctest::Approx(0.0));
  CHECK(straight.theta.radians() == doctest::Approx(0.0));

  const Pose sideways = step(Pose(0, 0, kPi / 2.0), {1.0, 0.0}, Eigen::Vector2d::Zero(), 0.1);
  CHECK(sideways.x == doctest::Approx(0.0).epsilon(0.0).scale(1.0));
  CHECK(sideways.y == doctest::Approx(0.1));
  CHECK(sideways.theta.radians() == doctest::Approx(kPi / 2.0));

  const Pose noisy = step(Pose(0, 0, 0), {1.0, 1.0}, Eigen::Vector2d(0.5, -0.5), 0.1);
  CHECK(noisy.x == doctest::Approx(0.15));
  CHECK(noisy.y == doctest::Approx(0.0));
  CHECK(noisy.theta.radians() == doctest::Approx(0.05));
}

TEST_CASE("dynamics are equivariant to rotations and translations") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> real(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const Pose x(real(rng), real(rng), real(rng));
    const ControlInput u{real(rng), real(rng)};
    const Eigen::Vector2d m(real(rng), real(rng));
    const RigidTransform g{real(rng), real(rng), Angle(real(rng))};
    const Pose moved_then_stepped = step(g.apply(x), u, m, 0.05);
    const Pose stepped_then_moved = g.apply(step(x, u, m, 0.05));
    CHECK(std::abs(moved_then_stepped.x - stepped_then_moved.x) < 1e-12);
    CHECK(std::abs(moved_then_stepped.y - stepped_then_moved.y) < 1e-12);
    CHECK(std::abs((moved_then_stepped.theta - stepped_then_moved.theta).radians()) < 1e-12);
  }
}

TEST_CASE("measure reads position only") {
  const Measurement noiseless = measure(Pose(1.0, 2.0, 0.7), Eigen::Vector2d::Zero());
  CHECK(noiseless.zx == doctest::Approx(1.0));
  CHECK(noiseless.zy == doctest::Approx(2.0));

  for (const double theta : {0.0, 0.5, -2.0, 3.0}) {
    const Measurement z = measure(Pose(0.0, 0.0, theta), Eigen::Vector2d(0.1, -0.1));
    CHECK(z.zx == doctest::Approx(0.1));
    CHECK(z.zy == doctest::Approx(-0.1));
  }

  // equivariance: transforming state and rotating noise transforms the measurement
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> real(-5.0, 5.0);
  for (int i = 0; i < 300; ++i) {
    const Pose x(real(rng), real(rng), real(rng));
    const Eigen::Vector2d n(real(rng), real(rng));
    const RigidTransform g{real(rng), real(rng), Angle(real(rng))};
    const Measurement moved = measure(g.apply(x), Rot2(g.theta0).apply(n));
    const Measurement base = measure(x, n);
    const Eigen::Vector2d expected =
        Rot2(g.theta0).apply(base.vector()) + Eigen::Vector2d(g.x0, g.y0);
    CHECK((moved.vector() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("noise model validation") {
  CHECK_THROWS_AS(NoiseModel(Eigen::Matrix2d::Identity(), -0.1), std::invalid_argument);
  Eigen::Matrix2d negative;
  negative << 1.0, 0.0, 0.0, -1e-6;
  CHECK_THROWS_AS(NoiseModel(negative, 0.0), std::invalid_argument);
  Eigen::Matrix2d asym;
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(NoiseModel(asym, 0.0), std::invalid_argument);
  const NoiseModel scaled = NoiseModel(Eigen::Matrix2d::Identity(), 0.5).scaled(4.0);
  CHECK(scaled.lambda() == doctest::Approx(2.0));
  CHECK(scaled.process_cov()(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("degenerate covariance always samples zero") {
  NormalStream stream(1);
  for (int i = 0; i < 10; ++i) {
    CHECK(sample_process_noise(stream, Eigen::Matrix2d::Zero()).isZero(0.0));
  }
}

TEST_CASE("sample covariance converges to the requested matrix") {
  const Eigen::Matrix2d m = Eigen::Vector2d(0.04, 0.01).asDiagonal();
  NormalStream stream(99);
  const int n = 100000;
  Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d draw = sample_process_noise(stream, m);
    acc += draw * draw.transpose();
  }
  acc /= n;
  CHECK(acc(0, 0) == doctest::Approx(0.04).epsilon(0.05));
  CHECK(acc(1, 1) == doctest::Approx(0.01).epsilon(0.05));
  // off-diagonal within 5% of the geometric diagonal scale
  CHECK(std::abs(acc(0, 1)) < 0.05 * std::sqrt(0.04 * 0.01));
}

TEST_CASE("singular process covariance samples on its range") {
  Eigen::Matrix2d rank1;
  rank1 << 0.0, 0.0, 0.0, 0.09;  // pure turn-rate noise
  NormalStream stream(123);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector2d draw = sample_process_noise(stream, rank1);
    CHECK(draw(0) == doctest::Approx(0.0).epsilon(0.0).scale(1.0));
  }
}

TEST_CASE("streams are deterministic per seed and decorrelated across seeds") {
  NormalStream a1(42);
  NormalStream a2(42);
  NormalStream b(43);
  double corr = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double xa = a1.next();
    CHECK(xa == a2.next());
    const double xb = b.next();
    corr += xa * xb;
    va += xa * xa;
    vb += xb * xb;
  }
  CHECK(std::abs(corr / std::sqrt(va * vb)) < 0.05);
}

TEST_CASE("measurement noise is isotropic with variance lambda") {
  NormalStream stream(5);
  const int n = 50000;
  Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d draw = sample_measurement_noise(stream, 0.25);
    acc += draw * draw.transpose();
  }
  acc /= n;
  CHECK(acc(0, 0) == doctest::Approx(0.25).epsilon(0.05));
  CHECK(acc(1, 1) == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("generate_reference integrates open loop") {
  std::vector<ControlInput> straight(10, {1.0, 0.0});
  const ReferenceTrajectory line = generate_reference(Pose(0, 0, 0), straight, 0.1);
  CHECK(line.poses.size() == 11);
  CHECK(line.poses.back().x == doctest::Approx(1.0));
  CHECK(line.poses.back().y == doctest::Approx(0.0));

  // circle: heading returns near zero after ceil(2 pi / (tau omega)) steps
  const double tau = 0.05;
  const double omega0 = 0.5;
  const int steps = static_cast<int>(std::ceil(2.0 * kPi / (tau * omega0)));
  std::vector<ControlInput> arc(steps, {1.0, omega0});
  const ReferenceTrajectory circle = generate_reference(Pose(0, 0, 0), arc, tau);
  // independent discrete integration of the heading
  double heading = 0.0;
  for (int i = 0; i < steps; ++i) heading = normalize_radians(heading + tau * omega0);
  CHECK(circle.poses.back().theta.radians() == doctest::Approx(heading).epsilon(1e-12));
  CHECK(std::abs(circle.poses.back().theta.radians()) < tau * omega0 + 1e-12);

  const ReferenceTrajectory empty = generate_reference(Pose(1, 2, 0.5), {}, 0.1);
  CHECK(empty.poses.size() == 1);
  CHECK(empty.controls.empty());
}

TEST_CASE("reference regenerates from its own controls") {
  const ReferenceTrajectory ref = mixed_reference(0.05, benchmark_segments());
  const ReferenceTrajectory again = generate_reference(ref.poses[0], ref.controls, ref.tau);
  REQUIRE(again.poses.size() == ref.poses.size());
  for (std::size_t t = 0; t < ref.poses.size(); ++t) {
    CHECK((pose_difference(again.poses[t], ref.poses[t])).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("mixed_reference handles segments") {
  const std::vector<Segment> one{{1.0, 1.0, 0.0}};
  const ReferenceTrajectory single = mixed_reference(0.1, one);
  const std::vector<ControlInput> controls(10, {1.0, 0.0});
  const ReferenceTrajectory direct = generate_reference(Pose(0, 0, 0), controls, 0.1);
  REQUIRE(single.poses.size() == direct.poses.size());
  for (std::size_t t = 0; t < single.poses.size(); ++t) {
    CHECK((pose_difference(single.poses[t], direct.poses[t])).cwiseAbs().maxCoeff() < 1e-15);
  }

  const std::vector<Segment> mirrored{{2.0, 1.0, 0.4}, {2.0, 1.0, -0.4}};
  const ReferenceTrajectory arcs = mixed_reference(0.05, mirrored);
  CHECK(std::abs(arcs.poses.back().theta.radians()) < 1e-9);

  const std::vector<Segment> bad{{-1.0, 1.0, 0.0}};
  CHECK_THROWS_AS(mixed_reference(0.05, bad), std::invalid_argument);
}

TEST_CASE("benchmark path mixes straight and curved segments") {
  const auto segments = benchmark_segments();
  int straight = 0;
  int curved = 0;
  for (const Segment& s : segments) {
    (s.omega == 0.0 ? straight : curved) += 1;
  }
  CHECK(straight >= 2);
  CHECK(curved >= 2);
  const ReferenceTrajectory ref = mixed_reference(0.05, segments);
  CHECK(ref.horizon() == 460);  // 23 s of path at tau = 0.05
}

TEST_CASE("model jacobians match finite differences") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> real(-2.0, 2.0);
  const double tau = 0.05;
  const double h = 1e-7;
  for (int i = 0; i < 50; ++i) {
    const Pose x(real(rng), real(rng), real(rng));
    const ControlInput u{real(rng), real(rng)};
    const Eigen::Matrix3d a = global_state_jacobian(x.theta, u.u, tau);
    const Eigen::Matrix<double, 3, 2> b = global_noise_jacobian(x.theta, tau);
    // finite differences of step() wrt state and noise
    for (int col = 0; col < 3; ++col) {
      Pose xp = x;
      Pose xm = x;
      if (col == 0) xp.x += h, xm.x -= h;
      if (col == 1) xp.y += h, xm.y -= h;
      if (col == 2) xp.theta = xp.theta + Angle(h), xm.theta = xm.theta - Angle(h);
      const Pose fp = step(xp, u, Eigen::Vector2d::Zero(), tau);
      const Pose fm = step(xm, u, Eigen::Vector2d::Zero(), tau);
      const Eigen::Vector3d d = pose_difference(fp, fm) / (2.0 * h);
      CHECK(std::abs(d(0) - a(0, col)) < 1e-6);
      CHECK(std::abs(d(1) - a(1, col)) < 1e-6);
      CHECK(std::abs(d(2) - a(2, col)) < 1e-6);
    }
    for (int col = 0; col < 2; ++col) {
      Eigen::Vector2d np = Eigen::Vector2d::Zero();
      Eigen::Vector2d nm = Eigen::Vector2d::Zero();
      np(col) += h;
      nm(col) -= h;
      const Eigen::Vector3d d =
          pose_difference(step(x, u, np, tau), step(x, u, nm, tau)) / (2.0 * h);
      CHECK((d - b.col(col)).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("reference csv round-trips and validates") {
  const ReferenceTrajectory ref = mixed_reference(0.05, benchmark_segments());
  std::stringstream buffer;
  save_reference_csv(ref, buffer);
  const ReferenceTrajectory loaded = load_reference_csv(buffer);
  REQUIRE(loaded.poses.size() == ref.poses.size());
  REQUIRE(loaded.controls.size() == ref.controls.size());
  CHECK(loaded.tau == doctest::Approx(ref.tau).epsilon(0.0));
  for (std::size_t t = 0; t < ref.poses.size(); ++t) {
    CHECK(pose_difference(loaded.poses[t], ref.poses[t]).cwiseAbs().maxCoeff() == 0.0);
  }

  // corrupt one row: the loader reports the first violating row
  std::stringstream dirty;
  save_reference_csv(ref, dirty);
  std::string text = dirty.str();
  std::size_t pos = 0;
  for (int skip = 0; skip < 5; ++skip) pos = text.find('\n', pos) + 1;  // row index 4
  text.insert(pos, "0.2,9999,0,0,1,0\n");
  std::stringstream corrupted(text);
  bool threw = false;
  try {
    load_reference_csv(corrupted);
  } catch (const std::runtime_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("row 5") != std::string::npos);
  }
  CHECK(threw);
}

}  // TEST_SUITE
