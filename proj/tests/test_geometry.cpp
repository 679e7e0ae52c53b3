#include <doctest.h>

#include <cmath>

#include "rdars/geometry.hpp"
#include "rdars/rng.hpp"

using namespace rdars;

namespace {

AzEl random_azel(std::mt19937_64& rng, double margin = 0.0) {
  const double half = kPi / 2.0 - margin;
  return {uniform_range(rng, -half, half), uniform_range(rng, -half, half)};
}

}  // namespace

TEST_CASE("wavelength values and errors") {
  CHECK(std::abs(wavelength(3.7e9) - 0.0810250) <= 1e-6);
  CHECK(wavelength(299792458.0) == doctest::Approx(1.0));
  CHECK(wavelength(1.85e9) == doctest::Approx(2.0 * wavelength(3.7e9)));
  CHECK_THROWS_AS(wavelength(0.0), std::domain_error);
  CHECK_THROWS_AS(wavelength(-1.0), std::domain_error);
}

TEST_CASE("direction_unit_vector anchors") {
  const Eigen::Vector3d boresight = direction_unit_vector({0.0, 0.0});
  CHECK(boresight.isApprox(Eigen::Vector3d(0, 0, 1), 1e-15));
  CHECK(direction_unit_vector({kPi / 2, 0.0}).isApprox(Eigen::Vector3d(1, 0, 0), 1e-12));
  CHECK(direction_unit_vector({0.0, kPi / 2}).isApprox(Eigen::Vector3d(0, 1, 0), 1e-12));
  CHECK_THROWS_AS(direction_unit_vector({1.8, 0.0}), std::domain_error);
  CHECK_THROWS_AS(direction_unit_vector({0.0, -1.8}), std::domain_error);
}

TEST_CASE("direction_unit_vector norm and round trip") {
  auto rng = make_stream(7, 0);
  for (int i = 0; i < 500; ++i) {
    const AzEl angles = random_azel(rng, 1e-6);
    const Eigen::Vector3d u = direction_unit_vector(angles);
    CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
    const AzEl back = azel_from_direction(u);
    CHECK(std::abs(back.az - angles.az) <= 1e-9);
    CHECK(std::abs(back.el - angles.el) <= 1e-9);
  }
}

TEST_CASE("steering_phase") {
  const double lambda = wavelength(3.7e9);
  CHECK(steering_phase({lambda / 2, 0, 0}, {0, 0, 1}, lambda) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(steering_phase({lambda / 2, 0, 0}, {1, 0, 0}, lambda) ==
        doctest::Approx(kPi));
  // (2*pi/lambda) * (lambda/4 * sqrt(2)/2) = pi * sqrt(2)/4
  const double s = std::sqrt(2.0) / 2.0;
  CHECK(steering_phase({lambda / 4, 0, 0}, {s, 0, s}, lambda) ==
        doctest::Approx(1.1107207345395915).epsilon(1e-12));
  CHECK(steering_phase({lambda / 2, 0, 0}, {s, 0, s}, lambda) ==
        doctest::Approx(2.221441469079183).epsilon(1e-12));
  CHECK_THROWS_AS(steering_phase({1, 0, 0}, {0.5, 0, 0}, lambda), std::domain_error);
  CHECK_THROWS_AS(steering_phase({1, 0, 0}, {0, 0, 1}, 0.0), std::domain_error);
}

TEST_CASE("steering_phase is linear in element position") {
  auto rng = make_stream(11, 0);
  const double lambda = wavelength(3.7e9);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d p1(uniform_range(rng, -1, 1), uniform_range(rng, -1, 1),
                             uniform_range(rng, -1, 1));
    const Eigen::Vector3d p2(uniform_range(rng, -1, 1), uniform_range(rng, -1, 1),
                             uniform_range(rng, -1, 1));
    const Eigen::Vector3d u = direction_unit_vector(random_azel(rng));
    CHECK(steering_phase(p1 + p2, u, lambda) ==
          doctest::Approx(steering_phase(p1, u, lambda) +
                          steering_phase(p2, u, lambda))
              .epsilon(1e-9));
  }
}

TEST_CASE("angle_between") {
  const Eigen::Vector3d ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);
  CHECK(angle_between(ex, ex) == doctest::Approx(0.0));
  CHECK(angle_between(ex, ey) == doctest::Approx(kPi / 2));
  const Eigen::Vector3d tilted(std::sqrt(3.0) / 2.0, 0.0, 0.5);
  CHECK(angle_between(ez, tilted) == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK_THROWS_AS(angle_between(Eigen::Vector3d(2, 0, 0), ex), std::domain_error);

  auto rng = make_stream(13, 0);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d a = direction_unit_vector(random_azel(rng));
    const Eigen::Vector3d b = direction_unit_vector(random_azel(rng));
    CHECK(angle_between(a, b) == doctest::Approx(angle_between(b, a)));
    CHECK(angle_between(a, b) >= 0.0);
    CHECK(angle_between(a, b) <= kPi);
  }
}

TEST_CASE("RdarsPose validation and transforms") {
  RdarsPose pose;
  CHECK_NOTHROW(pose.validate());

  pose.rotation(0, 0) = 2.0;
  CHECK_THROWS_AS(pose.validate(), std::domain_error);

  // Proper rotation about y by 30 degrees.
  RdarsPose tilted;
  const double c = std::cos(kPi / 6), s = std::sin(kPi / 6);
  tilted.rotation << c, 0, s, 0, 1, 0, -s, 0, c;
  tilted.origin = {1, 2, 3};
  CHECK_NOTHROW(tilted.validate());
  const Eigen::Vector3d local(0.5, -0.25, 2.0);
  CHECK(tilted.to_local(tilted.to_world(local)).isApprox(local, 1e-12));

  // Reflections (det = -1) are rejected.
  RdarsPose mirrored;
  mirrored.rotation << 1, 0, 0, 0, 1, 0, 0, 0, -1;
  CHECK_THROWS_AS(mirrored.validate(), std::domain_error);
}

TEST_CASE("ArrayGeometry layout") {
  const ArrayGeometry g = ArrayGeometry::standard_panel();
  CHECK(g.rows == 16);
  CHECK(g.cols == 16);
  CHECK(g.element_count() == 256);
  CHECK(g.spacing == doctest::Approx(0.5 * wavelength(3.7e9)));

  // Element n sits at (row = n / cols, col = n % cols) on the centered grid.
  for (int n : {0, 15, 17, 240, 255}) {
    const int row = n / g.cols;
    const int col = n % g.cols;
    const Eigen::Vector3d expected(
        (-7.5 + col) * g.spacing, (-7.5 + row) * g.spacing, 0.0);
    CHECK(g.element_positions.col(n).isApprox(expected, 1e-12));
  }
  CHECK(g.element_positions.row(2).cwiseAbs().maxCoeff() == 0.0);  // planar

  const ArrayGeometry line = ArrayGeometry::uniform(1, 4, 0.01);
  CHECK(line.element_count() == 4);
  CHECK(line.element_positions.col(0).x() == doctest::Approx(-0.015));
  CHECK(line.element_positions.col(3).x() == doctest::Approx(0.015));
  CHECK_THROWS_AS(ArrayGeometry::uniform(0, 4, 0.01), std::domain_error);
  CHECK_THROWS_AS(ArrayGeometry::uniform(4, 4, 0.0), std::domain_error);
}
