#include "rdars/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace rdars {

namespace {

bool is_unit(const Eigen::Vector3d& v, double tol = 1e-9) {
  return std::abs(v.norm() - 1.0) <= tol;
}

}  // namespace

void RdarsPose::validate() const {
  if (!origin.allFinite() || !rotation.allFinite()) {
    throw std::domain_error("RdarsPose: non-finite entries");
  }
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::domain_error("RdarsPose: rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > 1e-9) {
    throw std::domain_error("RdarsPose: rotation determinant must be +1");
  }
}

ArrayGeometry ArrayGeometry::uniform(int rows, int cols, double spacing) {
  if (rows <= 0 || cols <= 0) {
    throw std::domain_error("ArrayGeometry: element counts must be positive");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw std::domain_error("ArrayGeometry: spacing must be positive");
  }
  ArrayGeometry g;
  g.rows = rows;
  g.cols = cols;
  g.spacing = spacing;
  g.element_positions.resize(3, rows * cols);
  const double x0 = -0.5 * (cols - 1) * spacing;
  const double y0 = -0.5 * (rows - 1) * spacing;
  for (int n = 0; n < rows * cols; ++n) {
    const int row = n / cols;
    const int col = n % cols;
    g.element_positions.col(n) << x0 + col * spacing, y0 + row * spacing, 0.0;
  }
  return g;
}

ArrayGeometry ArrayGeometry::standard_panel() {
  return uniform(16, 16, 0.5 * wavelength(3.7e9));
}

double wavelength(double carrier_hz) {
  if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
    throw std::domain_error("wavelength: carrier frequency must be positive");
  }
  return kSpeedOfLight / carrier_hz;
}

Eigen::Vector3d direction_unit_vector(const AzEl& angles) {
  constexpr double half_pi = kPi / 2.0;
  if (!(std::abs(angles.az) <= half_pi) || !(std::abs(angles.el) <= half_pi)) {
    throw std::domain_error("direction_unit_vector: angles outside [-pi/2, pi/2]");
  }
  const double ce = std::cos(angles.el);
  return {ce * std::sin(angles.az), std::sin(angles.el), ce * std::cos(angles.az)};
}

AzEl azel_from_direction(const Eigen::Vector3d& unit_dir) {
  if (!is_unit(unit_dir)) {
    throw std::domain_error("azel_from_direction: input must be a unit vector");
  }
  return {std::atan2(unit_dir.x(), unit_dir.z()),
          std::asin(std::clamp(unit_dir.y(), -1.0, 1.0))};
}

double steering_phase(const Eigen::Vector3d& element_pos,
                      const Eigen::Vector3d& direction, double lambda) {
  if (!is_unit(direction)) {
    throw std::domain_error("steering_phase: direction must be a unit vector");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("steering_phase: wavelength must be positive");
  }
  return kTwoPi / lambda * element_pos.dot(direction);
}

Eigen::VectorXd steering_phases(const ArrayGeometry& geometry,
                                const Eigen::Vector3d& direction, double lambda) {
  if (!is_unit(direction)) {
    throw std::domain_error("steering_phases: direction must be a unit vector");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::domain_error("steering_phases: wavelength must be positive");
  }
  return kTwoPi / lambda * (geometry.element_positions.transpose() * direction);
}

double angle_between(const Eigen::Vector3d& dir_a, const Eigen::Vector3d& dir_b) {
  if (!is_unit(dir_a) || !is_unit(dir_b)) {
    throw std::domain_error("angle_between: inputs must be unit vectors");
  }
  return std::acos(std::clamp(dir_a.dot(dir_b), -1.0, 1.0));
}

}  // namespace rdars
