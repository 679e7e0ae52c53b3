#pragma once

#include <Eigen/Dense>

#include "rdars/constants.hpp"

// Coordinate conventions shared by the whole toolkit.
//
// The surface has a local right-handed frame with +z along the boresight
// normal of the panel, +x along the element columns and +y along the rows.
// Azimuth rotates a direction from +z toward +x, elevation toward +y:
//
//     u(az, el) = (cos el * sin az,  sin el,  cos el * cos az)
//
// World geometry is expressed through RdarsPose, which maps local vectors
// into the world frame.

namespace rdars {

/// Azimuth/elevation pair in radians, each restricted to [-pi/2, pi/2]
/// (the front half-space of the surface).
struct AzEl {
  double az = 0.0;
  double el = 0.0;
};

/// Panel placement: world-frame origin plus a local->world rotation.
struct RdarsPose {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  /// Throws std::domain_error unless rotation is orthonormal (1e-9) with
  /// determinant +1.
  void validate() const;

  Eigen::Vector3d to_world(const Eigen::Vector3d& local) const {
    return origin + rotation * local;
  }
  Eigen::Vector3d to_local(const Eigen::Vector3d& world) const {
    return rotation.transpose() * (world - origin);
  }
};

/// Regular rows x cols element grid in the local frame (z = 0 plane),
/// centered on the origin. Element n sits at row n / cols, column n % cols.
struct ArrayGeometry {
  int rows = 0;
  int cols = 0;
  double spacing = 0.0;               // meters between adjacent elements
  Eigen::Matrix3Xd element_positions;  // 3 x (rows*cols), column n = element n

  static ArrayGeometry uniform(int rows, int cols, double spacing);

  /// 16x16 panel at half-wavelength pitch for the default 3.7 GHz carrier.
  static ArrayGeometry standard_panel();

  int element_count() const { return rows * cols; }
};

/// c / carrier_hz. Throws std::domain_error for non-positive or non-finite
/// frequency.
double wavelength(double carrier_hz);

/// Unit vector for the given angles in the local frame.
Eigen::Vector3d direction_unit_vector(const AzEl& angles);

/// Inverse of direction_unit_vector for directions in the open front
/// half-space: az = atan2(x, z), el = asin(y).
AzEl azel_from_direction(const Eigen::Vector3d& unit_dir);

/// Planar-wavefront phase advance (2*pi/lambda) * (element_pos . direction),
/// unwrapped. `direction` must be unit norm within 1e-9.
double steering_phase(const Eigen::Vector3d& element_pos,
                      const Eigen::Vector3d& direction, double lambda);

/// steering_phase for every element of the array at once.
Eigen::VectorXd steering_phases(const ArrayGeometry& geometry,
                                const Eigen::Vector3d& direction, double lambda);

/// arccos of the clamped dot product; both inputs must be unit vectors
/// within 1e-9. Result in [0, pi].
double angle_between(const Eigen::Vector3d& dir_a, const Eigen::Vector3d& dir_b);

}  // namespace rdars
