#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rdars/geometry.hpp"

// Stage 2: range estimation from the ratio of the power received on the
// connected elements to the direct-path power at the BS. Transmit power and
// the 1 m reference loss cancel in the ratio, so the estimator needs only
// the assumed path-loss exponent, the known RDARS-BS baseline and the angle
// between the UE and BS directions at the surface. Fixed hardware and
// measurement biases are absorbed by a scalar calibration offset.

namespace rdars {

/// Raised when the measured ratio and geometry admit no valid triangle.
class GeometryInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RangeInputs {
  double p_connected_dbm = 0.0;  // mean RSSI over the connected elements
  double p_bs_dbm = 0.0;         // direct-path RSSI at the BS antenna
  double theta = 0.0;            // angle UE-RDARS vs BS-RDARS, (0, pi)
  double d_br = 0.0;             // RDARS-BS distance (known from deployment)
  double alpha = 2.0;            // path-loss exponent assumed by the estimator
};

struct RangeEstimate {
  double d_ur = 0.0;     // UE-RDARS distance
  double d_ub = 0.0;     // implied UE-BS distance, r * d_ur
  int roots_found = 0;   // feasible positive roots of the range quadratic
  bool ambiguous = false;  // two feasible roots; the smaller one is returned
};

/// Scalar correction applied to the measured power ratio in dB.
struct Calibration {
  double offset_db = 0.0;
};

/// Inverts the power-ratio model:
///   r = 10^((p_c - p_b - offset) / (10*alpha)),  d_ub = r * d_ur,
///   (r^2 - 1) d_ur^2 + 2 d_br cos(theta) d_ur - d_br^2 = 0.
/// For r == 1 (within 1e-12) the linear solution d_ur = d_br / (2 cos theta)
/// applies. Throws GeometryInfeasible when no positive root exists, and
/// std::domain_error on invalid inputs.
RangeEstimate estimate_range(const RangeInputs& inputs,
                             const Calibration& calib = {});

/// Median-of-residuals offset from reference measurements at known ranges.
/// Throws std::domain_error for an empty list; infeasible reference
/// geometry propagates as GeometryInfeasible.
Calibration calibrate(
    std::span<const std::pair<RangeInputs, double>> references);

/// World position implied by the selected beam and the range estimate.
Eigen::Vector3d localize(const AzEl& best_beam, const RangeEstimate& range,
                         const RdarsPose& pose);

}  // namespace rdars
