#include "rdars/localization.hpp"

#include <algorithm>
#include <cmath>

#include "rdars/constants.hpp"

namespace rdars {

namespace {

void check_inputs(const RangeInputs& in) {
  if (!std::isfinite(in.p_connected_dbm) || !std::isfinite(in.p_bs_dbm)) {
    throw std::domain_error("estimate_range: powers must be finite");
  }
  if (!(in.d_br > 0.0) || !std::isfinite(in.d_br)) {
    throw std::domain_error("estimate_range: d_br must be positive");
  }
  if (!(in.theta > 0.0) || !(in.theta < kPi)) {
    throw std::domain_error("estimate_range: theta must lie in (0, pi)");
  }
  if (!(in.alpha > 0.0) || !std::isfinite(in.alpha)) {
    throw std::domain_error("estimate_range: alpha must be positive");
  }
}

double implied_d_ub(double d_ur, double d_br, double cos_theta) {
  return std::sqrt(d_ur * d_ur + d_br * d_br - 2.0 * d_ur * d_br * cos_theta);
}

}  // namespace

RangeEstimate estimate_range(const RangeInputs& inputs, const Calibration& calib) {
  check_inputs(inputs);
  if (!std::isfinite(calib.offset_db)) {
    throw std::domain_error("estimate_range: calibration offset must be finite");
  }

  const double ratio_db =
      inputs.p_connected_dbm - inputs.p_bs_dbm - calib.offset_db;
  const double r = std::pow(10.0, ratio_db / (10.0 * inputs.alpha));
  const double cos_theta = std::cos(inputs.theta);
  const double d_br = inputs.d_br;

  RangeEstimate est;
  if (std::abs(r - 1.0) <= 1e-12) {
    // Degenerate quadratic: 2 d_br cos(theta) d_ur = d_br^2. cos(theta)
    // at or below numerical zero leaves it unsatisfiable.
    if (cos_theta <= 1e-9) {
      throw GeometryInfeasible("estimate_range: r = 1 with cos(theta) <= 0");
    }
    est.d_ur = d_br / (2.0 * cos_theta);
    est.d_ub = est.d_ur;
    est.roots_found = 1;
    return est;
  }

  const double a = r * r - 1.0;
  const double b = 2.0 * d_br * cos_theta;
  const double c = -d_br * d_br;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    throw GeometryInfeasible("estimate_range: no real root for the given ratio");
  }
  // Cancellation-safe root pair.
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double roots[2] = {q / a, (q != 0.0) ? c / q : -b / a};
  if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);

  std::vector<double> feasible;
  for (double root : roots) {
    if (root > 0.0 && std::isfinite(root)) feasible.push_back(root);
  }
  if (feasible.empty()) {
    throw GeometryInfeasible("estimate_range: no positive root");
  }

  est.roots_found = static_cast<int>(feasible.size());
  est.ambiguous = feasible.size() == 2;
  est.d_ur = feasible.front();  // smaller root when ambiguous
  est.d_ub = implied_d_ub(est.d_ur, d_br, cos_theta);
  return est;
}

Calibration calibrate(
    std::span<const std::pair<RangeInputs, double>> references) {
  if (references.empty()) {
    throw std::domain_error("calibrate: at least one reference is required");
  }
  std::vector<double> residuals;
  residuals.reserve(references.size());
  for (const auto& [inputs, true_d_ur] : references) {
    check_inputs(inputs);
    if (!(true_d_ur > 0.0)) {
      throw std::domain_error("calibrate: reference range must be positive");
    }
    const double d_ub =
        implied_d_ub(true_d_ur, inputs.d_br, std::cos(inputs.theta));
    if (!(d_ub > 0.0)) {
      throw GeometryInfeasible("calibrate: degenerate reference geometry");
    }
    const double ratio_db_star =
        10.0 * inputs.alpha * std::log10(d_ub / true_d_ur);
    residuals.push_back(inputs.p_connected_dbm - inputs.p_bs_dbm -
                        ratio_db_star);
  }
  std::sort(residuals.begin(), residuals.end());
  const std::size_t n = residuals.size();
  const double median = (n % 2 == 1)
                            ? residuals[n / 2]
                            : 0.5 * (residuals[n / 2 - 1] + residuals[n / 2]);
  return Calibration{median};
}

Eigen::Vector3d localize(const AzEl& best_beam, const RangeEstimate& range,
                         const RdarsPose& pose) {
  if (!(range.d_ur > 0.0)) {
    throw std::domain_error("localize: range must be positive");
  }
  return pose.to_world(range.d_ur * direction_unit_vector(best_beam));
}

}  // namespace rdars
