#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rdars/geometry.hpp"
#include "rdars/surface.hpp"

// Stage 1 of the localization scheme: a block-partitioned 2D
// azimuth-elevation sweep. A coarse grid locates the winning block, then a
// finer grid confined to that block refines the angle, so far fewer beams
// are probed than a full fine-resolution scan.

namespace rdars {

/// Raised when the observation callback fails (e.g. the control link to a
/// live device times out); aborts the sweep.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepGrid {
  double az_min = deg2rad(-60.0);
  double az_max = deg2rad(60.0);
  double el_min = deg2rad(-60.0);
  double el_max = deg2rad(60.0);
  double coarse_step = deg2rad(10.0);
  double fine_step = deg2rad(2.0);

  /// Throws std::domain_error on min >= max, non-positive steps, or
  /// fine_step > coarse_step.
  void validate() const;
};

struct SweepSample {
  AzEl angles;
  double rssi_dbm = 0.0;
};

struct SweepResult {
  std::vector<SweepSample> samples;  // coarse stage first, then fine stage
  std::size_t coarse_count = 0;      // samples[0 .. coarse_count) are coarse
  int fine_az_count = 0;             // fine-stage grid dimensions
  int fine_el_count = 0;

  AzEl best;                 // argmax over all samples, ties to lowest index
  double best_rssi_dbm = 0.0;

  AzEl coarse_winner;
  AzEl fine_winner;

  /// Fine-stage RSSI map as an el x az matrix (el outer, az inner).
  Eigen::MatrixXd fine_map() const;
};

/// Returns RSSI in dBm for the applied configuration; may throw
/// TransportError.
using ObserveFn = std::function<double(const RdarsConfiguration&)>;

/// Inclusive 1D ladder lo, lo+step, ... capped at hi (hi included when the
/// ladder lands on it within 1e-12 of a step).
std::vector<double> grid_ladder(double lo, double hi, double step);

/// Row-major (el outer, az inner) grid points.
std::vector<AzEl> grid_points(std::span<const double> az_values,
                              std::span<const double> el_values);

/// One conjugate beam per grid point, aimed from the grid direction toward
/// the BS direction; order preserved.
std::vector<std::pair<AzEl, RdarsConfiguration>> build_codebook(
    std::span<const AzEl> grid_points, const Eigen::Vector3d& bs_dir_local,
    std::span<const std::size_t> connected_set, const ArrayGeometry& geometry,
    double lambda);

/// Two-stage sweep: coarse argmax selects the block, a fine grid spanning
/// the winner +/- coarse_step (clipped to the grid bounds) refines it.
SweepResult sweep(const ObserveFn& observe, const SweepGrid& grid,
                  const Eigen::Vector3d& bs_dir_local,
                  std::span<const std::size_t> connected_set,
                  const ArrayGeometry& geometry, double lambda);

/// Count of strict local maxima over complete 3x3 neighborhoods (interior
/// cells only) of an RSSI map.
int count_local_maxima(const Eigen::MatrixXd& map);

}  // namespace rdars
