#include "rdars/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rdars {

void SweepGrid::validate() const {
  if (!(az_min < az_max) || !(el_min < el_max)) {
    throw std::domain_error("SweepGrid: min must be below max");
  }
  if (!(coarse_step > 0.0) || !(fine_step > 0.0)) {
    throw std::domain_error("SweepGrid: steps must be positive");
  }
  if (fine_step > coarse_step) {
    throw std::domain_error("SweepGrid: fine_step must not exceed coarse_step");
  }
}

Eigen::MatrixXd SweepResult::fine_map() const {
  Eigen::MatrixXd map(fine_el_count, fine_az_count);
  for (int e = 0; e < fine_el_count; ++e) {
    for (int a = 0; a < fine_az_count; ++a) {
      map(e, a) = samples[coarse_count + static_cast<std::size_t>(e) * fine_az_count + a]
                      .rssi_dbm;
    }
  }
  return map;
}

std::vector<double> grid_ladder(double lo, double hi, double step) {
  std::vector<double> out;
  const double span = hi - lo;
  const int n = static_cast<int>(std::floor(span / step + 1e-12));
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k) out.push_back(lo + k * step);
  return out;
}

std::vector<AzEl> grid_points(std::span<const double> az_values,
                              std::span<const double> el_values) {
  std::vector<AzEl> out;
  out.reserve(az_values.size() * el_values.size());
  for (double el : el_values) {
    for (double az : az_values) out.push_back({az, el});
  }
  return out;
}

std::vector<std::pair<AzEl, RdarsConfiguration>> build_codebook(
    std::span<const AzEl> grid_points, const Eigen::Vector3d& bs_dir_local,
    std::span<const std::size_t> connected_set, const ArrayGeometry& geometry,
    double lambda) {
  if (grid_points.empty()) {
    throw std::domain_error("build_codebook: empty grid");
  }
  std::vector<std::pair<AzEl, RdarsConfiguration>> book;
  book.reserve(grid_points.size());
  for (const AzEl& point : grid_points) {
    book.emplace_back(point,
                      conjugate_beam_config(direction_unit_vector(point),
                                            bs_dir_local, connected_set,
                                            geometry, lambda));
  }
  return book;
}

namespace {

// Observes every codebook entry in order and returns the argmax index
// (ties to the lowest index).
std::size_t observe_stage(
    const ObserveFn& observe,
    const std::vector<std::pair<AzEl, RdarsConfiguration>>& book,
    std::vector<SweepSample>& samples) {
  std::size_t best = samples.size();
  double best_rssi = -std::numeric_limits<double>::infinity();
  for (const auto& [angles, config] : book) {
    const double rssi = observe(config);
    if (rssi > best_rssi) {
      best_rssi = rssi;
      best = samples.size();
    }
    samples.push_back({angles, rssi});
  }
  return best;
}

}  // namespace

SweepResult sweep(const ObserveFn& observe, const SweepGrid& grid,
                  const Eigen::Vector3d& bs_dir_local,
                  std::span<const std::size_t> connected_set,
                  const ArrayGeometry& geometry, double lambda) {
  grid.validate();
  SweepResult result;

  // Stage A: coarse blocks.
  const auto coarse_az = grid_ladder(grid.az_min, grid.az_max, grid.coarse_step);
  const auto coarse_el = grid_ladder(grid.el_min, grid.el_max, grid.coarse_step);
  const auto coarse_points = grid_points(coarse_az, coarse_el);
  const auto coarse_book =
      build_codebook(coarse_points, bs_dir_local, connected_set, geometry, lambda);
  const std::size_t coarse_best = observe_stage(observe, coarse_book, result.samples);
  result.coarse_count = result.samples.size();
  result.coarse_winner = result.samples[coarse_best].angles;

  // Stage B: fine grid over the winning block.
  const AzEl w = result.coarse_winner;
  const auto fine_az =
      grid_ladder(std::max(grid.az_min, w.az - grid.coarse_step),
                  std::min(grid.az_max, w.az + grid.coarse_step), grid.fine_step);
  const auto fine_el =
      grid_ladder(std::max(grid.el_min, w.el - grid.coarse_step),
                  std::min(grid.el_max, w.el + grid.coarse_step), grid.fine_step);
  result.fine_az_count = static_cast<int>(fine_az.size());
  result.fine_el_count = static_cast<int>(fine_el.size());
  const auto fine_points = grid_points(fine_az, fine_el);
  const auto fine_book =
      build_codebook(fine_points, bs_dir_local, connected_set, geometry, lambda);
  const std::size_t fine_best = observe_stage(observe, fine_book, result.samples);
  result.fine_winner = result.samples[fine_best].angles;

  // Overall best across both stages (in deterministic runs this coincides
  // with the fine winner because the fine grid re-visits the coarse winner).
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.samples.size(); ++i) {
    if (result.samples[i].rssi_dbm > result.samples[best].rssi_dbm) best = i;
  }
  result.best = result.samples[best].angles;
  result.best_rssi_dbm = result.samples[best].rssi_dbm;
  return result;
}

int count_local_maxima(const Eigen::MatrixXd& map) {
  int peaks = 0;
  for (Eigen::Index r = 1; r + 1 < map.rows(); ++r) {
    for (Eigen::Index c = 1; c + 1 < map.cols(); ++c) {
      const double v = map(r, c);
      bool is_peak = true;
      for (Eigen::Index dr = -1; dr <= 1 && is_peak; ++dr) {
        for (Eigen::Index dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          if (map(r + dr, c + dc) >= v) {
            is_peak = false;
            break;
          }
        }
      }
      if (is_peak) ++peaks;
    }
  }
  return peaks;
}

}  // namespace rdars
