#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rdars/geometry.hpp"
#include "rdars/surface.hpp"

// Forward wireless model: log-distance path loss with optional log-normal
// shadowing, a coherent direct + reflected uplink at the BS antenna, and the
// average received power across the connected elements. This is the
// simulated ground truth that beam sweeping and range estimation run
// against. All shadowing draws are explicit inputs so results are
// reproducible under seeded streams.

namespace rdars {

/// Free-space loss at the 1 m reference distance: 20*log10(4*pi/lambda).
double free_space_reference_loss_db(double carrier_hz);

struct ChannelParams {
  double carrier_hz = 3.7e9;
  double path_loss_exponent = 2.0;                               // alpha
  double reference_loss_db = 43.811817703223276;                 // PL0 at 1 m, 3.7 GHz
  double shadowing_sigma_db = 0.0;
  std::uint64_t rng_seed = 0;  // fixes the direct-path phase and scramble codes

  /// Params with PL0 set to the free-space value at `carrier_hz`.
  static ChannelParams free_space(double carrier_hz);
};

/// World geometry plus radio parameters for one deployment.
struct Scenario {
  Eigen::Vector3d bs_pos = Eigen::Vector3d::Zero();
  Eigen::Vector3d ue_pos = Eigen::Vector3d::Zero();
  RdarsPose rdars_pose;
  ArrayGeometry geometry = ArrayGeometry::standard_panel();
  ChannelParams channel;
  double tx_power_dbm = 0.0;
  double noise_floor_dbm = -95.0;
  std::vector<std::size_t> connected_set = {0, 15, 240, 255};

  // Direct UE->BS path control: fully blocked, or attenuated by a fixed
  // obstruction loss (0 = unobstructed line of sight).
  bool direct_path_blocked = false;
  double direct_excess_loss_db = 0.0;

  /// Throws std::domain_error if BS/UE are not strictly in the front
  /// half-space of the surface or any pairwise distance is <= 1 m.
  void validate() const;

  Eigen::Vector3d bs_direction_local() const;  // unit, from RDARS origin
  Eigen::Vector3d ue_direction_local() const;
  double d_ue_bs() const;
  double d_ue_rdars() const;
  double d_rdars_bs() const;
};

/// Per-path shadowing draws in dB (0 = no shadowing).
struct ShadowDraws {
  double ue_bs_db = 0.0;
  double ue_rdars_db = 0.0;
  double rdars_bs_db = 0.0;
};

struct UplinkObservables {
  double rssi_bs_dbm = 0.0;         // total power at the BS antenna
  double rssi_connected_dbm = 0.0;  // mean power across connected elements
};

/// Log-distance channel gain in dB (negative = loss):
///   -(PL0 + 10 * alpha * log10(d) + shadow_db)
/// Throws std::domain_error for d < 1 m (the reference distance).
double path_gain_db(double d, const ChannelParams& params, double shadow_db = 0.0);

/// Unit-amplitude coherent sum over the reflecting elements for a plane
/// wave in from `in_dir` and out toward `out_dir`:
///   sum_n exp(j * (psi_n + phase_in_n + phase_out_n))
/// Connected elements do not contribute.
std::complex<double> reflected_coherent_sum(const ArrayGeometry& geometry,
                                            const RdarsConfiguration& config,
                                            const Eigen::Vector3d& in_dir,
                                            const Eigen::Vector3d& out_dir,
                                            double lambda);

/// Forward model for one (scenario, UE position, shadowing) realization.
/// Per-element path terms are precomputed once and shared by every
/// configuration evaluated against it.
class UplinkChannel {
 public:
  UplinkChannel(const Scenario& scenario, const ShadowDraws& draws);
  UplinkChannel(const Scenario& scenario, const Eigen::Vector3d& ue_pos,
                const ShadowDraws& draws);

  /// Total received power at the BS antenna in dBm, noise included.
  double rssi_bs_dbm(const RdarsConfiguration& config) const;

  /// Mean received power over the connected elements in dBm, noise
  /// included. Throws std::domain_error if the connected set is empty.
  double rssi_connected_dbm(const RdarsConfiguration& config) const;

  UplinkObservables observe(const RdarsConfiguration& config) const;

  /// Signal power at the BS (noise term excluded) minus the noise floor.
  double snr_db(const RdarsConfiguration& config) const;

  const Eigen::Vector3d& ue_direction_local() const { return ue_dir_local_; }
  const Eigen::Vector3d& bs_direction_local() const { return bs_dir_local_; }
  double d_ue_rdars() const { return d_ur_; }
  double d_ue_bs() const { return d_ub_; }

 private:
  std::complex<double> reflected_field(const RdarsConfiguration& config) const;
  void check_config(const RdarsConfiguration& config) const;

  Eigen::Vector3d ue_dir_local_;
  Eigen::Vector3d bs_dir_local_;
  double d_ur_ = 0.0;
  double d_ub_ = 0.0;
  Eigen::VectorXcd element_terms_;      // sqrt(g_ur*g_rb) * e^{j(in+out)} per element
  std::complex<double> direct_term_;    // sqrt(g_ub) * e^{j*phi0}, 0 if blocked
  double connected_gain_lin_ = 0.0;     // g_ur as linear power gain
  double tx_mw_ = 1.0;
  double noise_mw_ = 0.0;
  double noise_floor_dbm_ = 0.0;
  std::size_t expected_elements_ = 0;
};

/// One-shot convenience wrapper around UplinkChannel.
UplinkObservables uplink_observables(const Scenario& scenario,
                                     const RdarsConfiguration& config,
                                     const ShadowDraws& draws);

/// SNR of the configured uplink, shadowing-free.
double snr_db(const Scenario& scenario, const RdarsConfiguration& config);

}  // namespace rdars
