#include "rdars/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "rdars/rng.hpp"

namespace rdars {

namespace {

constexpr std::uint64_t kDirectPhaseStream = 0xD1EC7;

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

// e^{j * k * pi/2} for the four phase codes.
const std::complex<double> kCodePhasor[4] = {
    {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

}  // namespace

double free_space_reference_loss_db(double carrier_hz) {
  return 20.0 * std::log10(4.0 * kPi / wavelength(carrier_hz));
}

ChannelParams ChannelParams::free_space(double carrier_hz) {
  ChannelParams p;
  p.carrier_hz = carrier_hz;
  p.reference_loss_db = free_space_reference_loss_db(carrier_hz);
  return p;
}

void Scenario::validate() const {
  rdars_pose.validate();
  if (!(channel.path_loss_exponent > 0.0)) {
    throw std::domain_error("Scenario: path loss exponent must be positive");
  }
  if (channel.shadowing_sigma_db < 0.0) {
    throw std::domain_error("Scenario: shadowing sigma must be >= 0");
  }
  const Eigen::Vector3d bs_local = rdars_pose.to_local(bs_pos);
  const Eigen::Vector3d ue_local = rdars_pose.to_local(ue_pos);
  if (!(bs_local.z() > 0.0) || !(ue_local.z() > 0.0)) {
    throw std::domain_error("Scenario: BS and UE must be in the front half-space");
  }
  if (!(d_ue_bs() > 1.0) || !(d_ue_rdars() > 1.0) || !(d_rdars_bs() > 1.0)) {
    throw std::domain_error("Scenario: pairwise distances must exceed 1 m");
  }
  const auto count = static_cast<std::size_t>(geometry.element_count());
  for (std::size_t idx : connected_set) {
    if (idx >= count) {
      throw std::domain_error("Scenario: connected element index out of range");
    }
  }
}

Eigen::Vector3d Scenario::bs_direction_local() const {
  return rdars_pose.to_local(bs_pos).normalized();
}

Eigen::Vector3d Scenario::ue_direction_local() const {
  return rdars_pose.to_local(ue_pos).normalized();
}

double Scenario::d_ue_bs() const { return (ue_pos - bs_pos).norm(); }
double Scenario::d_ue_rdars() const { return (ue_pos - rdars_pose.origin).norm(); }
double Scenario::d_rdars_bs() const { return (rdars_pose.origin - bs_pos).norm(); }

double path_gain_db(double d, const ChannelParams& params, double shadow_db) {
  if (!(d >= 1.0)) {
    throw std::domain_error("path_gain_db: distance below the 1 m reference");
  }
  return -(params.reference_loss_db +
           10.0 * params.path_loss_exponent * std::log10(d) + shadow_db);
}

std::complex<double> reflected_coherent_sum(const ArrayGeometry& geometry,
                                            const RdarsConfiguration& config,
                                            const Eigen::Vector3d& in_dir,
                                            const Eigen::Vector3d& out_dir,
                                            double lambda) {
  if (config.size() != static_cast<std::size_t>(geometry.element_count())) {
    throw std::invalid_argument("reflected_coherent_sum: config size mismatch");
  }
  const Eigen::VectorXd in_phases = steering_phases(geometry, in_dir, lambda);
  const Eigen::VectorXd out_phases = steering_phases(geometry, out_dir, lambda);
  std::complex<double> sum = 0.0;
  for (Eigen::Index n = 0; n < in_phases.size(); ++n) {
    const auto idx = static_cast<std::size_t>(n);
    if (config.is_connected(idx)) continue;
    const double phase =
        config.code(idx).radians() + in_phases[n] + out_phases[n];
    sum += std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return sum;
}

UplinkChannel::UplinkChannel(const Scenario& scenario, const ShadowDraws& draws)
    : UplinkChannel(scenario, scenario.ue_pos, draws) {}

UplinkChannel::UplinkChannel(const Scenario& scenario,
                             const Eigen::Vector3d& ue_pos,
                             const ShadowDraws& draws) {
  Scenario s = scenario;
  s.ue_pos = ue_pos;
  s.validate();

  const double lambda = wavelength(s.channel.carrier_hz);
  ue_dir_local_ = s.ue_direction_local();
  bs_dir_local_ = s.bs_direction_local();
  d_ur_ = s.d_ue_rdars();
  d_ub_ = s.d_ue_bs();
  const double d_rb = s.d_rdars_bs();

  tx_mw_ = dbm_to_mw(s.tx_power_dbm);
  noise_floor_dbm_ = s.noise_floor_dbm;
  noise_mw_ = dbm_to_mw(s.noise_floor_dbm);
  expected_elements_ = static_cast<std::size_t>(s.geometry.element_count());

  const double g_ur_db = path_gain_db(d_ur_, s.channel, draws.ue_rdars_db);
  const double g_rb_db = path_gain_db(d_rb, s.channel, draws.rdars_bs_db);
  connected_gain_lin_ = std::pow(10.0, g_ur_db / 10.0);

  // Per-element amplitude and incoming+outgoing plane-wave phase.
  const double amp = std::pow(10.0, (g_ur_db + g_rb_db) / 20.0);
  const Eigen::VectorXd in_phases = steering_phases(s.geometry, ue_dir_local_, lambda);
  const Eigen::VectorXd out_phases = steering_phases(s.geometry, bs_dir_local_, lambda);
  element_terms_.resize(in_phases.size());
  for (Eigen::Index n = 0; n < in_phases.size(); ++n) {
    const double phase = in_phases[n] + out_phases[n];
    element_terms_[n] = amp * std::complex<double>(std::cos(phase), std::sin(phase));
  }

  if (s.direct_path_blocked) {
    direct_term_ = 0.0;
  } else {
    const double g_ub_db = path_gain_db(d_ub_, s.channel, draws.ue_bs_db) -
                           s.direct_excess_loss_db;
    auto rng = make_stream(s.channel.rng_seed, kDirectPhaseStream);
    const double phi0 = uniform_range(rng, 0.0, kTwoPi);
    direct_term_ = std::pow(10.0, g_ub_db / 20.0) *
                   std::complex<double>(std::cos(phi0), std::sin(phi0));
  }
}

void UplinkChannel::check_config(const RdarsConfiguration& config) const {
  if (config.size() != expected_elements_) {
    throw std::invalid_argument("UplinkChannel: config size mismatch");
  }
}

std::complex<double> UplinkChannel::reflected_field(
    const RdarsConfiguration& config) const {
  std::complex<double> sum = 0.0;
  for (Eigen::Index n = 0; n < element_terms_.size(); ++n) {
    const auto idx = static_cast<std::size_t>(n);
    if (config.is_connected(idx)) continue;
    sum += element_terms_[n] * kCodePhasor[config.code(idx).value];
  }
  return sum;
}

double UplinkChannel::rssi_bs_dbm(const RdarsConfiguration& config) const {
  check_config(config);
  const double h2 = std::norm(direct_term_ + reflected_field(config));
  return 10.0 * std::log10(h2 * tx_mw_ + noise_mw_);
}

double UplinkChannel::rssi_connected_dbm(const RdarsConfiguration& config) const {
  check_config(config);
  const std::size_t a = config.connected_count();
  if (a == 0) {
    throw std::domain_error("rssi_connected_dbm: configuration has no connected elements");
  }
  // All connected elements share the panel-center path gain, so the mean
  // over the a elements collapses to g_ur * P_tx.
  return 10.0 * std::log10(connected_gain_lin_ * tx_mw_ + noise_mw_);
}

UplinkObservables UplinkChannel::observe(const RdarsConfiguration& config) const {
  return {rssi_bs_dbm(config), rssi_connected_dbm(config)};
}

double UplinkChannel::snr_db(const RdarsConfiguration& config) const {
  check_config(config);
  const double h2 = std::norm(direct_term_ + reflected_field(config));
  return 10.0 * std::log10(h2 * tx_mw_) - noise_floor_dbm_;
}

UplinkObservables uplink_observables(const Scenario& scenario,
                                     const RdarsConfiguration& config,
                                     const ShadowDraws& draws) {
  return UplinkChannel(scenario, draws).observe(config);
}

double snr_db(const Scenario& scenario, const RdarsConfiguration& config) {
  return UplinkChannel(scenario, ShadowDraws{}).snr_db(config);
}

}  // namespace rdars
