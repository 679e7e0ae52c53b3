#include "rdars/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

#include "rdars/control/client.hpp"
#include "rdars/rng.hpp"

namespace rdars {

namespace {

constexpr std::uint64_t kCalibrationStreamBase = 0xCA11B00000000000ull;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

ShadowDraws draw_shadows(std::mt19937_64& rng, double sigma_db) {
  ShadowDraws d;
  d.ue_bs_db = sigma_db * normal(rng);
  d.ue_rdars_db = sigma_db * normal(rng);
  d.rdars_bs_db = sigma_db * normal(rng);
  return d;
}

Eigen::Vector3d draw_ue_position(std::mt19937_64& rng, const UePlacementRegion& region,
                                 const RdarsPose& pose) {
  const double d = uniform_range(rng, region.d_min, region.d_max);
  const double az = uniform_range(rng, region.az_min, region.az_max);
  const double el = uniform_range(rng, region.el_min, region.el_max);
  return pose.to_world(d * direction_unit_vector({az, el}));
}

std::vector<bool> connected_mask_of(const RdarsConfiguration& config) {
  std::vector<bool> mask(config.size(), false);
  for (std::size_t n = 0; n < config.size(); ++n) mask[n] = config.is_connected(n);
  return mask;
}

// Control-link session: pushes configurations to the device, sending a
// MODE_MASK only when the connected set changes. Throws TransportError when
// the device never confirms a request.
class ControlLink {
 public:
  ControlLink(const TransportSpec& transport)
      : client_(transport.endpoint),
        options_{transport.timeout_s, transport.retries} {}

  void apply(const RdarsConfiguration& config) {
    const std::vector<bool> mask = connected_mask_of(config);
    if (!mask_known_ || mask != last_mask_) {
      const auto outcome = client_.send_mode_mask(mask, ++seq_, options_);
      if (!outcome.delivered()) {
        throw TransportError("mode mask delivery failed (seq " +
                             std::to_string(seq_) + ")");
      }
      last_mask_ = mask;
      mask_known_ = true;
    }
    const auto outcome = client_.send_config(config, ++seq_, options_);
    if (!outcome.delivered()) {
      throw TransportError("configuration delivery failed (seq " +
                           std::to_string(seq_) + ")");
    }
  }

 private:
  ctrl::ControllerClient client_;
  ctrl::ClientOptions options_;
  std::uint16_t seq_ = 0;
  std::vector<bool> last_mask_;
  bool mask_known_ = false;
};

}  // namespace

std::string to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::ok:
      return "ok";
    case TrialStatus::geometry_infeasible:
      return "geometry_infeasible";
    case TrialStatus::transport_error:
      return "transport_error";
  }
  return "unknown";
}

std::optional<TrialStatus> trial_status_from_string(const std::string& text) {
  if (text == "ok") return TrialStatus::ok;
  if (text == "geometry_infeasible") return TrialStatus::geometry_infeasible;
  if (text == "transport_error") return TrialStatus::transport_error;
  return std::nullopt;
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw std::domain_error("median: empty input");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return (n % 2 == 1) ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double percentile90(std::vector<double> values) {
  if (values.empty()) {
    throw std::domain_error("percentile90: empty input");
  }
  std::sort(values.begin(), values.end());
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.9 * static_cast<double>(values.size())));
  return values[rank - 1];
}

Calibration build_reference_calibration(const Scenario& scenario,
                                        const SweepGrid& grid, int count,
                                        double alpha_assumed, std::uint64_t seed,
                                        DirectProbe direct_probe) {
  if (count < 1) {
    throw std::domain_error("build_reference_calibration: count must be >= 1");
  }
  const auto element_count =
      static_cast<std::size_t>(scenario.geometry.element_count());
  const Eigen::Vector3d bs_dir = scenario.bs_direction_local();
  const double d_br = scenario.d_rdars_bs();
  const RdarsConfiguration probe =
      direct_probe == DirectProbe::scrambled
          ? scrambled_config(element_count, scenario.connected_set,
                             scenario.channel.rng_seed)
          : RdarsConfiguration::all_connected(element_count);

  std::vector<std::pair<RangeInputs, double>> references;
  references.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto rng = make_stream(seed, kCalibrationStreamBase + static_cast<std::uint64_t>(i));
    // Reference anchors: surveyed positions spread around the scenario's
    // nominal UE placement, noise-free by construction.
    const AzEl nominal = azel_from_direction(scenario.ue_direction_local());
    const double base_d = scenario.d_ue_rdars();
    const double d = uniform_range(rng, std::max(1.5, 0.6 * base_d), 1.4 * base_d);
    const double az = std::clamp(nominal.az + uniform_range(rng, -0.35, 0.35),
                                 grid.az_min, grid.az_max);
    const double el = std::clamp(nominal.el + uniform_range(rng, -0.2, 0.2),
                                 grid.el_min, grid.el_max);
    const Eigen::Vector3d ref_pos =
        scenario.rdars_pose.to_world(d * direction_unit_vector({az, el}));

    const UplinkChannel channel(scenario, ref_pos, ShadowDraws{});
    const RdarsConfiguration beam = conjugate_beam_config(
        channel.ue_direction_local(), bs_dir, scenario.connected_set,
        scenario.geometry, wavelength(scenario.channel.carrier_hz));
    RangeInputs inputs;
    inputs.p_connected_dbm = channel.rssi_connected_dbm(beam);
    inputs.p_bs_dbm = channel.rssi_bs_dbm(probe);
    inputs.theta = angle_between(channel.ue_direction_local(), bs_dir);
    inputs.d_br = d_br;
    inputs.alpha = alpha_assumed;
    references.emplace_back(inputs, channel.d_ue_rdars());
  }
  return calibrate(references);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.scenario.validate();
  spec.grid.validate();
  if (spec.params.trials < 1) {
    throw std::domain_error("run_experiment: trials must be >= 1");
  }

  const Scenario& scenario = spec.scenario;
  const auto element_count =
      static_cast<std::size_t>(scenario.geometry.element_count());
  const double lambda = wavelength(scenario.channel.carrier_hz);
  const Eigen::Vector3d bs_dir = scenario.bs_direction_local();
  const double d_br = scenario.d_rdars_bs();
  const RdarsConfiguration probe =
      spec.params.direct_probe == DirectProbe::scrambled
          ? scrambled_config(element_count, scenario.connected_set,
                             scenario.channel.rng_seed)
          : RdarsConfiguration::all_connected(element_count);

  Calibration calib;
  if (spec.params.calibration_references > 0) {
    calib = build_reference_calibration(
        scenario, spec.grid, spec.params.calibration_references,
        spec.params.alpha_assumed, spec.params.seed, spec.params.direct_probe);
  }

  const int trials = spec.params.trials;
  ExperimentResult result;
  result.records.resize(static_cast<std::size_t>(trials));
  if (spec.keep_traces) result.traces.resize(static_cast<std::size_t>(trials));

  // The UDP transport drives one shared surface, so trials stay sequential
  // and all deliveries share one session with one sequence counter.
  const bool udp = spec.transport.kind == TransportKind::udp;
  std::unique_ptr<ControlLink> session;
  if (udp) {
    session = std::make_unique<ControlLink>(spec.transport);
  }

  const auto run_trial = [&](int t, ControlLink* link) {
    TrialRecord& rec = result.records[static_cast<std::size_t>(t)];
    rec.trial = t;
    rec.est_az_deg = rec.est_el_deg = rec.est_d_ur_m = kNaN;
    rec.angle_error_deg = rec.range_error_m = rec.position_error_m = kNaN;
    if (spec.keep_traces) rec.rssi_trace_ref = "trial-" + std::to_string(t);

    auto rng = make_stream(spec.params.seed, static_cast<std::uint64_t>(t));
    const Eigen::Vector3d ue_pos =
        spec.params.ue_region
            ? draw_ue_position(rng, *spec.params.ue_region, scenario.rdars_pose)
            : scenario.ue_pos;
    const ShadowDraws draws =
        draw_shadows(rng, scenario.channel.shadowing_sigma_db);
    const UplinkChannel channel(scenario, ue_pos, draws);

    const AzEl true_azel = azel_from_direction(channel.ue_direction_local());
    rec.true_az_deg = rad2deg(true_azel.az);
    rec.true_el_deg = rad2deg(true_azel.el);
    rec.true_d_ur_m = channel.d_ue_rdars();

    const int repeats = spec.params.rssi_repeats;
    const ObserveFn observe = [&](const RdarsConfiguration& config) {
      if (link != nullptr) link->apply(config);
      double power_mw = 0.0;
      for (int rep = 0; rep < repeats; ++rep) {
        power_mw += std::pow(10.0, channel.rssi_bs_dbm(config) / 10.0);
      }
      return 10.0 * std::log10(power_mw / repeats);
    };

    try {
      const SweepResult sw = sweep(observe, spec.grid, bs_dir,
                                   scenario.connected_set, scenario.geometry, lambda);
      if (spec.keep_traces) result.traces[static_cast<std::size_t>(t)] = sw;

      // Direct-path power under the probe profile, connected power under
      // the selected beam.
      const double p_bs = observe(probe);
      const RdarsConfiguration best_config =
          conjugate_beam_config(direction_unit_vector(sw.best), bs_dir,
                                scenario.connected_set, scenario.geometry, lambda);
      if (link != nullptr) link->apply(best_config);
      const double p_connected = channel.rssi_connected_dbm(best_config);

      RangeInputs inputs;
      inputs.p_connected_dbm = p_connected;
      inputs.p_bs_dbm = p_bs;
      inputs.theta = angle_between(direction_unit_vector(sw.best), bs_dir);
      inputs.d_br = d_br;
      inputs.alpha = spec.params.alpha_assumed;
      const RangeEstimate range = estimate_range(inputs, calib);

      const Eigen::Vector3d estimated_pos =
          localize(sw.best, range, scenario.rdars_pose);

      rec.est_az_deg = rad2deg(sw.best.az);
      rec.est_el_deg = rad2deg(sw.best.el);
      rec.est_d_ur_m = range.d_ur;
      rec.range_ambiguous = range.ambiguous;
      rec.angle_error_deg = rad2deg(angle_between(
          channel.ue_direction_local(), direction_unit_vector(sw.best)));
      rec.range_error_m = std::abs(range.d_ur - rec.true_d_ur_m);
      rec.position_error_m = (estimated_pos - ue_pos).norm();
      rec.status = TrialStatus::ok;
    } catch (const GeometryInfeasible& err) {
      rec.status = TrialStatus::geometry_infeasible;
      rec.error_detail = err.what();
    } catch (const TransportError& err) {
      rec.status = TrialStatus::transport_error;
      rec.error_detail = err.what();
    }
  };

  int threads = udp ? 1 : std::max(1, spec.threads);
  threads = std::min(threads, trials);
  if (threads == 1) {
    for (int t = 0; t < trials; ++t) {
      run_trial(t, session.get());
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
          run_trial(t, nullptr);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Aggregate over successful trials, in trial order.
  std::vector<double> angle, range, position;
  for (const TrialRecord& rec : result.records) {
    if (rec.status != TrialStatus::ok) continue;
    angle.push_back(rec.angle_error_deg);
    range.push_back(rec.range_error_m);
    position.push_back(rec.position_error_m);
  }
  Summary& s = result.summary;
  s.trials_total = trials;
  s.trials_ok = static_cast<int>(angle.size());
  s.calibration_offset_db = calib.offset_db;
  if (!angle.empty()) {
    s.median_angle_error_deg = median(angle);
    s.p90_angle_error_deg = percentile90(angle);
    s.median_range_error_m = median(range);
    s.p90_range_error_m = percentile90(range);
    s.median_position_error_m = median(position);
    s.p90_position_error_m = percentile90(position);
  } else {
    s.median_angle_error_deg = s.p90_angle_error_deg = kNaN;
    s.median_range_error_m = s.p90_range_error_m = kNaN;
    s.median_position_error_m = s.p90_position_error_m = kNaN;
  }
  return result;
}

}  // namespace rdars
