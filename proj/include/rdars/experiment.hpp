#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdars/channel.hpp"
#include "rdars/control/udp.hpp"
#include "rdars/localization.hpp"
#include "rdars/scenario_config.hpp"
#include "rdars/sweep.hpp"

// Monte Carlo experiment runner: the reproduction surface for the two-stage
// localization field test. Every trial draws its randomness from a stream
// derived from (seed, trial index), so results are reproducible and trials
// may run concurrently under the in-process oracle transport.

namespace rdars {

enum class TransportKind { oracle, udp };

struct TransportSpec {
  TransportKind kind = TransportKind::oracle;
  ctrl::Endpoint endpoint;  // device emulator, for TransportKind::udp
  double timeout_s = 0.2;
  int retries = 3;
};

struct ExperimentSpec {
  Scenario scenario;
  SweepGrid grid;
  ExperimentParams params;
  TransportSpec transport;
  int threads = 1;           // oracle transport only; udp runs sequentially
  bool keep_traces = false;  // retain per-trial sweep samples
};

enum class TrialStatus { ok, geometry_infeasible, transport_error };

std::string to_string(TrialStatus status);
std::optional<TrialStatus> trial_status_from_string(const std::string& text);

/// One localization trial. Estimate and error fields are NaN when the
/// trial failed; `error_detail` then carries the reason.
struct TrialRecord {
  int trial = 0;
  TrialStatus status = TrialStatus::ok;
  double true_az_deg = 0.0;
  double true_el_deg = 0.0;
  double true_d_ur_m = 0.0;
  double est_az_deg = 0.0;
  double est_el_deg = 0.0;
  double est_d_ur_m = 0.0;
  double angle_error_deg = 0.0;  // great-circle between true and estimated
  double range_error_m = 0.0;
  double position_error_m = 0.0;
  bool range_ambiguous = false;
  std::string rssi_trace_ref;  // "trial-<k>" when traces are kept
  std::string error_detail;
};

struct Summary {
  int trials_total = 0;
  int trials_ok = 0;
  double median_angle_error_deg = 0.0;
  double p90_angle_error_deg = 0.0;
  double median_range_error_m = 0.0;
  double p90_range_error_m = 0.0;
  double median_position_error_m = 0.0;
  double p90_position_error_m = 0.0;
  double calibration_offset_db = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  Summary summary;
  std::vector<SweepResult> traces;  // parallel to records when kept
};

/// Median (mean of the two middle values for even counts). Throws
/// std::domain_error on empty input.
double median(std::vector<double> values);

/// Nearest-rank 90th percentile.
double percentile90(std::vector<double> values);

/// Builds the calibration from `count` noise-free reference points placed
/// deterministically under (seed) around the scenario's nominal UE
/// position, probing the direct path the same way the trials will.
Calibration build_reference_calibration(const Scenario& scenario,
                                        const SweepGrid& grid, int count,
                                        double alpha_assumed, std::uint64_t seed,
                                        DirectProbe direct_probe);

ExperimentResult run_experiment(const ExperimentSpec& spec);

}  // namespace rdars
