#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "rdars/channel.hpp"
#include "rdars/sweep.hpp"

// Flat key = value configuration files (angles in degrees, '#' comments).
// Unknown keys are rejected. One file describes the scenario, the sweep
// grid and the experiment parameters; see scenarios/default.cfg for the
// reference layout.

namespace rdars {

/// Region the experiment draws per-trial UE positions from (all angles in
/// radians here; the file uses degrees).
struct UePlacementRegion {
  double d_min = 0.0;
  double d_max = 0.0;
  double az_min = 0.0;
  double az_max = 0.0;
  double el_min = 0.0;
  double el_max = 0.0;
};

/// How the direct-path power at the BS is probed: under a scrambled phase
/// profile (coherent reflections collapse, leaving a small incoherent
/// residue that calibration absorbs) or with every element switched to
/// connected mode (no reflections at all).
enum class DirectProbe { scrambled, isolated };

struct ExperimentParams {
  int trials = 1;
  std::uint64_t seed = 0;
  int calibration_references = 0;
  double alpha_assumed = 2.0;
  int rssi_repeats = 1;
  DirectProbe direct_probe = DirectProbe::scrambled;
  std::optional<UePlacementRegion> ue_region;
};

struct FileConfig {
  Scenario scenario;
  SweepGrid grid;
  ExperimentParams experiment;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a configuration file. Throws ConfigError with line context on
/// unknown keys, malformed values or violated invariants.
FileConfig load_config(const std::string& path);
FileConfig parse_config(std::istream& in, const std::string& origin = "<stream>");

}  // namespace rdars
