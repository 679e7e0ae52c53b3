#include "rdars/scenario_config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rdars/constants.hpp"

namespace rdars {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_numbers(const std::string& value, const std::string& key) {
  std::string cleaned = value;
  for (char& c : cleaned) {
    if (c == ',') c = ' ';
  }
  std::istringstream ss(cleaned);
  std::vector<double> out;
  double v = 0.0;
  while (ss >> v) out.push_back(v);
  std::string rest;
  if (ss.fail() && !ss.eof()) {
    throw ConfigError("key '" + key + "': malformed numeric value '" + value + "'");
  }
  if (out.empty()) {
    throw ConfigError("key '" + key + "': expected at least one number");
  }
  return out;
}

double parse_scalar(const std::string& value, const std::string& key) {
  const auto nums = parse_numbers(value, key);
  if (nums.size() != 1) {
    throw ConfigError("key '" + key + "': expected a single number");
  }
  return nums[0];
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false");
}

Eigen::Vector3d parse_vec3(const std::string& value, const std::string& key) {
  const auto nums = parse_numbers(value, key);
  if (nums.size() != 3) {
    throw ConfigError("key '" + key + "': expected 3 numbers");
  }
  return {nums[0], nums[1], nums[2]};
}

}  // namespace

FileConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open configuration file '" + path + "'");
  }
  return parse_config(in, path);
}

FileConfig parse_config(std::istream& in, const std::string& origin) {
  FileConfig cfg;
  Scenario& sc = cfg.scenario;
  SweepGrid& grid = cfg.grid;
  ExperimentParams& exp = cfg.experiment;

  bool spacing_given = false;
  bool reference_loss_given = false;
  UePlacementRegion region;
  int region_keys = 0;

  const auto set_region = [&](double UePlacementRegion::* member, bool degrees) {
    return [&region, &region_keys, member, degrees](const std::string& v,
                                                    const std::string& k) {
      region.*member = degrees ? deg2rad(parse_scalar(v, k)) : parse_scalar(v, k);
      ++region_keys;
    };
  };

  using Handler = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Handler> handlers = {
      // Scenario geometry.
      {"bs_pos", [&](const std::string& v, const std::string& k) { sc.bs_pos = parse_vec3(v, k); }},
      {"ue_pos", [&](const std::string& v, const std::string& k) { sc.ue_pos = parse_vec3(v, k); }},
      {"rdars_origin", [&](const std::string& v, const std::string& k) { sc.rdars_pose.origin = parse_vec3(v, k); }},
      {"rdars_rotation",
       [&](const std::string& v, const std::string& k) {
         const auto nums = parse_numbers(v, k);
         if (nums.size() != 9) {
           throw ConfigError("key 'rdars_rotation': expected 9 numbers (row-major)");
         }
         for (int r = 0; r < 3; ++r) {
           for (int c = 0; c < 3; ++c) sc.rdars_pose.rotation(r, c) = nums[r * 3 + c];
         }
       }},
      {"rows", [&](const std::string& v, const std::string& k) { sc.geometry.rows = static_cast<int>(parse_scalar(v, k)); }},
      {"cols", [&](const std::string& v, const std::string& k) { sc.geometry.cols = static_cast<int>(parse_scalar(v, k)); }},
      {"spacing", [&](const std::string& v, const std::string& k) { sc.geometry.spacing = parse_scalar(v, k); spacing_given = true; }},
      // Channel.
      {"carrier_hz", [&](const std::string& v, const std::string& k) { sc.channel.carrier_hz = parse_scalar(v, k); }},
      {"path_loss_exponent", [&](const std::string& v, const std::string& k) { sc.channel.path_loss_exponent = parse_scalar(v, k); }},
      {"reference_loss_db", [&](const std::string& v, const std::string& k) { sc.channel.reference_loss_db = parse_scalar(v, k); reference_loss_given = true; }},
      {"shadowing_sigma_db", [&](const std::string& v, const std::string& k) { sc.channel.shadowing_sigma_db = parse_scalar(v, k); }},
      {"rng_seed", [&](const std::string& v, const std::string& k) { sc.channel.rng_seed = static_cast<std::uint64_t>(parse_scalar(v, k)); }},
      // Radio.
      {"tx_power_dbm", [&](const std::string& v, const std::string& k) { sc.tx_power_dbm = parse_scalar(v, k); }},
      {"noise_floor_dbm", [&](const std::string& v, const std::string& k) { sc.noise_floor_dbm = parse_scalar(v, k); }},
      {"connected_set",
       [&](const std::string& v, const std::string& k) {
         sc.connected_set.clear();
         for (double d : parse_numbers(v, k)) {
           if (d < 0 || d != std::floor(d)) {
             throw ConfigError("key 'connected_set': indices must be non-negative integers");
           }
           sc.connected_set.push_back(static_cast<std::size_t>(d));
         }
       }},
      {"direct_path_blocked", [&](const std::string& v, const std::string& k) { sc.direct_path_blocked = parse_bool(v, k); }},
      {"direct_excess_loss_db", [&](const std::string& v, const std::string& k) { sc.direct_excess_loss_db = parse_scalar(v, k); }},
      // Sweep grid (degrees in the file).
      {"az_min_deg", [&](const std::string& v, const std::string& k) { grid.az_min = deg2rad(parse_scalar(v, k)); }},
      {"az_max_deg", [&](const std::string& v, const std::string& k) { grid.az_max = deg2rad(parse_scalar(v, k)); }},
      {"el_min_deg", [&](const std::string& v, const std::string& k) { grid.el_min = deg2rad(parse_scalar(v, k)); }},
      {"el_max_deg", [&](const std::string& v, const std::string& k) { grid.el_max = deg2rad(parse_scalar(v, k)); }},
      {"coarse_step_deg", [&](const std::string& v, const std::string& k) { grid.coarse_step = deg2rad(parse_scalar(v, k)); }},
      {"fine_step_deg", [&](const std::string& v, const std::string& k) { grid.fine_step = deg2rad(parse_scalar(v, k)); }},
      // Experiment.
      {"trials", [&](const std::string& v, const std::string& k) { exp.trials = static_cast<int>(parse_scalar(v, k)); }},
      {"seed", [&](const std::string& v, const std::string& k) { exp.seed = static_cast<std::uint64_t>(parse_scalar(v, k)); }},
      {"calibration_references", [&](const std::string& v, const std::string& k) { exp.calibration_references = static_cast<int>(parse_scalar(v, k)); }},
      {"alpha_assumed", [&](const std::string& v, const std::string& k) { exp.alpha_assumed = parse_scalar(v, k); }},
      {"rssi_repeats", [&](const std::string& v, const std::string& k) { exp.rssi_repeats = static_cast<int>(parse_scalar(v, k)); }},
      {"direct_probe",
       [&](const std::string& v, const std::string&) {
         if (v == "scrambled") exp.direct_probe = DirectProbe::scrambled;
         else if (v == "isolated") exp.direct_probe = DirectProbe::isolated;
         else throw ConfigError("key 'direct_probe': expected scrambled|isolated");
       }},
      {"ue_range_min_m", set_region(&UePlacementRegion::d_min, false)},
      {"ue_range_max_m", set_region(&UePlacementRegion::d_max, false)},
      {"ue_az_min_deg", set_region(&UePlacementRegion::az_min, true)},
      {"ue_az_max_deg", set_region(&UePlacementRegion::az_max, true)},
      {"ue_el_min_deg", set_region(&UePlacementRegion::el_min, true)},
      {"ue_el_max_deg", set_region(&UePlacementRegion::el_max, true)},
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = handlers.find(key);
    if (it == handlers.end()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
    try {
      it->second(value, key);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }

  if (!spacing_given) {
    sc.geometry.spacing = 0.5 * wavelength(sc.channel.carrier_hz);
  }
  if (!reference_loss_given) {
    sc.channel.reference_loss_db = free_space_reference_loss_db(sc.channel.carrier_hz);
  }
  sc.geometry = ArrayGeometry::uniform(sc.geometry.rows > 0 ? sc.geometry.rows : 16,
                                       sc.geometry.cols > 0 ? sc.geometry.cols : 16,
                                       sc.geometry.spacing);

  if (region_keys > 0) {
    if (region_keys != 6) {
      throw ConfigError(origin + ": UE placement region requires all six ue_* keys");
    }
    if (!(region.d_min > 1.0) || !(region.d_max >= region.d_min) ||
        !(region.az_min <= region.az_max) || !(region.el_min <= region.el_max)) {
      throw ConfigError(origin + ": invalid UE placement region");
    }
    exp.ue_region = region;
  }
  if (exp.trials < 1) {
    throw ConfigError(origin + ": trials must be >= 1");
  }
  if (exp.calibration_references < 0) {
    throw ConfigError(origin + ": calibration_references must be >= 0");
  }
  if (exp.rssi_repeats < 1) {
    throw ConfigError(origin + ": rssi_repeats must be >= 1");
  }

  try {
    cfg.scenario.validate();
    cfg.grid.validate();
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

}  // namespace rdars
