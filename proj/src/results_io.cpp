#include "rdars/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rdars/constants.hpp"

namespace rdars {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_cell(const std::string& cell) {
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(cell);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

nlohmann::json nan_safe(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

double from_nan_safe(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

constexpr const char* kCsvHeader =
    "trial,status,true_az_deg,true_el_deg,true_d_ur_m,est_az_deg,est_el_deg,"
    "est_d_ur_m,angle_error_deg,range_error_m,position_error_m,"
    "range_ambiguous,rssi_trace_ref";

nlohmann::json summary_to_json(const Summary& s) {
  nlohmann::json j;
  j["trials_total"] = s.trials_total;
  j["trials_ok"] = s.trials_ok;
  j["median_angle_error_deg"] = nan_safe(s.median_angle_error_deg);
  j["p90_angle_error_deg"] = nan_safe(s.p90_angle_error_deg);
  j["median_range_error_m"] = nan_safe(s.median_range_error_m);
  j["p90_range_error_m"] = nan_safe(s.p90_range_error_m);
  j["median_position_error_m"] = nan_safe(s.median_position_error_m);
  j["p90_position_error_m"] = nan_safe(s.p90_position_error_m);
  j["calibration_offset_db"] = s.calibration_offset_db;
  return j;
}

}  // namespace

ResultFormat result_format_from_string(const std::string& text) {
  if (text == "csv") return ResultFormat::csv;
  if (text == "json") return ResultFormat::json;
  throw std::invalid_argument("unknown result format '" + text + "'");
}

void write_csv(const ExperimentResult& result, std::ostream& out) {
  out << kCsvHeader << "\n";
  for (const TrialRecord& r : result.records) {
    out << r.trial << ',' << to_string(r.status) << ',' << fmt(r.true_az_deg)
        << ',' << fmt(r.true_el_deg) << ',' << fmt(r.true_d_ur_m) << ','
        << fmt(r.est_az_deg) << ',' << fmt(r.est_el_deg) << ','
        << fmt(r.est_d_ur_m) << ',' << fmt(r.angle_error_deg) << ','
        << fmt(r.range_error_m) << ',' << fmt(r.position_error_m) << ','
        << (r.range_ambiguous ? 1 : 0) << ',' << r.rssi_trace_ref << "\n";
  }
  const Summary& s = result.summary;
  out << "#summary,trials_total=" << s.trials_total
      << ",trials_ok=" << s.trials_ok
      << ",median_angle_error_deg=" << fmt(s.median_angle_error_deg)
      << ",p90_angle_error_deg=" << fmt(s.p90_angle_error_deg)
      << ",median_range_error_m=" << fmt(s.median_range_error_m)
      << ",p90_range_error_m=" << fmt(s.p90_range_error_m)
      << ",median_position_error_m=" << fmt(s.median_position_error_m)
      << ",p90_position_error_m=" << fmt(s.p90_position_error_m)
      << ",calibration_offset_db=" << fmt(s.calibration_offset_db) << "\n";
}

void write_json(const ExperimentResult& result, std::ostream& out) {
  nlohmann::json root;
  nlohmann::json trials = nlohmann::json::array();
  for (const TrialRecord& r : result.records) {
    nlohmann::json j;
    j["trial"] = r.trial;
    j["status"] = to_string(r.status);
    j["true_az_deg"] = nan_safe(r.true_az_deg);
    j["true_el_deg"] = nan_safe(r.true_el_deg);
    j["true_d_ur_m"] = nan_safe(r.true_d_ur_m);
    j["est_az_deg"] = nan_safe(r.est_az_deg);
    j["est_el_deg"] = nan_safe(r.est_el_deg);
    j["est_d_ur_m"] = nan_safe(r.est_d_ur_m);
    j["angle_error_deg"] = nan_safe(r.angle_error_deg);
    j["range_error_m"] = nan_safe(r.range_error_m);
    j["position_error_m"] = nan_safe(r.position_error_m);
    j["range_ambiguous"] = r.range_ambiguous;
    j["rssi_trace_ref"] = r.rssi_trace_ref;
    if (!r.error_detail.empty()) j["error_detail"] = r.error_detail;
    trials.push_back(std::move(j));
  }
  root["trials"] = std::move(trials);
  root["summary"] = summary_to_json(result.summary);

  if (!result.traces.empty()) {
    nlohmann::json traces = nlohmann::json::array();
    for (const SweepResult& sw : result.traces) {
      nlohmann::json t;
      t["coarse_count"] = sw.coarse_count;
      t["fine_az_count"] = sw.fine_az_count;
      t["fine_el_count"] = sw.fine_el_count;
      t["best_az_deg"] = rad2deg(sw.best.az);
      t["best_el_deg"] = rad2deg(sw.best.el);
      t["best_rssi_dbm"] = sw.best_rssi_dbm;
      nlohmann::json samples = nlohmann::json::array();
      for (const SweepSample& sample : sw.samples) {
        samples.push_back({rad2deg(sample.angles.az), rad2deg(sample.angles.el),
                           sample.rssi_dbm});
      }
      t["samples"] = std::move(samples);
      traces.push_back(std::move(t));
    }
    root["traces"] = std::move(traces);
  }
  out << root.dump(2) << "\n";
}

void write_results(const ExperimentResult& result, ResultFormat format,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  if (format == ResultFormat::csv) {
    write_csv(result, out);
  } else {
    write_json(result, out);
  }
  if (!out) {
    throw std::runtime_error("write failed for output file '" + path + "'");
  }
}

ExperimentResult read_csv(std::istream& in) {
  ExperimentResult result;
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("read_csv: missing or unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("#summary,", 0) == 0) {
      std::istringstream ss(line.substr(9));
      std::string item;
      Summary& s = result.summary;
      while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "trials_total") s.trials_total = std::stoi(value);
        else if (key == "trials_ok") s.trials_ok = std::stoi(value);
        else if (key == "median_angle_error_deg") s.median_angle_error_deg = parse_cell(value);
        else if (key == "p90_angle_error_deg") s.p90_angle_error_deg = parse_cell(value);
        else if (key == "median_range_error_m") s.median_range_error_m = parse_cell(value);
        else if (key == "p90_range_error_m") s.p90_range_error_m = parse_cell(value);
        else if (key == "median_position_error_m") s.median_position_error_m = parse_cell(value);
        else if (key == "p90_position_error_m") s.p90_position_error_m = parse_cell(value);
        else if (key == "calibration_offset_db") s.calibration_offset_db = parse_cell(value);
        else throw std::runtime_error("read_csv: unknown summary key '" + key + "'");
      }
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 13) {
      throw std::runtime_error("read_csv: expected 13 cells per row");
    }
    TrialRecord r;
    r.trial = std::stoi(cells[0]);
    const auto status = trial_status_from_string(cells[1]);
    if (!status) {
      throw std::runtime_error("read_csv: unknown status '" + cells[1] + "'");
    }
    r.status = *status;
    r.true_az_deg = parse_cell(cells[2]);
    r.true_el_deg = parse_cell(cells[3]);
    r.true_d_ur_m = parse_cell(cells[4]);
    r.est_az_deg = parse_cell(cells[5]);
    r.est_el_deg = parse_cell(cells[6]);
    r.est_d_ur_m = parse_cell(cells[7]);
    r.angle_error_deg = parse_cell(cells[8]);
    r.range_error_m = parse_cell(cells[9]);
    r.position_error_m = parse_cell(cells[10]);
    r.range_ambiguous = cells[11] == "1";
    r.rssi_trace_ref = cells[12];
    result.records.push_back(std::move(r));
  }
  return result;
}

ExperimentResult read_json(std::istream& in) {
  nlohmann::json root = nlohmann::json::parse(in);
  ExperimentResult result;
  for (const auto& j : root.at("trials")) {
    TrialRecord r;
    r.trial = j.at("trial").get<int>();
    const auto status = trial_status_from_string(j.at("status").get<std::string>());
    if (!status) {
      throw std::runtime_error("read_json: unknown trial status");
    }
    r.status = *status;
    r.true_az_deg = from_nan_safe(j.at("true_az_deg"));
    r.true_el_deg = from_nan_safe(j.at("true_el_deg"));
    r.true_d_ur_m = from_nan_safe(j.at("true_d_ur_m"));
    r.est_az_deg = from_nan_safe(j.at("est_az_deg"));
    r.est_el_deg = from_nan_safe(j.at("est_el_deg"));
    r.est_d_ur_m = from_nan_safe(j.at("est_d_ur_m"));
    r.angle_error_deg = from_nan_safe(j.at("angle_error_deg"));
    r.range_error_m = from_nan_safe(j.at("range_error_m"));
    r.position_error_m = from_nan_safe(j.at("position_error_m"));
    r.range_ambiguous = j.at("range_ambiguous").get<bool>();
    r.rssi_trace_ref = j.at("rssi_trace_ref").get<std::string>();
    if (j.contains("error_detail")) {
      r.error_detail = j.at("error_detail").get<std::string>();
    }
    result.records.push_back(std::move(r));
  }
  const auto& sj = root.at("summary");
  Summary& s = result.summary;
  s.trials_total = sj.at("trials_total").get<int>();
  s.trials_ok = sj.at("trials_ok").get<int>();
  s.median_angle_error_deg = from_nan_safe(sj.at("median_angle_error_deg"));
  s.p90_angle_error_deg = from_nan_safe(sj.at("p90_angle_error_deg"));
  s.median_range_error_m = from_nan_safe(sj.at("median_range_error_m"));
  s.p90_range_error_m = from_nan_safe(sj.at("p90_range_error_m"));
  s.median_position_error_m = from_nan_safe(sj.at("median_position_error_m"));
  s.p90_position_error_m = from_nan_safe(sj.at("p90_position_error_m"));
  s.calibration_offset_db = from_nan_safe(sj.at("calibration_offset_db"));
  return result;
}

void write_sweep_csv(const SweepResult& sw, std::ostream& out) {
  out << "stage,az_deg,el_deg,rssi_dbm\n";
  for (std::size_t i = 0; i < sw.samples.size(); ++i) {
    out << (i < sw.coarse_count ? "coarse" : "fine") << ','
        << fmt(rad2deg(sw.samples[i].angles.az)) << ','
        << fmt(rad2deg(sw.samples[i].angles.el)) << ','
        << fmt(sw.samples[i].rssi_dbm) << "\n";
  }
  out << "#best,az_deg=" << fmt(rad2deg(sw.best.az))
      << ",el_deg=" << fmt(rad2deg(sw.best.el))
      << ",rssi_dbm=" << fmt(sw.best_rssi_dbm) << "\n";
}

void write_sweep_json(const SweepResult& sw, std::ostream& out) {
  nlohmann::json root;
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < sw.samples.size(); ++i) {
    samples.push_back({{"stage", i < sw.coarse_count ? "coarse" : "fine"},
                       {"az_deg", rad2deg(sw.samples[i].angles.az)},
                       {"el_deg", rad2deg(sw.samples[i].angles.el)},
                       {"rssi_dbm", sw.samples[i].rssi_dbm}});
  }
  root["samples"] = std::move(samples);
  root["best"] = {{"az_deg", rad2deg(sw.best.az)},
                  {"el_deg", rad2deg(sw.best.el)},
                  {"rssi_dbm", sw.best_rssi_dbm}};
  root["coarse_count"] = sw.coarse_count;
  root["fine_az_count"] = sw.fine_az_count;
  root["fine_el_count"] = sw.fine_el_count;
  out << root.dump(2) << "\n";
}

}  // namespace rdars
