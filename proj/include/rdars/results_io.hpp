#pragma once

#include <iosfwd>
#include <string>

#include "rdars/experiment.hpp"

// Result emission with pinned schemas.
//
// CSV: one header line, one row per trial, then a single summary footer
// prefixed '#summary'. Columns:
//   trial,status,true_az_deg,true_el_deg,true_d_ur_m,est_az_deg,est_el_deg,
//   est_d_ur_m,angle_error_deg,range_error_m,position_error_m,
//   range_ambiguous,rssi_trace_ref
// Failed trials leave estimate/error cells empty. All doubles are printed
// with %.17g so values survive a parse round trip bit-exactly.
//
// JSON: {"trials": [...], "summary": {...}} with the same field names; the
// optional "traces" array carries per-trial sweep samples when kept.

namespace rdars {

enum class ResultFormat { csv, json };

ResultFormat result_format_from_string(const std::string& text);

void write_csv(const ExperimentResult& result, std::ostream& out);
void write_json(const ExperimentResult& result, std::ostream& out);
void write_results(const ExperimentResult& result, ResultFormat format,
                   const std::string& path);

/// Parses results back (the summary is re-read, traces are not). Used for
/// the cross-format consistency checks.
ExperimentResult read_csv(std::istream& in);
ExperimentResult read_json(std::istream& in);

/// RSSI map emission for the sweep-only verb: columns stage,az_deg,el_deg,
/// rssi_dbm plus a '#best' footer (CSV) or a {"samples", "best"} object
/// (JSON).
void write_sweep_csv(const SweepResult& sweep, std::ostream& out);
void write_sweep_json(const SweepResult& sweep, std::ostream& out);

}  // namespace rdars
