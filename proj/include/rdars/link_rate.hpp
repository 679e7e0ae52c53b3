#pragma once

#include <cmath>
#include <stdexcept>

// Uplink rate model: LTE-style resource grid throughput plus a Shannon
// ceiling used as a physical-consistency gate. Deliberately independent of
// all sensing state.

namespace rdars {

struct LinkConfig {
  double bandwidth_hz = 20e6;
  int subcarriers = 1200;
  double symbols_per_second_per_subcarrier = 14000.0;
  int bits_per_symbol = 6;    // 64-QAM
  double efficiency = 0.8115;  // calibrated overhead factor, see README

  void validate() const {
    if (bandwidth_hz <= 0.0 || subcarriers <= 0 ||
        symbols_per_second_per_subcarrier <= 0.0) {
      throw std::domain_error("LinkConfig: all factors must be positive");
    }
    if (bits_per_symbol != 2 && bits_per_symbol != 4 && bits_per_symbol != 6 &&
        bits_per_symbol != 8) {
      throw std::domain_error("LinkConfig: bits_per_symbol must be 2, 4, 6 or 8");
    }
    if (!(efficiency > 0.0) || efficiency > 1.0) {
      throw std::domain_error("LinkConfig: efficiency must lie in (0, 1]");
    }
  }
};

/// Resource-grid throughput in bits per second.
inline double grid_rate_bps(const LinkConfig& cfg) {
  cfg.validate();
  return cfg.subcarriers * cfg.symbols_per_second_per_subcarrier *
         cfg.bits_per_symbol * cfg.efficiency;
}

/// Shannon capacity bandwidth * log2(1 + SNR) in bits per second.
inline double shannon_rate_bps(double snr_db, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) {
    throw std::domain_error("shannon_rate_bps: bandwidth must be positive");
  }
  return bandwidth_hz * std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
}

}  // namespace rdars
