#include "rdars/surface.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rdars/rng.hpp"

namespace rdars {

RdarsConfiguration RdarsConfiguration::all_reflection(std::size_t element_count,
                                                      PhaseCode code) {
  RdarsConfiguration c(element_count);
  for (std::size_t n = 0; n < element_count; ++n) c.set_reflection(n, code);
  return c;
}

RdarsConfiguration RdarsConfiguration::all_connected(std::size_t element_count) {
  RdarsConfiguration c(element_count);
  for (std::size_t n = 0; n < element_count; ++n) c.set_connected(n);
  return c;
}

void RdarsConfiguration::set_reflection(std::size_t n, PhaseCode code) {
  if (code.value >= kPhaseLevels) {
    throw std::domain_error("RdarsConfiguration: phase code out of range");
  }
  codes_.at(n) = code.value;
  connected_[n] = false;
}

void RdarsConfiguration::set_connected(std::size_t n) {
  codes_.at(n) = 0;
  connected_[n] = true;
}

std::vector<std::size_t> RdarsConfiguration::connected_set() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < connected_.size(); ++n) {
    if (connected_[n]) out.push_back(n);
  }
  return out;
}

std::vector<std::size_t> RdarsConfiguration::reflect_set() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < connected_.size(); ++n) {
    if (!connected_[n]) out.push_back(n);
  }
  return out;
}

std::size_t RdarsConfiguration::connected_count() const {
  std::size_t a = 0;
  for (bool c : connected_) a += c ? 1 : 0;
  return a;
}

PhaseCode quantize_phase(double phi, int levels) {
  if (levels != kPhaseLevels) {
    throw std::invalid_argument("quantize_phase: this surface has 4 phase levels");
  }
  if (!std::isfinite(phi)) {
    throw std::domain_error("quantize_phase: phase must be finite");
  }
  const double wrapped = phi - kTwoPi * std::floor(phi / kTwoPi);  // [0, 2*pi)
  const double step = kTwoPi / levels;
  std::uint8_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < levels; ++k) {
    double d = std::abs(wrapped - k * step);
    d = std::min(d, kTwoPi - d);  // circular distance
    if (d < best_dist - 1e-15) {
      best_dist = d;
      best = static_cast<std::uint8_t>(k);
    }
  }
  return PhaseCode{best};
}

Eigen::VectorXd ideal_continuous_phases(const Eigen::Vector3d& ue_dir,
                                        const Eigen::Vector3d& bs_dir,
                                        const ArrayGeometry& geometry,
                                        double lambda) {
  return -(steering_phases(geometry, ue_dir, lambda) +
           steering_phases(geometry, bs_dir, lambda));
}

RdarsConfiguration conjugate_beam_config(const Eigen::Vector3d& ue_dir,
                                         const Eigen::Vector3d& bs_dir,
                                         std::span<const std::size_t> connected_set,
                                         const ArrayGeometry& geometry,
                                         double lambda) {
  const std::size_t count = static_cast<std::size_t>(geometry.element_count());
  for (std::size_t idx : connected_set) {
    if (idx >= count) {
      throw std::domain_error("conjugate_beam_config: connected index out of range");
    }
  }
  const Eigen::VectorXd phases =
      ideal_continuous_phases(ue_dir, bs_dir, geometry, lambda);
  RdarsConfiguration config(count);
  for (std::size_t n = 0; n < count; ++n) {
    config.set_reflection(n, quantize_phase(phases[static_cast<Eigen::Index>(n)]));
  }
  for (std::size_t idx : connected_set) config.set_connected(idx);
  return config;
}

RdarsConfiguration scrambled_config(std::size_t element_count,
                                    std::span<const std::size_t> connected_set,
                                    std::uint64_t seed) {
  for (std::size_t idx : connected_set) {
    if (idx >= element_count) {
      throw std::domain_error("scrambled_config: connected index out of range");
    }
  }
  auto rng = make_stream(seed, 0x5C4A);
  RdarsConfiguration config(element_count);
  for (std::size_t n = 0; n < element_count; ++n) {
    config.set_reflection(
        n, PhaseCode{static_cast<std::uint8_t>(uniform_below(rng, kPhaseLevels))});
  }
  for (std::size_t idx : connected_set) config.set_connected(idx);
  return config;
}

}  // namespace rdars
