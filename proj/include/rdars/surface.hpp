#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rdars/geometry.hpp"

// The programmable surface: per-element operating mode and 2-bit phase
// codes, plus synthesis of conjugate reflection beams.

namespace rdars {

inline constexpr int kPhaseLevels = 4;  // 2-bit phase shifter

/// One of the four reflection phases {0, pi/2, pi, 3*pi/2}.
struct PhaseCode {
  std::uint8_t value = 0;

  double radians() const { return value * (kTwoPi / kPhaseLevels); }
  friend bool operator==(PhaseCode, PhaseCode) = default;
};

/// Surface state: every element is either reflecting with a phase code or
/// connected (feeding its received signal to the receiver chain, no
/// reflection). Connected elements carry no phase information.
class RdarsConfiguration {
 public:
  RdarsConfiguration() = default;
  explicit RdarsConfiguration(std::size_t element_count)
      : codes_(element_count, 0), connected_(element_count, false) {}

  static RdarsConfiguration all_reflection(std::size_t element_count,
                                           PhaseCode code = {});
  static RdarsConfiguration all_connected(std::size_t element_count);

  std::size_t size() const { return codes_.size(); }
  bool is_connected(std::size_t n) const { return connected_[n]; }
  PhaseCode code(std::size_t n) const { return PhaseCode{codes_[n]}; }

  void set_reflection(std::size_t n, PhaseCode code);
  void set_connected(std::size_t n);  // clears the stored code

  std::vector<std::size_t> connected_set() const;
  std::vector<std::size_t> reflect_set() const;
  std::size_t connected_count() const;

  friend bool operator==(const RdarsConfiguration&,
                         const RdarsConfiguration&) = default;

 private:
  std::vector<std::uint8_t> codes_;
  std::vector<bool> connected_;
};

/// Nearest 2-bit phase code for `phi` (any finite value, taken mod 2*pi);
/// ties go to the lower code. `levels` is fixed at 4 for this surface.
PhaseCode quantize_phase(double phi, int levels = kPhaseLevels);

/// Unquantized conjugate phases -(phase_in + phase_out) per element, for
/// quantization-loss studies. Mode selection is not applied.
Eigen::VectorXd ideal_continuous_phases(const Eigen::Vector3d& ue_dir,
                                        const Eigen::Vector3d& bs_dir,
                                        const ArrayGeometry& geometry,
                                        double lambda);

/// Beam configuration that reflects a plane wave arriving from `ue_dir`
/// toward `bs_dir` (both unit vectors in the local frame): every element
/// outside `connected_set` gets the quantized conjugate phase, the listed
/// elements are switched to connected mode.
RdarsConfiguration conjugate_beam_config(const Eigen::Vector3d& ue_dir,
                                         const Eigen::Vector3d& bs_dir,
                                         std::span<const std::size_t> connected_set,
                                         const ArrayGeometry& geometry,
                                         double lambda);

/// Pseudo-random phase codes (seeded) with the given connected set; used to
/// collapse the coherent reflected component when measuring the direct path.
RdarsConfiguration scrambled_config(std::size_t element_count,
                                    std::span<const std::size_t> connected_set,
                                    std::uint64_t seed);

}  // namespace rdars
