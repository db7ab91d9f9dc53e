#pragma once

#include <cstdint>
#include <vector>

#include "trappedset/mat2.hpp"
#include "trappedset/orbit.hpp"

namespace trappedset {

/// Three equal disks of radius `disk_radius` centred on an equilateral
/// triangle with side `center_separation`.
struct ThreeDiskConfig {
  double center_separation = 6.0;
  double disk_radius = 1.0;
};

void validate(const ThreeDiskConfig& config);

/// Periodic billiard trajectory for a bounce sequence, as found by Newton
/// iteration on the bounce angles.
struct BilliardOrbit {
  std::vector<std::uint8_t> code;
  bool converged = false;
  int iterations = 0;
  double length = 0.0;
  std::vector<double> angles;         ///< polar angle of each bounce point on its disk
  std::vector<double> flights;        ///< flight i runs from bounce i to bounce i+1
  std::vector<double> cos_incidence;  ///< cos of the reflection angle at each bounce
};

BilliardOrbit solve_billiard_orbit(const ThreeDiskConfig& config, const std::vector<std::uint8_t>& code,
                                   int max_iterations = 200);

/// Return map linearisation in Birkhoff coordinates (arc length, reflection
/// angle) at bounce 0, composed from free flights and mirror curvatures.
Mat2 curvature_monodromy(const ThreeDiskConfig& config, const BilliardOrbit& orbit);

/// Same matrix from central differences of the billiard map itself, with one
/// Richardson step (h and h/2).
Mat2 finite_difference_monodromy(const ThreeDiskConfig& config, const BilliardOrbit& orbit, double step = 1e-6);

/// Admissible codes (no equal neighbours, cyclically) of 2..max_symbols
/// symbols, one per rotation class, or per rotation+reversal class when
/// unoriented.
std::vector<std::vector<std::uint8_t>> three_disk_codes(std::size_t max_symbols, bool oriented);

/// Orbits with length <= horizon among codes of at most max_symbol_length symbols.
LengthSpectrum enumerate_three_disk(const ThreeDiskConfig& config, double horizon, std::size_t max_symbol_length,
                                    bool oriented = false);

}  // namespace trappedset
