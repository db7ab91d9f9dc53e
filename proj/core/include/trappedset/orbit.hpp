#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace trappedset {

enum class Model : std::uint8_t { Cylinder, Schottky, ThreeDisk };

std::string_view model_name(Model m) noexcept;
Model parse_model(std::string_view name);

/// Combinatorial name of a closed orbit.
///
/// Cylinder: m copies of 0 (forward traversal) or 1 (reverse traversal).
/// Schottky: letters 0..3 for A, A^-1, B, B^-1 (printed "AaBb").
/// ThreeDisk: disk indices 0..2 (printed "123").
struct OrbitCode {
  Model model = Model::Cylinder;
  std::vector<std::uint8_t> symbols;

  [[nodiscard]] std::string str() const;
  static OrbitCode parse(Model model, std::string_view text);

  friend auto operator<=>(const OrbitCode&, const OrbitCode&) = default;
  friend bool operator==(const OrbitCode&, const OrbitCode&) = default;
};

struct PeriodicOrbit {
  OrbitCode code;
  double length = 0.0;
  double primitive_length = 0.0;
  int repetition = 1;
  /// Integrated unstable Jacobian; log of |expanding eigenvalue| of the monodromy.
  double unstable_exponent = 0.0;
  /// Sign of the expanding eigenvalue (-1 for inverse-hyperbolic orbits).
  int eigenvalue_sign = 1;
  /// |det(1 - P)|; +inf once it leaves double range, see log_stability_det.
  double stability_det_abs = 0.0;
  double log_stability_det = 0.0;
};

/// |det(1 - P)| carried both raw and in the log domain.
struct Stability {
  double value = 0.0;
  double log_value = 0.0;
  bool overflow = false;  ///< value is +inf; use log_value
};

/// |det(1-P)| for a 2x2 symplectic monodromy with eigenvalues sign*e^{+-exponent}:
/// e^exponent (1 - sign e^-exponent)^2.
Stability stability_from_exponent(double unstable_exponent, int eigenvalue_sign = 1);

/// (2 sinh(length/2))^2 for constant curvature -1, evaluated as
/// e^length (1 - e^-length)^2 so it is accurate for tiny and huge lengths.
Stability surface_stability_from_length(double length);

/// Trace-formula weight primitive_length / sqrt|det(1-P)|.
double amplitude(const PeriodicOrbit& orbit);

/// gamma^m for every m >= 1 with m * primitive_length <= horizon.
std::vector<PeriodicOrbit> expand_repetitions(const PeriodicOrbit& primitive, double horizon);

struct LengthSpectrum {
  std::vector<PeriodicOrbit> orbits;  ///< ascending length, ties by code
  double horizon = 0.0;
  std::string model_descriptor;
  bool complete = false;
  bool oriented = false;
};

/// Sorts by (length, code) and drops duplicate codes.
void normalize(LengthSpectrum& spectrum);

/// Relative slack applied to both window edges by orbits_in.
inline constexpr double kWindowEdgeTolerance = 1e-12;

/// Enumerators keep orbits up to this cut so that a length equal to the
/// horizon up to rounding is present exactly when a window would count it.
constexpr double horizon_cut(double horizon) noexcept { return horizon * (1.0 + kWindowEdgeTolerance); }

/// Orbits with length in [lo, hi] (edges widened by kWindowEdgeTolerance),
/// as an index range into spectrum.orbits.
struct OrbitRange {
  std::size_t first = 0;
  std::size_t last = 0;  ///< one past
  [[nodiscard]] std::size_t size() const noexcept { return last - first; }
  [[nodiscard]] bool empty() const noexcept { return first == last; }
};
OrbitRange orbits_in(const LengthSpectrum& spectrum, double lo, double hi);

/// Checks the LengthSpectrum invariants (ordering, unique codes, repetition
/// closure when complete). Returns an empty string when all hold.
std::string check_invariants(const LengthSpectrum& spectrum);

}  // namespace trappedset
