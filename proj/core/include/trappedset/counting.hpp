#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trappedset/numeric.hpp"
#include "trappedset/resonance.hpp"

namespace trappedset {

/// Real parts of the resonances in the strip -s <= Im <= 0, with multiplicity.
class StripMeasure {
 public:
  StripMeasure() = default;
  StripMeasure(double s, std::vector<double> atoms, std::vector<int> multiplicities);

  [[nodiscard]] double depth() const noexcept { return s_; }
  [[nodiscard]] const std::vector<double>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] const std::vector<int>& multiplicities() const noexcept { return mult_; }
  [[nodiscard]] bool empty() const noexcept { return atoms_.empty(); }
  [[nodiscard]] double max_abs_atom() const noexcept;

  /// Mass of atoms in [lo, hi] (closed).
  [[nodiscard]] long long mass(double lo, double hi) const;
  /// Mass of atoms with r_lo <= |atom| <= r_hi.
  [[nodiscard]] long long mass_abs(double r_lo, double r_hi) const;

 private:
  double s_ = 0.0;
  std::vector<double> atoms_;  ///< ascending
  std::vector<int> mult_;
  std::vector<long long> prefix_;  ///< prefix_[i] = mass of atoms_[0..i)
};

StripMeasure strip_measure(const ResonanceSet& set, double s);

/// Mass of atoms with |atom| <= r (boundary inclusive).
long long strip_count(const StripMeasure& measure, double r);

struct WindowLowerBoundRow {
  double beta = 0.0;
  double half_width = 0.0;  ///< beta^{nu + eps J+}
  long long mass = 0;
  double target = 0.0;      ///< beta^{eps (J+ - Theta)}
  double ratio = 0.0;       ///< mass / target
  bool empty = false;
};

/// mu_s([beta - w, beta + w] u [-beta - w, -beta + w]) with w = beta^{nu + eps J+},
/// against beta^{eps (J+ - Theta)}; report only.
std::vector<WindowLowerBoundRow> window_lower_bound_check(const StripMeasure& measure,
                                                          std::span<const double> beta_grid, double epsilon,
                                                          double j_plus, double nu, double theta_plus_u);

struct TauberianResult {
  bool hypothesis_held = false;
  std::optional<double> first_violation;  ///< smallest grid r where the hypothesis fails
  bool conclusion_held = false;
  double c1 = 0.0;
  double c2 = 0.0;
  bool verdict = false;
  std::vector<double> r_grid;
};

/// Checks mu({r <= |x| <= r + r^delta}) >= c r^{kappa + delta} on a log grid
/// in [r0, r_top] (r_top + r_top^delta stays inside the atoms), then fits
/// N(r) = mu({|x| <= r}) >= c1 r^{1+kappa} - c2 with c1 the least-squares slope
/// and c2 >= 0 the smallest offset that makes the inequality hold on the grid.
TauberianResult tauberian_accumulate(const StripMeasure& measure, double delta, double kappa, double c, double r0,
                                     std::size_t grid_points = 64);

struct LowerBoundShapeCheck {
  double exponent = 0.0;  ///< 1 - eps * Theta
  double constant = 0.0;  ///< min N(r) / r^exponent over the first half of the grid
  bool holds = false;     ///< N(r) >= constant r^exponent on the second half
  std::optional<double> first_violation;
};

/// Lower-bound shape N(r) >= C r^{1 - eps Theta} with C fitted on the first
/// half of r_grid and checked on the second half.
LowerBoundShapeCheck lower_bound_shape_check(const StripMeasure& measure, std::span<const double> r_grid, double epsilon,
                                   double theta);

enum class EnsembleKind : std::uint8_t { Lattice, PowerLaw, Poisson };

/// Lattice: atoms spacing * n, n = 0..extent/spacing, on `rows` rows Im = -(k + 1/2).
/// PowerLaw: atoms j^{1/exponent} so that N(r) = floor(r^exponent), Im uniform in [-depth, 0].
/// Poisson: homogeneous process of the given intensity on [0, extent], Im uniform in [-depth, 0].
struct EnsembleDescriptor {
  EnsembleKind kind = EnsembleKind::Lattice;
  double parameter = 1.0;  ///< spacing, exponent or intensity
  double depth = 1.0;      ///< rows for Lattice, strip depth otherwise
  double extent = 1000.0;
};

EnsembleDescriptor parse_ensemble(const std::string& text);
std::string ensemble_string(const EnsembleDescriptor& d);

ResonanceSet synthetic_ensemble(const EnsembleDescriptor& descriptor, std::uint64_t seed);

}  // namespace trappedset
