#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "trappedset/numeric.hpp"
#include "trappedset/orbit.hpp"
#include "trappedset/spectrum_stats.hpp"

namespace trappedset {

/// Which per-orbit exponent carries the potential -s J^u.
enum class WeightMode : std::uint8_t {
  UnstableExponent,  ///< e^{-s lambda+}, exact for the built-in models
  LogStabilityDet,   ///< e^{-s log|det(1-P)|}, asymptotically equal; sensitivity checks
};

enum class PressureMethod : std::uint8_t { CumulativeSum, WindowRegression, BowenAsymptotic };

std::string_view method_name(PressureMethod m) noexcept;
PressureMethod parse_method(std::string_view name);

double orbit_weight(const PeriodicOrbit& orbit, double s, WeightMode mode = WeightMode::UnstableExponent);

/// Sum of e^{-s lambda+} over orbits with length in window. Zero for an empty
/// window; OutOfHorizonError when the window reaches past the horizon.
double orbit_sum(const LengthSpectrum& spectrum, double s, Interval window,
                 WeightMode mode = WeightMode::UnstableExponent);

struct PressureOptions {
  double window_width = 1.0;
  double grid_step = 0.5;
  WeightMode weight = WeightMode::UnstableExponent;
};

struct PressureEstimate {
  double value = 0.0;
  double weight_parameter = 0.0;
  PressureMethod method = PressureMethod::WindowRegression;
  Interval T_range;
  LinearFit fit;
  std::size_t nonempty_window_count = 0;
  std::vector<double> T_used;
  std::vector<double> log_sums;
  std::vector<double> skipped;
  /// BowenAsymptotic only: measured cumulative sum at T_range.hi over e^{T Pr}/Pr.
  double asymptotic_ratio = 0.0;
};

/// Pressure of -s J^u on an explicit T grid (window estimators use windows
/// [T - width, T]; the cumulative estimator uses [0, T]).
PressureEstimate pressure_estimate(const LengthSpectrum& spectrum, double s, PressureMethod method,
                                   std::span<const double> T_grid, const PressureOptions& options = {});

/// Same, on the default grid T = lo + width, lo + width + step, ..., hi.
PressureEstimate pressure_estimate(const LengthSpectrum& spectrum, double s, PressureMethod method, Interval T_range,
                                   const PressureOptions& options = {});

std::vector<double> pressure_grid(Interval T_range, const PressureOptions& options);

struct BowenRoot {
  double t_u = 0.0;
  Interval bracket;
  double hausdorff_dimension = 1.0;
  std::size_t iterations = 0;
};

/// Root of s -> Pr(-s J^u) on [0, 2] by bisection to width 1e-6. A zero
/// pressure at s = 0 returns t_u = 0 directly.
BowenRoot bowen_root(const LengthSpectrum& spectrum, PressureMethod method, Interval T_range,
                     const PressureOptions& options = {});

struct SandwichRow {
  double T = 0.0;
  double window_sum = 0.0;  ///< sum of trace amplitudes over [T-1, T]
  double log_window_sum = 0.0;
  bool skipped = false;
  bool within = false;  ///< c e^{T Pr} <= sum <= C T e^{T Pr}
};

/// The band constants fitted on the first half of the T range are widened by
/// this factor before the second half is checked against them.
inline constexpr double kSandwichSlack = 2.0;

struct SandwichReport {
  double pressure = 0.0;
  double c_lower = 0.0;  ///< min of sum e^{-T Pr} over the first half, over kSandwichSlack
  double c_upper = 0.0;  ///< max of sum e^{-T Pr} / T over the first half, times kSandwichSlack
  bool holds = false;    ///< every second-half row within the fitted band
  LinearFit log_fit;     ///< log window sum against T
  std::vector<SandwichRow> rows;
};

/// Amplitude window sums against (1/C) e^{T Pr} <= sum <= C T e^{T Pr}.
SandwichReport pressure_sandwich_check(const LengthSpectrum& spectrum, std::span<const double> T_grid,
                                       double pressure, double width = 1.0);

}  // namespace trappedset
