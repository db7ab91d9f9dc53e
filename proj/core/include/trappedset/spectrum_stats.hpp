#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "trappedset/numeric.hpp"
#include "trappedset/orbit.hpp"

namespace trappedset {

/// Number of orbits with length in [T - width, T]. Throws OutOfHorizonError
/// when T exceeds the enumeration horizon.
std::size_t window_count(const LengthSpectrum& spectrum, double T, double width = 0.5);

using OrbitWeight = std::function<double(const PeriodicOrbit&)>;

/// log of windowed weight sums regressed against T. Entropy and the pressure
/// window estimator are both thin wrappers around this.
struct WindowRegression {
  LinearFit fit;
  double width = 0.0;
  std::vector<double> T_used;    ///< nonempty windows, ascending
  std::vector<double> log_sums;  ///< parallel to T_used
  std::vector<double> skipped;   ///< T whose window held no orbit
};

/// Windows [T - width, T] for each T in T_grid, summed with `weight`.
/// Requires at least `min_windows` nonempty windows (InsufficientDataError).
WindowRegression window_regression(const LengthSpectrum& spectrum, std::span<const double> T_grid, double width,
                                   const OrbitWeight& weight, std::size_t min_windows = 5);

/// Windows of `width` tiling range: T = lo + width, lo + 2 width, ..., hi.
std::vector<double> tiling_grid(Interval range, double width);

struct EntropyEstimate {
  double h_top = 0.0;
  Interval band;  ///< h_top -+ 2 standard errors
  WindowRegression regression;
};

EntropyEstimate entropy_estimate(const LengthSpectrum& spectrum, Interval T_range, double width = 0.5);

struct ClusterElement {
  double length = 0.0;
  std::size_t multiplicity = 1;
};

struct SeparationWitness {
  Interval window;
  std::vector<ClusterElement> cluster;  ///< consecutive distinct lengths l_1 < ... < l_k
  double left_gap = 0.0;
  double right_gap = 0.0;
  double cluster_span = 0.0;
  double nu_used = 0.0;
  double c0_used = 0.0;
};

struct SeparationResult {
  double T = 0.0;
  std::size_t count = 0;  ///< orbits in the window, with multiplicity
  std::optional<SeparationWitness> witness;
};

/// First run l_1 < ... < l_k (k >= 3) of consecutive window lengths with both
/// outer gaps >= e^{-nu T} and l_{k-1} - l_2 <= e^{-c0 T}. Lengths that agree
/// to 1e-12 relative are one cluster element.
std::vector<SeparationResult> check_minimal_separation(const LengthSpectrum& spectrum, double nu, double c0,
                                                       std::span<const double> T_grid, double width = 0.5);

/// max over orbits with length in T_range of log|1 - Lambda| / (2 length),
/// Lambda the expanding eigenvalue with its sign.
double theta_plus_u(const LengthSpectrum& spectrum, Interval T_range);

struct DynamicalConstants {
  double theta_plus_u = 0.0;
  double h_top = 0.0;
  double nu = 0.0;
  double j_plus = 0.0;
  double margin = 0.1;
};

inline constexpr double kJPlusMargin = 0.1;

/// max(theta, h_top, nu) + 0.1.
double choose_j_plus(double theta_plus_u, double h_top, double nu);
DynamicalConstants make_constants(double theta_plus_u, double h_top, double nu);

}  // namespace trappedset
