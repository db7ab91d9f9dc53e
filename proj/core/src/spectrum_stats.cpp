#include "trappedset/spectrum_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "trappedset/errors.hpp"

namespace trappedset {

namespace {

void require_within_horizon(const LengthSpectrum& spectrum, double T) {
  if (T > spectrum.horizon * (1.0 + 1e-12))
    throw OutOfHorizonError("T = " + std::to_string(T) + " beyond enumeration horizon " +
                            std::to_string(spectrum.horizon));
}

}  // namespace

std::size_t window_count(const LengthSpectrum& spectrum, double T, double width) {
  if (!(width > 0.0)) throw DomainError("window width must be positive");
  require_within_horizon(spectrum, T);
  return orbits_in(spectrum, T - width, T).size();
}

std::vector<double> tiling_grid(Interval range, double width) {
  if (!(width > 0.0) || !(range.hi > range.lo)) throw DomainError("empty T range");
  return step_grid(range.lo + width, range.hi, width);
}

WindowRegression window_regression(const LengthSpectrum& spectrum, std::span<const double> T_grid, double width,
                                   const OrbitWeight& weight, std::size_t min_windows) {
  if (!(width > 0.0)) throw DomainError("window width must be positive");
  WindowRegression out;
  out.width = width;
  std::vector<double> grid(T_grid.begin(), T_grid.end());
  std::sort(grid.begin(), grid.end());
  for (double T : grid) {
    require_within_horizon(spectrum, T);
    const OrbitRange range = orbits_in(spectrum, T - width, T);
    CompensatedSum sum;
    for (std::size_t i = range.first; i < range.last; ++i) sum.add(weight(spectrum.orbits[i]));
    if (range.empty() || !(sum.value() > 0.0)) {
      out.skipped.push_back(T);
      continue;
    }
    out.T_used.push_back(T);
    out.log_sums.push_back(std::log(sum.value()));
  }
  if (out.T_used.size() < std::max<std::size_t>(min_windows, 2))
    throw InsufficientDataError("only " + std::to_string(out.T_used.size()) + " nonempty windows; need " +
                                std::to_string(std::max<std::size_t>(min_windows, 2)));
  out.fit = fit_line(out.T_used, out.log_sums);
  return out;
}

EntropyEstimate entropy_estimate(const LengthSpectrum& spectrum, Interval T_range, double width) {
  const auto grid = tiling_grid(T_range, width);
  EntropyEstimate e;
  e.regression = window_regression(spectrum, grid, width, [](const PeriodicOrbit&) { return 1.0; });
  e.h_top = e.regression.fit.slope;
  const double band = 2.0 * e.regression.fit.slope_stderr;
  e.band = {e.h_top - band, e.h_top + band};
  return e;
}

std::vector<SeparationResult> check_minimal_separation(const LengthSpectrum& spectrum, double nu, double c0,
                                                       std::span<const double> T_grid, double width) {
  if (!(nu > 0.0) || !(c0 > 0.0)) throw DomainError("nu and c0 must be positive");
  std::vector<SeparationResult> results;
  results.reserve(T_grid.size());
  for (double T : T_grid) {
    require_within_horizon(spectrum, T);
    SeparationResult res;
    res.T = T;
    const OrbitRange range = orbits_in(spectrum, T - width, T);
    res.count = range.size();

    std::vector<ClusterElement> lengths;
    for (std::size_t i = range.first; i < range.last; ++i) {
      const double l = spectrum.orbits[i].length;
      if (!lengths.empty() && l - lengths.back().length <= 1e-12 * l)
        ++lengths.back().multiplicity;
      else
        lengths.push_back({l, 1});
    }

    const double gap_min = std::exp(-nu * T);
    const double span_max = std::exp(-c0 * T);
    const std::size_t n = lengths.size();
    for (std::size_t i = 0; i + 2 < n && !res.witness; ++i) {
      const double left = lengths[i + 1].length - lengths[i].length;
      if (left < gap_min) continue;
      for (std::size_t j = i + 2; j < n; ++j) {
        const double span = lengths[j - 1].length - lengths[i + 1].length;
        if (span > span_max) break;  // grows with j
        const double right = lengths[j].length - lengths[j - 1].length;
        if (right < gap_min) continue;
        SeparationWitness w;
        w.window = {T - width, T};
        w.cluster.assign(lengths.begin() + std::ptrdiff_t(i), lengths.begin() + std::ptrdiff_t(j) + 1);
        w.left_gap = left;
        w.right_gap = right;
        w.cluster_span = span;
        w.nu_used = nu;
        w.c0_used = c0;
        res.witness = std::move(w);
        break;
      }
    }
    results.push_back(std::move(res));
  }
  return results;
}

double theta_plus_u(const LengthSpectrum& spectrum, Interval T_range) {
  const OrbitRange range = orbits_in(spectrum, T_range.lo, T_range.hi);
  if (range.empty()) throw InsufficientDataError("no orbits in the theta range");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = range.first; i < range.last; ++i) {
    const PeriodicOrbit& o = spectrum.orbits[i];
    const double x = o.unstable_exponent;
    const double log_factor = x + std::log1p(-double(o.eigenvalue_sign) * std::exp(-x));
    best = std::max(best, log_factor / (2.0 * o.length));
  }
  return best;
}

double choose_j_plus(double theta, double h_top, double nu) {
  return std::max({theta, h_top, nu}) + kJPlusMargin;
}

DynamicalConstants make_constants(double theta, double h_top, double nu) {
  for (double v : {theta, h_top, nu})
    if (!std::isfinite(v) || v < 0.0) throw DomainError("dynamical constants must be finite and nonnegative");
  return {theta, h_top, nu, choose_j_plus(theta, h_top, nu), kJPlusMargin};
}

}  // namespace trappedset
