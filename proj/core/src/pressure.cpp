#include "trappedset/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "trappedset/errors.hpp"

namespace trappedset {

std::string_view method_name(PressureMethod m) noexcept {
  switch (m) {
    case PressureMethod::CumulativeSum: return "cumulative";
    case PressureMethod::WindowRegression: return "window";
    case PressureMethod::BowenAsymptotic: return "bowen";
  }
  return "?";
}

PressureMethod parse_method(std::string_view name) {
  if (name == "cumulative") return PressureMethod::CumulativeSum;
  if (name == "window") return PressureMethod::WindowRegression;
  if (name == "bowen") return PressureMethod::BowenAsymptotic;
  throw ConfigError("unknown pressure method '" + std::string(name) + "' (cumulative|window|bowen)");
}

double orbit_weight(const PeriodicOrbit& orbit, double s, WeightMode mode) {
  const double x = mode == WeightMode::UnstableExponent ? orbit.unstable_exponent : orbit.log_stability_det;
  return std::exp(-s * x);
}

double orbit_sum(const LengthSpectrum& spectrum, double s, Interval window, WeightMode mode) {
  if (window.lo < 0.0 || window.hi > spectrum.horizon * (1.0 + 1e-12))
    throw OutOfHorizonError("orbit_sum window [" + std::to_string(window.lo) + ", " + std::to_string(window.hi) +
                            "] not inside [0, " + std::to_string(spectrum.horizon) + "]");
  const OrbitRange range = orbits_in(spectrum, window.lo, window.hi);
  CompensatedSum sum;
  for (std::size_t i = range.first; i < range.last; ++i) sum.add(orbit_weight(spectrum.orbits[i], s, mode));
  return sum.value();
}

std::vector<double> pressure_grid(Interval T_range, const PressureOptions& options) {
  if (!(options.window_width > 0.0) || !(options.grid_step > 0.0)) throw DomainError("bad pressure grid options");
  if (!(T_range.hi > T_range.lo + options.window_width))
    throw DomainError("T range shorter than one pressure window");
  return step_grid(T_range.lo + options.window_width, T_range.hi, options.grid_step);
}

namespace {

PressureEstimate window_estimate(const LengthSpectrum& spectrum, double s, std::span<const double> grid,
                                 const PressureOptions& options) {
  PressureEstimate e;
  e.weight_parameter = s;
  WindowRegression reg;
  try {
    reg = window_regression(spectrum, grid, options.window_width,
                            [&](const PeriodicOrbit& o) { return orbit_weight(o, s, options.weight); });
  } catch (const InsufficientDataError& err) {
    throw EstimatorError(std::string("pressure: ") + err.what());
  }
  e.value = reg.fit.slope;
  e.fit = reg.fit;
  e.nonempty_window_count = reg.T_used.size();
  e.T_used = std::move(reg.T_used);
  e.log_sums = std::move(reg.log_sums);
  e.skipped = std::move(reg.skipped);
  return e;
}

PressureEstimate cumulative_estimate(const LengthSpectrum& spectrum, double s, std::span<const double> grid,
                                     const PressureOptions& options) {
  PressureEstimate e;
  e.weight_parameter = s;
  for (double T : grid) {
    const double sum = orbit_sum(spectrum, s, {0.0, T}, options.weight);
    if (sum > 0.0) {
      e.T_used.push_back(T);
      e.log_sums.push_back(std::log(sum));
    } else {
      e.skipped.push_back(T);
    }
  }
  if (e.T_used.size() < 2) throw EstimatorError("pressure: all cumulative sums empty");
  e.fit = fit_line(e.T_used, e.log_sums);
  e.value = e.fit.slope;
  e.nonempty_window_count = e.T_used.size();
  // A cumulative sum of positive terms never decreases, so its slope cannot
  // go negative; a converging sum shows up as growth that dies off instead.
  const std::size_t half = e.T_used.size() / 2;
  bool saturated = !(e.value > 1e-9 * std::max(1.0, std::abs(e.fit.intercept)));
  if (!saturated && half >= 2 && e.T_used.size() - half >= 2) {
    const std::span<const double> t(e.T_used), y(e.log_sums);
    const double early = fit_line(t.first(half), y.first(half)).slope;
    const double late = fit_line(t.subspan(half), y.subspan(half)).slope;
    saturated = late < 0.5 * early;
  }
  if (saturated) throw EstimatorError("nonpositive pressure: use WindowRegression");
  return e;
}

}  // namespace

PressureEstimate pressure_estimate(const LengthSpectrum& spectrum, double s, PressureMethod method,
                                   std::span<const double> T_grid, const PressureOptions& options) {
  if (T_grid.empty()) throw EstimatorError("pressure: empty T grid");
  std::vector<double> grid(T_grid.begin(), T_grid.end());
  std::sort(grid.begin(), grid.end());
  PressureEstimate e;
  switch (method) {
    case PressureMethod::CumulativeSum:
      e = cumulative_estimate(spectrum, s, grid, options);
      break;
    case PressureMethod::WindowRegression:
      e = window_estimate(spectrum, s, grid, options);
      break;
    case PressureMethod::BowenAsymptotic: {
      e = window_estimate(spectrum, s, grid, options);
      if (e.value > 0.0) {
        const double T = grid.back();
        const double measured = orbit_sum(spectrum, s, {0.0, T}, options.weight);
        e.asymptotic_ratio = measured / (std::exp(T * e.value) / e.value);
      } else {
        e.asymptotic_ratio = std::numeric_limits<double>::quiet_NaN();
      }
      break;
    }
  }
  e.method = method;
  e.T_range = {grid.front() - (method == PressureMethod::CumulativeSum ? grid.front() : options.window_width),
               grid.back()};
  return e;
}

PressureEstimate pressure_estimate(const LengthSpectrum& spectrum, double s, PressureMethod method, Interval T_range,
                                   const PressureOptions& options) {
  const auto grid = pressure_grid(T_range, options);
  return pressure_estimate(spectrum, s, method, grid, options);
}

BowenRoot bowen_root(const LengthSpectrum& spectrum, PressureMethod method, Interval T_range,
                     const PressureOptions& options) {
  const auto grid = pressure_grid(T_range, options);
  auto pr = [&](double s) { return pressure_estimate(spectrum, s, method, grid, options).value; };
  constexpr double kZeroPressure = 1e-12;
  constexpr double kWidth = 1e-6;
  double lo = 0.0;
  double hi = 2.0;
  const double f_lo = pr(lo);
  BowenRoot root;
  if (std::abs(f_lo) <= kZeroPressure) {
    root.t_u = 0.0;
    root.bracket = {0.0, 0.0};
    root.hausdorff_dimension = 1.0;
    return root;
  }
  const double f_hi = pr(hi);
  if (!(f_lo > 0.0 && f_hi < 0.0))
    throw BracketError("bowen_root: no sign change on [0, 2]: Pr(0) = " + std::to_string(f_lo) +
                       ", Pr(-2 J^u) = " + std::to_string(f_hi));
  while (hi - lo > kWidth) {
    const double mid = 0.5 * (lo + hi);
    (pr(mid) > 0.0 ? lo : hi) = mid;
    ++root.iterations;
  }
  root.bracket = {lo, hi};
  root.t_u = 0.5 * (lo + hi);
  root.hausdorff_dimension = 2.0 * root.t_u + 1.0;
  return root;
}

SandwichReport pressure_sandwich_check(const LengthSpectrum& spectrum, std::span<const double> T_grid,
                                       double pressure, double width) {
  SandwichReport rep;
  rep.pressure = pressure;
  std::vector<double> grid(T_grid.begin(), T_grid.end());
  std::sort(grid.begin(), grid.end());
  std::vector<double> xs;
  std::vector<double> ys;
  for (double T : grid) {
    if (T > spectrum.horizon * (1.0 + 1e-12)) throw OutOfHorizonError("sandwich T beyond horizon");
    SandwichRow row;
    row.T = T;
    const OrbitRange range = orbits_in(spectrum, T - width, T);
    CompensatedSum sum;
    for (std::size_t i = range.first; i < range.last; ++i) sum.add(amplitude(spectrum.orbits[i]));
    row.window_sum = sum.value();
    row.skipped = !(row.window_sum > 0.0);
    if (!row.skipped) {
      row.log_window_sum = std::log(row.window_sum);
      xs.push_back(T);
      ys.push_back(row.log_window_sum);
    }
    rep.rows.push_back(row);
  }
  if (xs.size() >= 2) rep.log_fit = fit_line(xs, ys);

  // constants from the first half, checked on the second half
  const std::size_t half = rep.rows.size() / 2;
  double lower = std::numeric_limits<double>::infinity();
  double upper = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const SandwichRow& r = rep.rows[i];
    if (r.skipped) continue;
    const double scale = std::exp(r.T * pressure);
    lower = std::min(lower, r.window_sum / scale);
    upper = std::max(upper, r.window_sum / (r.T * scale));
  }
  rep.c_lower = std::isfinite(lower) ? lower / kSandwichSlack : 0.0;
  rep.c_upper = upper * kSandwichSlack;
  bool any_checked = false;
  rep.holds = rep.c_upper > 0.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    SandwichRow& r = rep.rows[i];
    if (r.skipped) continue;
    const double scale = std::exp(r.T * pressure);
    r.within = r.window_sum >= rep.c_lower * scale * (1.0 - 1e-12) &&
               r.window_sum <= rep.c_upper * r.T * scale * (1.0 + 1e-12);
    if (i >= half) {
      any_checked = true;
      rep.holds = rep.holds && r.within;
    }
  }
  rep.holds = rep.holds && any_checked;
  return rep;
}

}  // namespace trappedset
