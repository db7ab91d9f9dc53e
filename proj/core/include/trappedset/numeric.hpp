#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace trappedset {

/// Neumaier-compensated accumulator. Order of additions still matters for the
/// last bit, so callers that promise bit-stable output must fix the order.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexCompensatedSum {
 public:
  void add(std::complex<double> z) noexcept {
    re_.add(z.real());
    im_.add(z.imag());
  }
  [[nodiscard]] std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  [[nodiscard]] double width() const noexcept { return hi - lo; }
};

/// Ordinary least squares y = slope * x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  ///< zero when fewer than three points
  double residual_rms = 0.0;
  std::size_t points = 0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Grid t_min, t_min + step, ... up to t_max (inclusive within 1e-9 * step).
std::vector<double> step_grid(double t_min, double t_max, double step);

/// Logarithmically spaced grid with `count` points in [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// lambda * t reduced to (-pi, pi], exact product and a three-part 2*pi so the
/// result stays accurate for products up to ~2^50.
double phase_mod_2pi(double lambda, double t) noexcept;

/// n-point Gauss-Legendre rule on [-1, 1]. Cached per n; thread safe.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre(int n);

/// Worker count: TRAPPEDSET_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

}  // namespace trappedset
