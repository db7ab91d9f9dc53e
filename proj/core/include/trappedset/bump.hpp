#pragma once

#include <array>
#include <complex>

namespace trappedset {

/// Smooth even bump: 1 on [-3/4, 3/4], 0 outside (-1, 1).
///
/// phi(t) = S((t+1)/h) S((1-t)/h) with h = 1/4 and the smoothed step
/// S(x) = g(x) / (g(x) + g(1-x)), g(x) = e^{-1/x} for x > 0.
class BumpFunction {
 public:
  static constexpr double kPlateau = 0.75;
  static constexpr double kSupport = 1.0;
  static constexpr double kRamp = 0.25;
  static constexpr int kMaxDerivative = 8;

  [[nodiscard]] double operator()(double t) const noexcept { return value(t); }
  [[nodiscard]] double value(double t) const noexcept;
  /// d^order phi / dt^order for 0 <= order <= 8.
  [[nodiscard]] double derivative(double t, int order) const;
  /// phi and its first eight derivatives at t.
  [[nodiscard]] std::array<double, kMaxDerivative + 1> jet(double t) const noexcept;

  /// Integral of phi over the line, in [3/2, 2].
  [[nodiscard]] double integral() const;
};

/// Smoothed step S on [0, 1] (0 below, 1 above).
double smooth_step(double x) noexcept;

/// Fourier transform phi_hat(z) = integral phi(t) e^{-izt} dt for complex z.
///
/// The plateau contributes 2 sin(3z/4)/z in closed form; the two ramps are
/// integrated with composite Gauss-Legendre panels whose count grows with |z|.
/// Throws DomainError when |Im z| exceeds 700 (e^{|Im z|} overflow guard).
std::complex<double> phi_hat(const BumpFunction& bump, std::complex<double> z);

/// Same integral with an explicit panel count (refinement checks).
std::complex<double> phi_hat_panels(const BumpFunction& bump, std::complex<double> z, int panels);

}  // namespace trappedset
