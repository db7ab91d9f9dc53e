#pragma once

namespace trappedset {

/// Real 2x2 matrix [[a, b], [c, d]]; also a Moebius map of the upper half plane.
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  [[nodiscard]] double trace() const noexcept { return a + d; }
  [[nodiscard]] double det() const noexcept { return a * d - b * c; }
  /// Inverse of a determinant-one matrix.
  [[nodiscard]] Mat2 inverse() const noexcept { return {d, -b, -c, a}; }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) noexcept {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
};

/// Translation length 2 arccosh(|tr|/2) of a hyperbolic element, evaluated
/// as 2 log1p(...) so it stays accurate both near |tr| = 2 and for huge traces.
double length_from_trace(double trace);

}  // namespace trappedset
