#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "trappedset/bump.hpp"
#include "trappedset/orbit.hpp"

namespace trappedset {

enum class TestKind : std::uint8_t { Phi1, Phi2, FLambdaT };

std::string_view test_kind_name(TestKind k) noexcept;
TestKind parse_test_kind(std::string_view name);

/// A bump rescaled to half-width a about b, paired against e^{i lambda t}.
struct WindowedTest {
  TestKind kind = TestKind::Phi2;
  double a = 0.5;
  double b = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double beta = 0.0;
  double T = 0.0;

  /// phi((t - b) / a).
  [[nodiscard]] double window(double t) const noexcept;
  [[nodiscard]] double support_lo() const noexcept { return b - a; }
  [[nodiscard]] double support_hi() const noexcept { return b + a; }
};

/// a = e^{-J+ T} = beta^{-eps J+}, T = eps log beta, centre b in (T-1, T).
WindowedTest make_phi1(double beta, double epsilon, double j_plus, double center, double lambda);
/// b = T - 1/2, a = 1/2.
WindowedTest make_phi2(double T, double lambda);
/// f_{lambda,T}(t) = cos(lambda t) phi((t - T + 1/2) / (1/2)).
WindowedTest make_flambda(double lambda, double T);

struct TraceEvaluation {
  std::complex<double> value;
  double truncation_bound = 0.0;
  std::size_t contributing_orbits = 0;
  bool oriented = false;
  /// sum of |amplitude * window| over contributing orbits (triangle bound).
  double amplitude_sum = 0.0;

  /// The cosine pairing.
  [[nodiscard]] double real() const noexcept { return value.real(); }
};

/// Sum over orbits in the test support of e^{i lambda l} amplitude phi((l-b)/a).
/// Throws CompletenessError unless the spectrum is complete up to the support's end.
TraceEvaluation geometric_side(const LengthSpectrum& spectrum, const WindowedTest& test);

/// lambda = (2 pi / l0) ceil(beta l0 / (2 pi)) so that cos(lambda l0) = 1 and
/// beta <= lambda <= beta + 1. DomainError when 2 pi / l0 > 1 leaves no multiple.
double align_lambda_phi1(double ell0, double beta);

}  // namespace trappedset
