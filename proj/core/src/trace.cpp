#include "trappedset/trace.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "trappedset/errors.hpp"
#include "trappedset/numeric.hpp"

namespace trappedset {

std::string_view test_kind_name(TestKind k) noexcept {
  switch (k) {
    case TestKind::Phi1: return "phi1";
    case TestKind::Phi2: return "phi2";
    case TestKind::FLambdaT: return "flambda";
  }
  return "?";
}

TestKind parse_test_kind(std::string_view name) {
  if (name == "phi1") return TestKind::Phi1;
  if (name == "phi2") return TestKind::Phi2;
  if (name == "flambda") return TestKind::FLambdaT;
  throw ConfigError("unknown test '" + std::string(name) + "' (phi1|phi2|flambda)");
}

double WindowedTest::window(double t) const noexcept { return BumpFunction{}((t - b) / a); }

WindowedTest make_phi1(double beta, double epsilon, double j_plus, double center, double lambda) {
  if (!(beta > 1.0) || !(epsilon > 0.0) || !(j_plus > 0.0))
    throw DomainError("phi1 needs beta > 1, epsilon > 0, J+ > 0");
  WindowedTest t;
  t.kind = TestKind::Phi1;
  t.beta = beta;
  t.epsilon = epsilon;
  t.T = epsilon * std::log(beta);
  t.a = std::exp(-j_plus * t.T);
  t.b = center;
  t.lambda = lambda;
  if (!(center > t.T - 1.0 && center < t.T))
    throw DomainError("phi1 centre must lie in (T-1, T) with T = eps log beta = " + std::to_string(t.T));
  if (lambda < beta || lambda > beta + 1.0) throw DomainError("phi1 needs beta <= lambda <= beta + 1");
  return t;
}

WindowedTest make_phi2(double T, double lambda) {
  if (!(T > 0.0)) throw DomainError("phi2 needs T > 0");
  WindowedTest t;
  t.kind = TestKind::Phi2;
  t.T = T;
  t.a = 0.5;
  t.b = T - 0.5;
  t.lambda = lambda;
  return t;
}

WindowedTest make_flambda(double lambda, double T) {
  WindowedTest t = make_phi2(T, lambda);
  t.kind = TestKind::FLambdaT;
  return t;
}

TraceEvaluation geometric_side(const LengthSpectrum& spectrum, const WindowedTest& test) {
  if (!spectrum.complete)
    throw CompletenessError("geometric_side: spectrum is not certified complete");
  if (test.support_hi() > spectrum.horizon * (1.0 + 1e-12))
    throw CompletenessError("geometric_side: test support reaches " + std::to_string(test.support_hi()) +
                            " beyond horizon " + std::to_string(spectrum.horizon));
  TraceEvaluation ev;
  ev.oriented = spectrum.oriented;
  const OrbitRange range = orbits_in(spectrum, test.support_lo(), test.support_hi());
  ComplexCompensatedSum sum;
  CompensatedSum abs_sum;
  for (std::size_t i = range.first; i < range.last; ++i) {
    const PeriodicOrbit& o = spectrum.orbits[i];
    const double w = amplitude(o) * test.window(o.length);
    if (w == 0.0) continue;
    const double phase = phase_mod_2pi(test.lambda, o.length);
    sum.add(std::polar(w, phase));
    abs_sum.add(std::abs(w));
    ++ev.contributing_orbits;
  }
  ev.value = sum.value();
  ev.amplitude_sum = abs_sum.value();
  return ev;
}

double align_lambda_phi1(double ell0, double beta) {
  if (!(ell0 > 0.0) || !(beta > 0.0)) throw DomainError("align_lambda_phi1: l0 and beta must be positive");
  const double spacing = 2.0 * std::numbers::pi / ell0;
  const double q = beta / spacing;
  // a quotient that is an integer up to rounding must not be pushed up a step
  const double k = std::ceil(q - 1e-12 * std::max(1.0, q));
  const double lambda = spacing * k;
  if (lambda > beta + 1.0)
    throw DomainError("align_lambda_phi1: no multiple of 2pi/l0 = " + std::to_string(spacing) + " in [" +
                      std::to_string(beta) + ", " + std::to_string(beta + 1.0) + "]");
  return lambda;
}

}  // namespace trappedset
