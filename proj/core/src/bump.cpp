#include "trappedset/bump.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "trappedset/errors.hpp"
#include "trappedset/numeric.hpp"

namespace trappedset {

namespace {

constexpr int kOrder = BumpFunction::kMaxDerivative;

// Truncated Taylor series f(x0 + e) = sum c[k] e^k, k <= kOrder.
struct Jet {
  std::array<double, kOrder + 1> c{};

  static Jet variable(double x0, double slope) {
    Jet j;
    j.c[0] = x0;
    j.c[1] = slope;
    return j;
  }
  static Jet constant(double v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
};

Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  for (int k = 0; k <= kOrder; ++k) r.c[k] = a.c[k] + b.c[k];
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  for (int k = 0; k <= kOrder; ++k) r.c[k] = a.c[k] - b.c[k];
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  for (int k = 0; k <= kOrder; ++k)
    for (int j = 0; j <= k; ++j) r.c[k] += a.c[j] * b.c[k - j];
  return r;
}

Jet reciprocal(const Jet& a) {
  Jet r;
  r.c[0] = 1.0 / a.c[0];
  for (int k = 1; k <= kOrder; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
    r.c[k] = -s * r.c[0];
  }
  return r;
}

Jet exp(const Jet& a) {
  Jet r;
  r.c[0] = std::exp(a.c[0]);
  for (int k = 1; k <= kOrder; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += double(j) * a.c[j] * r.c[k - j];
    r.c[k] = s / double(k);
  }
  return r;
}

// Below this argument S and all its derivatives underflow (e^{-1/x} < 1e-300).
constexpr double kFlatEdge = 1.0 / 690.0;

// S(x) = 1 / (1 + e^u), u = 1/x - 1/(1-x), evaluated as a logistic in the
// branch where the exponential cannot overflow.
Jet smooth_step_jet(const Jet& x) {
  const double x0 = x.c[0];
  if (x0 <= kFlatEdge) return Jet{};
  if (x0 >= 1.0 - kFlatEdge) return Jet::constant(1.0);
  const Jet one = Jet::constant(1.0);
  const Jet u = reciprocal(x) - reciprocal(one - x);
  if (u.c[0] >= 0.0) {
    const Jet e = exp(Jet::constant(0.0) - u);  // e^{-u} <= 1
    return e * reciprocal(one + e);
  }
  const Jet e = exp(u);
  return reciprocal(one + e);
}

Jet bump_jet(double t) {
  const double h = BumpFunction::kRamp;
  if (std::abs(t) >= BumpFunction::kSupport) return Jet{};
  if (std::abs(t) <= BumpFunction::kPlateau) return Jet::constant(1.0);
  // only one factor is away from 1 outside the plateau
  if (t > 0.0) return smooth_step_jet(Jet::variable((1.0 - t) / h, -1.0 / h));
  return smooth_step_jet(Jet::variable((t + 1.0) / h, 1.0 / h));
}

}  // namespace

double smooth_step(double x) noexcept {
  if (x <= kFlatEdge) return 0.0;
  if (x >= 1.0 - kFlatEdge) return 1.0;
  const double u = 1.0 / x - 1.0 / (1.0 - x);
  if (u >= 0.0) {
    const double e = std::exp(-u);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(u));
}

double BumpFunction::value(double t) const noexcept {
  const double a = std::abs(t);
  if (a >= kSupport) return 0.0;
  if (a <= kPlateau) return 1.0;
  return smooth_step((1.0 - a) / kRamp);
}

std::array<double, BumpFunction::kMaxDerivative + 1> BumpFunction::jet(double t) const noexcept {
  const Jet j = bump_jet(t);
  std::array<double, kMaxDerivative + 1> out{};
  double factorial = 1.0;
  for (int k = 0; k <= kMaxDerivative; ++k) {
    if (k > 0) factorial *= double(k);
    out[k] = j.c[k] * factorial;
  }
  return out;
}

double BumpFunction::derivative(double t, int order) const {
  if (order < 0 || order > kMaxDerivative)
    throw DomainError("bump derivative order must be in [0, 8], got " + std::to_string(order));
  return jet(t)[order];
}

double BumpFunction::integral() const { return phi_hat(*this, {0.0, 0.0}).real(); }

namespace {

constexpr int kNodesPerPanel = 24;

int default_panels(std::complex<double> z) {
  // each panel spans at most ~6 radians of cos(z t) across the ramp of width
  // 1/4; the floor resolves the e^{-1/x} corner
  return 6 + int(std::ceil(std::abs(z) * BumpFunction::kRamp / 6.0));
}

// Composite rule on the ramp [3/4, 1]: nodes and weight * phi(node).
struct RampRule {
  std::vector<double> nodes;
  std::vector<double> weighted;
};

const RampRule& ramp_rule(int panels) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<RampRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[panels];
  if (!slot) {
    slot = std::make_unique<RampRule>();
    const auto& gl = gauss_legendre(kNodesPerPanel);
    const double p = BumpFunction::kPlateau;
    const double width = (BumpFunction::kSupport - p) / panels;
    const BumpFunction bump;
    for (int k = 0; k < panels; ++k) {
      const double mid = p + width * (k + 0.5);
      for (int i = 0; i < kNodesPerPanel; ++i) {
        const double t = mid + 0.5 * width * gl.nodes[i];
        const double v = bump.value(t);
        if (v == 0.0) continue;
        slot->nodes.push_back(t);
        slot->weighted.push_back(0.5 * width * gl.weights[i] * v);
      }
    }
  }
  return *slot;
}

}  // namespace

std::complex<double> phi_hat_panels(const BumpFunction& bump, std::complex<double> z, int panels) {
  (void)bump;  // the rule tabulates the canonical bump
  if (std::abs(z.imag()) > 700.0) throw DomainError("phi_hat: |Im z| > 700 would overflow");
  if (panels < 1) throw DomainError("phi_hat: panel count must be positive");
  // plateau: 2 * integral_0^{3/4} cos(z t) dt = 2 sin(3z/4) / z
  std::complex<double> plateau;
  const double p = BumpFunction::kPlateau;
  if (std::abs(z) < 1e-4) {
    const std::complex<double> w = p * z;
    plateau = 2.0 * p * (1.0 - w * w / 6.0 + w * w * w * w / 120.0);
  } else {
    plateau = 2.0 * std::sin(p * z) / z;
  }
  // ramp: 2 * integral_{3/4}^{1} phi(t) cos(z t) dt with
  // cos((x + iy) t) = cos(xt) cosh(yt) - i sin(xt) sinh(yt)
  const RampRule& rule = ramp_rule(panels);
  const double x = z.real();
  const double y = z.imag();
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    const double e = std::exp(y * t);
    const double ei = 1.0 / e;
    const double c = std::cos(x * t);
    const double s = std::sin(x * t);
    re += rule.weighted[i] * c * 0.5 * (e + ei);
    im -= rule.weighted[i] * s * 0.5 * (e - ei);
  }
  return plateau + 2.0 * std::complex<double>(re, im);
}

std::complex<double> phi_hat(const BumpFunction& bump, std::complex<double> z) {
  return phi_hat_panels(bump, z, default_panels(z));
}

}  // namespace trappedset
