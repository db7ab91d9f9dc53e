#include "trappedset/numeric.hpp"

#include "trappedset/errors.hpp"
#include "trappedset/mat2.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace trappedset {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("fit_line: need at least two points");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");

  LinearFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / double(n));
  fit.slope_stderr = n > 2 ? std::sqrt(ss / double(n - 2) / sxx) : 0.0;
  return fit;
}

std::vector<double> step_grid(double t_min, double t_max, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step_grid: step must be positive");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double t = t_min + double(i) * step;
    if (t > t_max + 1e-9 * step) break;
    out.push_back(t);
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * double(i) / double(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

double phase_mod_2pi(double lambda, double t) noexcept {
  // 2*pi = kHi + kMid + kLo to ~160 bits.
  constexpr double kHi = 6.283185307179586;
  constexpr double kMid = 2.4492935982947064e-16;
  constexpr double kLo = -5.989539619436679e-33;

  const double p = lambda * t;
  const double e = std::fma(lambda, t, -p);
  const double k = std::nearbyint(p / kHi);
  double r = std::fma(-k, kHi, p);
  r = std::fma(-k, kMid, r);
  r = std::fma(-k, kLo, r) + e;
  constexpr double pi = std::numbers::pi;
  while (r > pi) r -= 2.0 * pi;
  while (r <= -pi) r += 2.0 * pi;
  return r;
}

double length_from_trace(double trace) {
  const double t = std::abs(trace);
  if (!(t > 2.0)) throw DomainError("length_from_trace: |trace| must exceed 2 (hyperbolic element)");
  // 2 log((t + sqrt(t^2 - 4)) / 2), written around t = 2 to avoid cancellation
  const double root = std::sqrt((t - 2.0) * (t + 2.0));
  return 2.0 * std::log1p(0.5 * ((t - 2.0) + root));
}

namespace {

GaussLegendreRule build_rule(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

unsigned worker_count() {
  if (const char* env = std::getenv("TRAPPEDSET_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return unsigned(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace trappedset
