#include "trappedset/three_disk.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "trappedset/errors.hpp"
#include "trappedset/numeric.hpp"
#include "trappedset/orbit_csv.hpp"
#include "trappedset/words.hpp"

namespace trappedset {

namespace {

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

Vec2 disk_center(const ThreeDiskConfig& cfg, std::uint8_t k) {
  const double rho = cfg.center_separation / std::sqrt(3.0);
  const double ang = std::numbers::pi / 2 + 2.0 * std::numbers::pi * k / 3.0;
  return {rho * std::cos(ang), rho * std::sin(ang)};
}

Vec2 radial(double theta) { return {std::cos(theta), std::sin(theta)}; }
Vec2 tangent(double theta) { return {-std::sin(theta), std::cos(theta)}; }

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

// Distance from point p to segment [u, v].
double segment_distance(Vec2 p, Vec2 u, Vec2 v) {
  const Vec2 d = v - u;
  const double t = std::clamp((p - u).dot(d) / d.dot(d), 0.0, 1.0);
  return (u + d * t - p).norm();
}

struct Geometry {
  std::vector<Vec2> points, normals, tangents, dirs;  // dirs[i]: unit vector bounce i -> i+1
  std::vector<double> flights;
};

Geometry evaluate(const ThreeDiskConfig& cfg, const std::vector<std::uint8_t>& code, const Eigen::VectorXd& theta) {
  const std::size_t n = code.size();
  Geometry g;
  g.points.resize(n);
  g.normals.resize(n);
  g.tangents.resize(n);
  g.dirs.resize(n);
  g.flights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.normals[i] = radial(theta[i]);
    g.tangents[i] = tangent(theta[i]);
    g.points[i] = disk_center(cfg, code[i]) + g.normals[i] * cfg.disk_radius;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = g.points[(i + 1) % n] - g.points[i];
    g.flights[i] = d.norm();
    g.dirs[i] = d * (1.0 / g.flights[i]);
  }
  return g;
}

// One billiard bounce from disk `from` at polar angle theta with outgoing
// reflection angle phi (velocity cos(phi) n + sin(phi) t) to disk `to`.
std::array<double, 2> bounce(const ThreeDiskConfig& cfg, std::uint8_t from, std::uint8_t to, double theta,
                             double phi) {
  const double a = cfg.disk_radius;
  const Vec2 n = radial(theta), t = tangent(theta);
  const Vec2 p = disk_center(cfg, from) + n * a;
  const Vec2 v = n * std::cos(phi) + t * std::sin(phi);
  const Vec2 c = disk_center(cfg, to);
  const double b = v.dot(p - c);
  const double disc = b * b - ((p - c).dot(p - c) - a * a);
  if (disc < 0.0) throw DomainError("three-disk: perturbed trajectory misses the next disk");
  const double s = -b - std::sqrt(disc);
  const Vec2 hit = p + v * s;
  const Vec2 n2 = (hit - c) * (1.0 / a);
  const Vec2 v2 = v - n2 * (2.0 * v.dot(n2));
  const double theta2 = std::atan2(n2.y, n2.x);
  const Vec2 t2 = tangent(theta2);
  return {theta2, std::atan2(v2.dot(t2), v2.dot(n2))};
}

std::array<double, 2> return_map(const ThreeDiskConfig& cfg, const std::vector<std::uint8_t>& code, double theta,
                                 double phi) {
  std::array<double, 2> s{theta, phi};
  for (std::size_t i = 0; i < code.size(); ++i) s = bounce(cfg, code[i], code[(i + 1) % code.size()], s[0], s[1]);
  return s;
}

}  // namespace

void validate(const ThreeDiskConfig& config) {
  if (!(config.disk_radius > 0.0) || !std::isfinite(config.disk_radius))
    throw ConfigError("three_disk: radius must be positive");
  if (!(config.center_separation > 2.0 * config.disk_radius) || !std::isfinite(config.center_separation))
    throw ConfigError("three_disk: separation must exceed twice the radius (disks must be disjoint)");
}

BilliardOrbit solve_billiard_orbit(const ThreeDiskConfig& cfg, const std::vector<std::uint8_t>& code,
                                   int max_iterations) {
  validate(cfg);
  const std::size_t n = code.size();
  if (n < 2) throw DomainError("three-disk: a periodic code needs at least two bounces");
  for (std::size_t i = 0; i < n; ++i)
    if (code[i] > 2 || code[i] == code[(i + 1) % n]) throw DomainError("three-disk: inadmissible code");

  const double a = cfg.disk_radius;
  Eigen::VectorXd theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 c = disk_center(cfg, code[i]);
    const Vec2 mid = (disk_center(cfg, code[(i + n - 1) % n]) + disk_center(cfg, code[(i + 1) % n])) * 0.5;
    theta[Eigen::Index(i)] = std::atan2(mid.y - c.y, mid.x - c.x);
  }

  BilliardOrbit orbit;
  orbit.code = code;
  Eigen::VectorXd grad(n);
  Eigen::MatrixXd hess(n, n);
  for (int it = 0; it <= max_iterations; ++it) {
    const Geometry g = evaluate(cfg, code, theta);
    grad.setZero();
    hess.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t prev = (i + n - 1) % n;
      const Vec2 force = g.dirs[prev] - g.dirs[i];
      grad[Eigen::Index(i)] = a * force.dot(g.tangents[i]);
      hess(Eigen::Index(i), Eigen::Index(i)) -= a * force.dot(g.normals[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const Vec2 u = g.dirs[i];
      const double d = g.flights[i];
      auto proj = [&](Vec2 p, Vec2 q) { return (p.dot(q) - p.dot(u) * q.dot(u)) / d; };
      const auto I = Eigen::Index(i), J = Eigen::Index(j);
      hess(I, I) += a * a * proj(g.tangents[i], g.tangents[i]);
      hess(J, J) += a * a * proj(g.tangents[j], g.tangents[j]);
      const double off = -a * a * proj(g.tangents[i], g.tangents[j]);
      hess(I, J) += off;
      hess(J, I) += off;
    }
    orbit.iterations = it;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-13 * cfg.center_separation) {
      orbit.converged = true;
      break;
    }
    if (it == max_iterations) break;
    Eigen::VectorXd step = hess.fullPivLu().solve(-grad);
    if (!step.allFinite()) break;
    const double big = step.lpNorm<Eigen::Infinity>();
    if (big > 0.3) step *= 0.3 / big;
    theta += step;
    if (big < 1e-15) {
      orbit.converged = true;
      break;
    }
  }

  const Geometry g = evaluate(cfg, code, theta);
  orbit.angles.assign(theta.data(), theta.data() + n);
  orbit.flights = g.flights;
  orbit.cos_incidence.resize(n);
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    total.add(g.flights[i]);
    orbit.cos_incidence[i] = g.normals[i].dot(g.dirs[i]);
    // the path must leave and arrive on the outside of each disk and clear the third one
    const std::size_t prev = (i + n - 1) % n;
    if (orbit.cos_incidence[i] <= 0.0 || g.normals[i].dot(g.dirs[prev]) >= 0.0) orbit.converged = false;
    for (std::uint8_t k = 0; k < 3; ++k) {
      if (k == code[i] || k == code[(i + 1) % n]) continue;
      if (segment_distance(disk_center(cfg, k), g.points[i], g.points[(i + 1) % n]) <= a) orbit.converged = false;
    }
  }
  orbit.length = total.value();
  return orbit;
}

Mat2 curvature_monodromy(const ThreeDiskConfig& cfg, const BilliardOrbit& orbit) {
  const double k = 1.0 / cfg.disk_radius;
  const std::size_t n = orbit.flights.size();
  Mat2 m;
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = orbit.flights[i];
    const double c0 = orbit.cos_incidence[i];
    const double c1 = orbit.cos_incidence[(i + 1) % n];
    const double s = -1.0 / c1;
    const Mat2 step{s * (tau * k + c0), s * tau, s * (tau * k * k + k * c1 + k * c0), s * (tau * k + c1)};
    m = step * m;
  }
  return m;
}

Mat2 finite_difference_monodromy(const ThreeDiskConfig& cfg, const BilliardOrbit& orbit, double step) {
  const double a = cfg.disk_radius;
  const double theta0 = orbit.angles.at(0);
  const Vec2 n0 = radial(theta0), t0 = tangent(theta0);
  // recover phi0 from the solved geometry
  Eigen::VectorXd th(Eigen::Index(orbit.angles.size()));
  for (std::size_t i = 0; i < orbit.angles.size(); ++i) th[Eigen::Index(i)] = orbit.angles[i];
  const Geometry g = evaluate(cfg, orbit.code, th);
  const double phi0 = std::atan2(g.dirs[0].dot(t0), g.dirs[0].dot(n0));

  auto jacobian = [&](double h) {
    double col[2][2];
    for (int j = 0; j < 2; ++j) {
      const double dth = j == 0 ? h / a : 0.0;
      const double dph = j == 1 ? h : 0.0;
      const auto plus = return_map(cfg, orbit.code, theta0 + dth, phi0 + dph);
      const auto minus = return_map(cfg, orbit.code, theta0 - dth, phi0 - dph);
      col[j][0] = a * wrap_angle(plus[0] - minus[0]) / (2.0 * h);
      col[j][1] = wrap_angle(plus[1] - minus[1]) / (2.0 * h);
    }
    return Mat2{col[0][0], col[1][0], col[0][1], col[1][1]};
  };
  // keep h * |M| small so the perturbed trajectory stays near the orbit
  const Mat2 pilot = jacobian(1e-9);
  const double norm = std::max({std::abs(pilot.a), std::abs(pilot.b), std::abs(pilot.c), std::abs(pilot.d)});
  const double h = step * std::min(1.0, 1e3 / norm);
  const Mat2 coarse = jacobian(h);
  const Mat2 fine = jacobian(0.5 * h);
  auto rich = [](double f, double c2) { return (4.0 * f - c2) / 3.0; };
  return {rich(fine.a, coarse.a), rich(fine.b, coarse.b), rich(fine.c, coarse.c), rich(fine.d, coarse.d)};
}

std::vector<std::vector<std::uint8_t>> three_disk_codes(std::size_t max_symbols, bool oriented) {
  std::vector<std::vector<std::uint8_t>> out;
  std::vector<std::uint8_t> w;
  auto rec = [&](auto&& self) -> void {
    if (w.size() >= 2 && w.back() != w.front()) {
      const auto canon = oriented ? least_rotation(w) : std::min(least_rotation(w), least_rotation(reversed(w)));
      if (canon == w) out.push_back(w);
    }
    if (w.size() == max_symbols) return;
    for (std::uint8_t x = w.front(); x < 3; ++x) {
      if (x == w.back()) continue;
      w.push_back(x);
      self(self);
      w.pop_back();
    }
  };
  for (std::uint8_t first = 0; first < 3; ++first) {
    w = {first};
    rec(rec);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  return out;
}

LengthSpectrum enumerate_three_disk(const ThreeDiskConfig& cfg, double horizon, std::size_t max_symbol_length,
                                    bool oriented) {
  validate(cfg);
  if (max_symbol_length < 2) throw ConfigError("three_disk: max_symbol_length must be at least 2");
  const auto codes = three_disk_codes(max_symbol_length, oriented);

  struct Result {
    bool ok = false;
    double shortest_candidate = 0.0;
    PeriodicOrbit orbit;
  };
  std::vector<Result> results(codes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= codes.size()) return;
      Result r;
      const BilliardOrbit b = solve_billiard_orbit(cfg, codes[i]);
      if (b.converged) {
        const Mat2 m = curvature_monodromy(cfg, b);
        const Mat2 fd = finite_difference_monodromy(cfg, b);
        const double tr = m.trace();
        r.ok = std::abs(fd.trace() - tr) <= 1e-5 * std::abs(tr);
        PeriodicOrbit& o = r.orbit;
        o.code = {Model::ThreeDisk, codes[i]};
        o.length = b.length;
        o.repetition = power_exponent(codes[i]);
        o.primitive_length = b.length / o.repetition;
        o.unstable_exponent = 0.5 * length_from_trace(tr);
        o.eigenvalue_sign = tr < 0.0 ? -1 : 1;
        const Stability st = stability_from_exponent(o.unstable_exponent, o.eigenvalue_sign);
        o.stability_det_abs = st.value;
        o.log_stability_det = st.log_value;
      }
      results[i] = std::move(r);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(worker_count(), unsigned(codes.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  LengthSpectrum spectrum;
  spectrum.horizon = horizon;
  spectrum.oriented = oriented;
  spectrum.model_descriptor = "three_disk separation=" + format_real(cfg.center_separation) +
                              " radius=" + format_real(cfg.disk_radius) +
                              " max_symbol_length=" + std::to_string(max_symbol_length);
  bool all_ok = true;
  double shortest_at_cap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (!results[i].ok) {
      all_ok = false;
      continue;
    }
    const auto& o = results[i].orbit;
    if (codes[i].size() == max_symbol_length) shortest_at_cap = std::min(shortest_at_cap, o.length);
    if (o.length <= horizon_cut(horizon)) spectrum.orbits.push_back(o);
  }
  spectrum.complete = all_ok && shortest_at_cap > horizon;
  normalize(spectrum);
  return spectrum;
}

}  // namespace trappedset
