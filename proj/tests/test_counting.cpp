#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "trappedset/counting.hpp"
#include "trappedset/errors.hpp"
#include "trappedset/resonance.hpp"

using namespace trappedset;
using std::numbers::pi;

TEST_CASE("strip measure of the cylinder lattice") {
  const auto set = cylinder_lattice(2.0, 3, 10);
  const auto s1 = strip_measure(set, 1.0);
  CHECK(s1.atoms().size() == 21);
  for (std::size_t i = 0; i < s1.atoms().size(); ++i)
    CHECK(s1.atoms()[i] == doctest::Approx(pi * (double(i) - 10.0)).epsilon(1e-15));
  const auto s2 = strip_measure(set, 2.0);
  CHECK(s2.atoms().size() == 42);
  CHECK(strip_measure(set, 0.4).empty());
  CHECK_THROWS_AS(strip_measure(set, 0.0), DomainError);
}

TEST_CASE("strip count boundary is inclusive") {
  const auto m = strip_measure(cylinder_lattice(2.0, 0, 10), 1.0);
  CHECK(strip_count(m, 10.0) == 7);
  CHECK(strip_count(m, pi) == 3);
  CHECK(strip_count(m, std::nextafter(pi, 0.0)) == 1);
  CHECK_THROWS_AS(strip_count(m, 0.0), DomainError);
}

TEST_CASE("strip count is nondecreasing in r and s") {
  const auto set = synthetic_ensemble(parse_ensemble("poisson:2,3,200"), 4);
  long long prev_s = -1;
  for (double s : {0.5, 1.0, 2.0, 3.0}) {
    const auto m = strip_measure(set, s);
    long long prev = -1;
    for (double r = 1.0; r < 210.0; r *= 1.3) {
      const long long c = strip_count(m, r);
      CHECK(c >= prev);
      prev = c;
    }
    CHECK(prev >= prev_s);
    prev_s = prev;
  }
}

TEST_CASE("cylinder strip count against 2 floor(r/pi) + 1") {
  const auto m = strip_measure(cylinder_lattice(2.0, 0, 4000), 1.0);
  for (double r = 1.0; r < 1.2e4; r *= 1.07) CHECK(strip_count(m, r) == 2 * (long long)std::floor(r / pi) + 1);
}

TEST_CASE("synthetic lattice ensemble") {
  const auto set = synthetic_ensemble(parse_ensemble("lattice:1,1,50"), 0);
  const auto m = strip_measure(set, 1.0);
  REQUIRE(m.atoms().size() == 51);
  for (std::size_t i = 0; i < m.atoms().size(); ++i) CHECK(m.atoms()[i] == double(i));
}

TEST_CASE("power-law ensemble recovers its exponent") {
  const auto set = synthetic_ensemble(parse_ensemble("powerlaw:1.3,1,10000"), 0);
  const auto m = strip_measure(set, 1.0);
  std::vector<double> x, y;
  for (double r : log_grid(100.0, 10000.0, 40)) {
    x.push_back(std::log(r));
    y.push_back(std::log(double(strip_count(m, r))));
  }
  CHECK(std::abs(fit_line(x, y).slope - 1.3) <= 0.05);
}

TEST_CASE("Poisson ensemble is deterministic per seed") {
  const auto d = parse_ensemble("poisson:1,2,500");
  std::ostringstream a, b, c;
  write_resonance_csv(a, synthetic_ensemble(d, 9));
  write_resonance_csv(b, synthetic_ensemble(d, 9));
  write_resonance_csv(c, synthetic_ensemble(d, 10));
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());
}

TEST_CASE("ensemble descriptors") {
  const auto d = parse_ensemble("powerlaw:1.5,2,300");
  CHECK(d.kind == EnsembleKind::PowerLaw);
  CHECK(d.parameter == 1.5);
  CHECK(d.depth == 2.0);
  CHECK(d.extent == 300.0);
  CHECK(parse_ensemble(ensemble_string(d)).extent == 300.0);
  CHECK_THROWS_AS(parse_ensemble("gauss:1"), ConfigError);
  CHECK_THROWS_AS(parse_ensemble("lattice"), ConfigError);
  CHECK_THROWS_AS(synthetic_ensemble(parse_ensemble("lattice:-1"), 0), DomainError);
  CHECK_THROWS_AS(synthetic_ensemble(parse_ensemble("lattice:1e-9,1,1e3"), 0), ResourceError);
}

TEST_CASE("window lower bound on the cylinder lattice") {
  const auto m = strip_measure(cylinder_lattice(2.0, 0, 2000), 1.0);
  std::vector<double> betas{50.0, 200.0, 1000.0, 3000.0};
  const auto rows = window_lower_bound_check(m, betas, 0.1, 0.6, 0.1, 0.5);
  for (const auto& r : rows) {
    CHECK(r.half_width == doctest::Approx(std::pow(r.beta, 0.1 + 0.06)));
    if (r.half_width >= pi) CHECK(r.mass >= 2 * (long long)std::floor(2.0 * r.half_width / pi));
    CHECK(std::isfinite(r.ratio));
  }
  // a window narrower than pi/2 centred between two lattice points is empty
  const double mid = 100.5 * pi;
  const std::vector<double> one{mid};
  const auto row = window_lower_bound_check(m, one, 0.01, 0.1, 0.01, 0.5);
  CHECK(row[0].half_width < pi / 2.0);
  CHECK(row[0].mass == 0);
  CHECK(row[0].empty);
}

TEST_CASE("Tauberian accumulation on the unit lattice") {
  const auto m = strip_measure(synthetic_ensemble(parse_ensemble("lattice:1,1,10000"), 0), 1.0);
  const auto res = tauberian_accumulate(m, 0.5, 0.0, 0.5, 10.0);
  CHECK(res.hypothesis_held);
  CHECK(res.verdict);
  CHECK(res.c1 == doctest::Approx(1.0).epsilon(0.02));
  for (double r : res.r_grid) CHECK(double(strip_count(m, r)) >= res.c1 * r - res.c2 - 1e-9);
}

TEST_CASE("Tauberian accumulation with a single atom fails") {
  const StripMeasure m(1.0, {500.0}, {1});
  const auto res = tauberian_accumulate(m, 0.5, 0.0, 0.5, 1.0);
  CHECK_FALSE(res.verdict);
  CHECK_FALSE(res.hypothesis_held);
  REQUIRE(res.first_violation.has_value());
  CHECK(*res.first_violation >= 1.0);
  CHECK_THROWS_AS(tauberian_accumulate(StripMeasure{}, 0.5, 0.0, 0.5, 1.0), InsufficientDataError);
}

TEST_CASE("Tauberian accumulation on the cylinder strip") {
  const auto m = strip_measure(cylinder_lattice(2.0, 0, 4000), 1.0);
  const auto res = tauberian_accumulate(m, 0.5, 0.0, 0.25, pi * pi);
  CHECK(res.verdict);
  CHECK(res.c1 >= 0.57);
  CHECK(res.c1 <= 0.70);
}

TEST_CASE("lower-bound shape on the cylinder") {
  const auto m = strip_measure(cylinder_lattice(2.0, 0, 4000), 1.0);
  const auto grid = log_grid(100.0, 10000.0, 32);
  const auto chk = lower_bound_shape_check(m, grid, 0.1, 1.5);
  CHECK(chk.exponent == doctest::Approx(0.85));
  CHECK(chk.constant > 0.0);
  CHECK(chk.holds);
}
