#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "trappedset/cylinder.hpp"
#include "trappedset/errors.hpp"
#include "trappedset/pressure.hpp"
#include "trappedset/schottky.hpp"
#include "trappedset/spectrum_stats.hpp"
#include "trappedset/three_disk.hpp"

using namespace trappedset;

TEST_CASE("window counts on the cylinder") {
  const auto sp = enumerate_cylinder({2.0}, 20.0, false);
  CHECK(window_count(sp, 6.25, 0.5) == 1);
  CHECK(window_count(sp, 5.25, 0.5) == 0);
  CHECK_THROWS_AS(window_count(sp, 20.5, 0.5), OutOfHorizonError);
}

TEST_CASE("cylinder entropy is zero within its band") {
  const auto sp = enumerate_cylinder({2.0}, 40.0, false);
  // width 2 windows each hold exactly one length
  const auto e = entropy_estimate(sp, Interval{2.0, 40.0}, 2.0);
  CHECK(e.band.lo <= 0.0);
  CHECK(e.band.hi >= 0.0);
  CHECK(std::abs(e.h_top) < 1e-12);
}

TEST_CASE("entropy of an engineered log-grid spectrum is 1") {
  // lengths log n for n = 1..N give N(T) = e^T, so window counts grow like e^T
  std::vector<double> lengths;
  for (int n = 2; n <= 200000; ++n) lengths.push_back(std::log(double(n)));
  const auto sp = fixture::synthetic(lengths, std::log(200000.0));
  const auto e = entropy_estimate(sp, Interval{4.0, 12.0});
  CHECK(e.h_top == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("entropy needs five nonempty windows") {
  // off the window edges, so each length sits in exactly one window
  const auto sp = fixture::synthetic({5.2, 6.2, 7.2}, 10.0);
  CHECK_THROWS_AS(entropy_estimate(sp, Interval{4.0, 10.0}), InsufficientDataError);
}

TEST_CASE("entropy is invariant under translating the spectrum") {
  std::vector<double> lengths;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 3000; ++i) lengths.push_back(2.0 + 8.0 * std::sqrt(u(rng)));
  std::vector<double> shifted;
  for (double l : lengths) shifted.push_back(l + 3.0);
  const auto a = entropy_estimate(fixture::synthetic(lengths, 10.0), Interval{4.0, 10.0});
  const auto b = entropy_estimate(fixture::synthetic(shifted, 13.0), Interval{7.0, 13.0});
  CHECK(a.h_top == doctest::Approx(b.h_top).epsilon(1e-9));
}

TEST_CASE("minimal separation: engineered witness") {
  const double T = 10.0;
  const double nu = 0.5;
  const double c0 = 0.4;
  const double l1 = T - 0.4;
  const double l2 = l1 + 2.0 * std::exp(-nu * T);
  const double l3 = l2 + std::exp(-(c0 + 1.0) * T);
  const double l4 = l3 + 2.0 * std::exp(-nu * T);
  const auto sp = fixture::synthetic({l1, l2, l3, l4}, 12.0);
  const std::vector<double> grid{T};
  const auto res = check_minimal_separation(sp, nu, c0, grid);
  REQUIRE(res.size() == 1);
  REQUIRE(res[0].witness.has_value());
  const auto& w = *res[0].witness;
  CHECK(w.cluster.size() >= 3);
  CHECK(w.left_gap >= std::exp(-nu * T));
  CHECK(w.right_gap >= std::exp(-nu * T));
  CHECK(w.cluster_span <= std::exp(-c0 * T));
  for (const auto& e : w.cluster) CHECK(w.window.contains(e.length));
  CHECK(w.nu_used == nu);
  CHECK(w.c0_used == c0);
}

TEST_CASE("minimal separation: cylinder and over-crowded spectra have no witness") {
  const auto cyl = enumerate_cylinder({2.0}, 20.0, false);
  const std::vector<double> grid{6.25, 8.0, 10.1, 15.0};
  for (const auto& r : check_minimal_separation(cyl, 0.1, 1.0, grid)) CHECK_FALSE(r.witness.has_value());

  const double T = 8.0;
  const double nu = 0.5;
  std::vector<double> crowd;
  for (double l = T - 0.49; l <= T; l += std::exp(-2.0 * nu * T)) crowd.push_back(l);
  const auto sp = fixture::synthetic(crowd, 9.0);
  const std::vector<double> g{T};
  CHECK_FALSE(check_minimal_separation(sp, nu, 0.1, g)[0].witness.has_value());
}

TEST_CASE("minimal separation merges equal lengths") {
  const double T = 10.0;
  const auto sp = fixture::synthetic({9.6, 9.8, 9.8, 9.8, 10.0}, 11.0);
  const std::vector<double> grid{T};
  // outer gaps 0.2 >= e^{-2}
  const auto res = check_minimal_separation(sp, 0.2, 5.0, grid);
  REQUIRE(res[0].witness.has_value());
  CHECK(res[0].count == 5);
  bool merged = false;
  for (const auto& e : res[0].witness->cluster) merged |= e.multiplicity == 3;
  CHECK(merged);
}

TEST_CASE("minimal separation is monotone in nu") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> lengths;
    const int n = 3 + int(u(rng) * 12);
    for (int i = 0; i < n; ++i) lengths.push_back(7.5 + 0.5 * u(rng) * u(rng));
    const auto sp = fixture::synthetic(lengths, 9.0);
    const std::vector<double> grid{8.0};
    bool seen = false;
    for (double nu : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
      const bool w = check_minimal_separation(sp, nu, 0.05, grid)[0].witness.has_value();
      if (seen) CHECK(w);
      seen |= w;
    }
  }
}

TEST_CASE("theta_plus_u on surface models") {
  const auto cyl = enumerate_cylinder({2.0}, 20.0, false);
  const double t = theta_plus_u(cyl, Interval{10.0, 20.0});
  CHECK(std::abs(t - 0.5) <= 1e-3);
  CHECK(std::abs(t - 0.5) <= 1.0 / (2.0 * 10.0));
  const auto sch = enumerate_schottky(SchottkyGroup::create(default_schottky_config()), 12.0, false);
  const double ts = theta_plus_u(sch, Interval{8.0, 12.0});
  CHECK(std::abs(ts - 0.5) <= 1e-2);
  CHECK(std::abs(ts - 0.5) <= 1.0 / (2.0 * 8.0));
  CHECK_THROWS_AS(theta_plus_u(cyl, Interval{2.5, 3.5}), InsufficientDataError);
}

TEST_CASE("theta_plus_u on the three-disk system matches the finite-difference monodromies") {
  const ThreeDiskConfig cfg{6.0, 1.0};
  const auto sp = enumerate_three_disk(cfg, 26.0, 6, false);
  double expected = 0.0;
  for (const auto& o : sp.orbits) {
    if (o.length < 8.0 || o.length > 26.0) continue;
    const auto orbit = solve_billiard_orbit(cfg, o.code.symbols);
    const Mat2 fd = finite_difference_monodromy(cfg, orbit);
    const double tr = fd.a + fd.d;
    const double det = fd.a * fd.d - fd.b * fd.c;
    const double Lambda = 0.5 * (tr + (tr > 0 ? 1.0 : -1.0) * std::sqrt(tr * tr - 4.0 * det));
    expected = std::max(expected, std::log(std::abs(1.0 - Lambda)) / (2.0 * o.length));
  }
  CHECK(std::abs(theta_plus_u(sp, Interval{8.0, 26.0}) - expected) <= 1e-4);
}

TEST_CASE("choose_j_plus") {
  CHECK(choose_j_plus(0.5, 0.0, 0.1) == doctest::Approx(0.6));
  CHECK(choose_j_plus(0.5, 0.3, 0.7) == doctest::Approx(0.8));
  CHECK(choose_j_plus(0.0, 0.0, 0.0) == doctest::Approx(0.1));
  const auto c = make_constants(0.5, 0.45, 0.2);
  CHECK(c.j_plus > std::max({c.theta_plus_u, c.h_top, c.nu}));
}

TEST_CASE("Schottky entropy agrees with the Bowen root") {
  const auto sp = enumerate_schottky(SchottkyGroup::create(default_schottky_config()), 22.0, false);
  const auto e = entropy_estimate(sp, Interval{8.0, 22.0});
  const auto b = bowen_root(sp, PressureMethod::WindowRegression, Interval{8.0, 22.0});
  CHECK(std::abs(e.h_top - b.t_u) <= 0.05);
}
