#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "trappedset/bump.hpp"
#include "trappedset/cylinder.hpp"
#include "trappedset/errors.hpp"
#include "trappedset/resonance.hpp"
#include "trappedset/trace.hpp"

using namespace trappedset;
using std::numbers::pi;
using cd = std::complex<double>;

namespace {

ResonanceSet subset(const ResonanceSet& set, auto pred) {
  ResonanceSet out;
  out.provenance = Provenance::Synthetic;
  for (const auto& r : set.entries)
    if (pred(r)) out.entries.push_back(r);
  normalize(out);
  return out;
}

}  // namespace

TEST_CASE("cylinder lattice points") {
  const auto set = cylinder_lattice(2.0, 1, 3);
  CHECK(set.entries.size() == 14);
  CHECK(set.lattice.has_value());
  bool found = false;
  for (const auto& r : set.entries) {
    CHECK(r.multiplicity == 1);
    if (std::abs(r.lambda - cd(pi, -0.5)) < 1e-15) found = true;
  }
  CHECK(found);
  // sorted by (Im desc, Re asc): the first row is k = 0 with spacing pi
  for (std::size_t i = 1; i < 7; ++i) {
    CHECK(set.entries[i].lambda.imag() == -0.5);
    CHECK(set.entries[i].lambda.real() - set.entries[i - 1].lambda.real() == doctest::Approx(pi).epsilon(1e-15));
  }
  CHECK(set.entries[7].lambda.imag() == -1.5);
  // the n = 1 point on the k = 0 row is a zero of 1 - e^{-2 s} at s = i pi
  CHECK(std::abs(1.0 - std::exp(-2.0 * cd(0.0, pi))) <= 1e-15);
}

TEST_CASE("multiplicity rules") {
  CHECK(rule_multiplicity(MultiplicityRule::Unit, 3) == 1);
  CHECK(rule_multiplicity(MultiplicityRule::Two, 3) == 2);
  CHECK(rule_multiplicity(MultiplicityRule::TwoKPlusOne, 3) == 7);
  CHECK(parse_rule("unit") == MultiplicityRule::Unit);
  CHECK_THROWS(parse_rule("three"));
}

TEST_CASE("normalize rejects resonances above the real axis") {
  ResonanceSet s;
  s.entries.push_back({cd(1.0, 0.5), 1});
  CHECK_THROWS_AS(normalize(s), DomainError);
}

TEST_CASE("phi_hat basics") {
  const BumpFunction phi;
  const cd zero = phi_hat(phi, 0.0);
  CHECK(zero.real() >= 1.5);
  CHECK(zero.real() <= 2.0);
  CHECK(zero.real() == doctest::Approx(phi.integral()).epsilon(1e-12));
  CHECK(std::abs(zero.imag()) <= 1e-15);
  for (double tau : {0.3, 1.0, 7.5, 42.0, 300.0, 999.0}) {
    const cd p = phi_hat(phi, tau);
    const cd m = phi_hat(phi, -tau);
    CHECK(std::abs(m - std::conj(p)) <= 1e-12);
  }
  CHECK_THROWS_AS(phi_hat(phi, cd(1.0, -701.0)), DomainError);
}

TEST_CASE("phi_hat is stable under panel refinement") {
  const BumpFunction phi;
  for (cd z : {cd(3.0, -0.5), cd(80.0, -4.0), cd(450.0, -16.0)}) {
    const cd fine = phi_hat_panels(phi, z, 256);
    CHECK(std::abs(phi_hat(phi, z) - fine) <= 1e-12 * std::exp(std::abs(z.imag())));
  }
}

TEST_CASE("Paley-Wiener constants are stable under grid refinement") {
  const BumpFunction phi;
  const auto coarse = fit_paley_wiener(phi, 200.0, 0.5, {4, 6});
  const auto fine = fit_paley_wiener(phi, 200.0, 0.25, {4, 6});
  for (std::size_t i = 0; i < 2; ++i) {
    MESSAGE("K = " << fine.envelopes[i].K << ": C coarse " << coarse.envelopes[i].C << ", fine " << fine.envelopes[i].C);
    CHECK(fine.envelopes[i].C >= coarse.envelopes[i].C);
    CHECK(fine.envelopes[i].C <= 1.05 * coarse.envelopes[i].C);
  }
  // the envelope majorizes |phi_hat| on off-grid points
  for (double x = 0.1; x < 200.0; x += 3.37) {
    for (double y : {0.0, -0.7, -3.0}) {
      const double v = std::abs(phi_hat(phi, cd(x, y))) * std::exp(-std::abs(y));
      CHECK(v <= 1.1 * fine.envelope(x - 0.25) + 1e-14);
    }
  }
}

TEST_CASE("spectral side of the empty set") {
  ResonanceSet s;
  const auto ev = spectral_side(s, make_phi2(8.5, 10.0), 1e-8);
  CHECK(ev.value == cd(0.0, 0.0));
  CHECK(ev.truncation_bound == 0.0);
}

TEST_CASE("spectral side of a single resonance at the test frequency") {
  const double lambda = 20.0;
  const auto t = make_phi2(6.5, lambda);
  ResonanceSet s;
  s.entries.push_back({cd(lambda, 0.0), 1});
  const BumpFunction phi;
  const cd expected = t.a * phi_hat(phi, 0.0) + t.a * phi_hat(phi, 2.0 * t.a * lambda) * std::exp(cd(0.0, -2.0 * t.b * lambda));
  const auto ev = spectral_side(s, t, 1e-8);
  CHECK(std::abs(ev.value - expected) <= 1e-14);
  CHECK(std::abs(ev.value - t.a * phi.integral()) <= std::abs(t.a * phi_hat(phi, 2.0 * t.a * lambda)) + 1e-14);
}

TEST_CASE("cylinder Poisson identity at T = 10.5") {
  const auto oriented = enumerate_cylinder({2.0}, 12.0, true);
  for (double lambda : {50.0, 100.0, 500.0}) {
    const auto t = make_phi2(10.5, lambda);
    const auto box = choose_lattice_box(2.0, MultiplicityRule::Unit, t, 1e-8);
    const auto set = cylinder_lattice(2.0, box.k_max, box.n_max);
    const auto spectral = spectral_side(set, t, 1e-8);
    const auto geo = geometric_side(oriented, t);
    CHECK(spectral.truncation_bound <= 1e-8);
    CHECK(std::abs(spectral.real() - geo.real()) <= spectral.truncation_bound + 1e-6);
    CHECK(std::abs(spectral.value.imag()) <= 1e-10);
  }
}

TEST_CASE("too small a box raises a truncation error") {
  const auto set = cylinder_lattice(2.0, 0, 5);
  CHECK_THROWS_AS(spectral_side(set, make_phi2(6.5, 50.0), 1e-8), TruncationError);
}

TEST_CASE("lattice tail bound of the chosen box") {
  const auto t = make_phi2(8.5, 100.0);
  const auto box = choose_lattice_box(2.0, MultiplicityRule::Unit, t, 1e-8);
  CHECK(lattice_tail_bound(box, t, default_paley_wiener()) <= 1e-8);
  LatticeBox smaller = box;
  smaller.n_max = box.n_max / 2;
  CHECK(lattice_tail_bound(smaller, t, default_paley_wiener()) > 1e-8);
}

TEST_CASE("spectral side is linear in the resonance set") {
  const auto t = make_phi2(6.5, 37.0);
  const auto set = cylinder_lattice(2.0, 4, 300);
  ResonanceSet whole = set;
  whole.lattice.reset();
  const auto a = subset(set, [](const Resonance& r) { return r.lambda.real() < 12.3; });
  const auto b = subset(set, [](const Resonance& r) { return r.lambda.real() >= 12.3; });
  const cd sum = spectral_side(a, t, 1.0).value + spectral_side(b, t, 1.0).value;
  const cd all = spectral_side(whole, t, 1.0).value;
  CHECK(std::abs(sum - all) <= 1e-12 * std::max(1.0, std::abs(all)));
}

TEST_CASE("symmetric sets pair to a real value equal to the doubled half") {
  const auto t = make_phi2(8.5, 61.0);
  const auto set = cylinder_lattice(2.0, 3, 250);
  const auto positive = subset(set, [](const Resonance& r) { return r.lambda.real() > 0.0; });
  const auto axis = subset(set, [](const Resonance& r) { return r.lambda.real() == 0.0; });
  ResonanceSet whole = set;
  whole.lattice.reset();
  const cd all = spectral_side(whole, t, 1.0).value;
  CHECK(std::abs(all.imag()) <= 1e-14);
  const double doubled = 2.0 * spectral_side(positive, t, 1.0).value.real() + spectral_side(axis, t, 1.0).value.real();
  CHECK(all.real() == doctest::Approx(doubled).epsilon(1e-12));
}

TEST_CASE("deep rows are suppressed by e^{-(T-1)} per row") {
  const double T = 8.5;
  const auto t = make_phi2(T, 50.0);
  const auto set = cylinder_lattice(2.0, 4, 400);
  std::vector<double> rows;
  for (int k = 0; k <= 4; ++k) {
    const auto row = subset(set, [k](const Resonance& r) { return std::abs(r.lambda.imag() + (k + 0.5)) < 1e-12; });
    rows.push_back(std::abs(spectral_side(row, t, 1.0).value));
  }
  for (int k = 0; k < 4; ++k) {
    MESSAGE("row " << k << ": " << rows[k]);
    if (rows[k] > 1e-300) CHECK(rows[k + 1] <= std::exp(-(T - 1.0)) * rows[k] * 1.0001);
  }
}

TEST_CASE("calibration picks unit multiplicity against the oriented sum") {
  const auto cal = calibrate_cylinder(2.0, {6.5, 10.5}, {50.0, 100.0});
  REQUIRE(cal.winner.has_value());
  CHECK(cal.winner->rule == MultiplicityRule::Unit);
  CHECK(cal.winner->oriented);
  std::size_t passing = 0;
  for (const auto& c : cal.candidates) passing += c.passes;
  CHECK(passing == 1);
}

TEST_CASE("resonance CSV round trip") {
  auto set = cylinder_lattice(2.0, 1, 2, MultiplicityRule::TwoKPlusOne);
  std::ostringstream out;
  write_resonance_csv(out, set);
  CHECK(out.str().rfind(std::string(kResonanceCsvHeader) + "\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_resonance_csv(in);
  REQUIRE(back.entries.size() == set.entries.size());
  for (std::size_t i = 0; i < set.entries.size(); ++i) {
    CHECK(back.entries[i].lambda == set.entries[i].lambda);
    CHECK(back.entries[i].multiplicity == set.entries[i].multiplicity);
  }
  std::istringstream bad("re,im,multiplicity\n1.0,0.5,1\n");
  CHECK_THROWS(read_resonance_csv(bad));
}
