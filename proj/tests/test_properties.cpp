#include <doctest.h>

#include <cstdlib>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "trappedset/cylinder.hpp"
#include "trappedset/dirichlet.hpp"
#include "trappedset/errors.hpp"
#include "trappedset/numeric.hpp"
#include "trappedset/orbit_csv.hpp"
#include "trappedset/resonance.hpp"
#include "trappedset/schottky.hpp"
#include "trappedset/three_disk.hpp"
#include "trappedset/trace.hpp"
#include "trappedset/words.hpp"

using namespace trappedset;

namespace {

std::string csv(const LengthSpectrum& sp) {
  std::ostringstream out;
  write_orbit_csv(out, sp);
  return out.str();
}

LengthSpectrum truncate(LengthSpectrum sp, double horizon) {
  const auto r = orbits_in(sp, 0.0, horizon);
  sp.orbits.erase(sp.orbits.begin() + static_cast<std::ptrdiff_t>(r.last), sp.orbits.end());
  sp.horizon = horizon;
  return sp;
}

}  // namespace

TEST_CASE("Schottky enumeration is byte-identical across thread counts") {
  const auto g = SchottkyGroup::create(default_schottky_config());
  for (bool oriented : {false, true}) {
    EnumerationOptions serial;
    serial.threads = 1;
    const std::string reference = csv(enumerate_schottky(g, 12.0, oriented, serial));
    for (unsigned t : {2u, 3u, 8u}) {
      EnumerationOptions par;
      par.threads = t;
      CHECK(csv(enumerate_schottky(g, 12.0, oriented, par)) == reference);
    }
  }
}

TEST_CASE("spectral side is bit-identical across thread counts") {
  const auto set = cylinder_lattice(2.0, 6, 2000);
  const auto t = make_phi2(8.5, 500.0);
  const auto serial = spectral_side(set, t, 1e-8, 1);
  for (unsigned threads : {2u, 5u, 16u}) {
    const auto par = spectral_side(set, t, 1e-8, threads);
    CHECK(par.value.real() == serial.value.real());
    CHECK(par.value.imag() == serial.value.imag());
    CHECK(par.truncation_bound == serial.truncation_bound);
  }
}

TEST_CASE("worker count honours the environment") {
  ::setenv("TRAPPEDSET_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  ::setenv("TRAPPEDSET_THREADS", "0", 1);
  CHECK(worker_count() >= 1);
  ::unsetenv("TRAPPEDSET_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("environment thread count does not change results") {
  const auto g = SchottkyGroup::create(default_schottky_config());
  ::setenv("TRAPPEDSET_THREADS", "1", 1);
  const std::string a = csv(enumerate_schottky(g, 11.0, false));
  ::setenv("TRAPPEDSET_THREADS", "7", 1);
  const std::string b = csv(enumerate_schottky(g, 11.0, false));
  ::unsetenv("TRAPPEDSET_THREADS");
  CHECK(a == b);
}

TEST_CASE("spectra are prefix-stable under horizon extension") {
  const auto g = SchottkyGroup::create(default_schottky_config());
  const auto short_sp = enumerate_schottky(g, 9.0, false);
  const auto long_sp = enumerate_schottky(g, 12.0, false);
  CHECK(csv(truncate(long_sp, 9.0)) == csv(short_sp));

  const auto c7 = enumerate_cylinder({2.0}, 7.0, true);
  const auto c20 = enumerate_cylinder({2.0}, 20.0, true);
  CHECK(csv(truncate(c20, 7.0)) == csv(c7));

  const ThreeDiskConfig td;
  const auto d1 = enumerate_three_disk(td, 20.0, 5);
  const auto d2 = enumerate_three_disk(td, 30.0, 5);
  CHECK(csv(truncate(d2, 20.0)) == csv(d1));
}

TEST_CASE("enumerated spectra satisfy their invariants") {
  const auto g = SchottkyGroup::create(default_schottky_config());
  for (bool oriented : {false, true}) {
    CHECK(check_invariants(enumerate_schottky(g, 11.0, oriented)).empty());
    CHECK(check_invariants(enumerate_cylinder({3.0}, 25.0, oriented)).empty());
    CHECK(check_invariants(enumerate_three_disk(ThreeDiskConfig{}, 40.0, 6, oriented)).empty());
  }
}

TEST_CASE("oriented Schottky classes double the unoriented non-symmetric ones") {
  // every unoriented class is one or two oriented classes
  const auto g = SchottkyGroup::create(default_schottky_config());
  const auto u = enumerate_schottky(g, 10.0, false);
  const auto o = enumerate_schottky(g, 10.0, true);
  CHECK(o.orbits.size() >= u.orbits.size());
  CHECK(o.orbits.size() <= 2 * u.orbits.size());
}

TEST_CASE("class representatives agree with the brute-force oracle up to 6 letters") {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (bool oriented : {false, true}) {
      CHECK(conjugacy_class_representatives(n, oriented, false).size() == oracle::conjugacy_classes(n, oriented, false));
      CHECK(conjugacy_class_representatives(n, oriented, true).size() == oracle::conjugacy_classes(n, oriented, true));
    }
  }
}

TEST_CASE("Dirichlet box postcondition on random sets") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> len(1.0, 20.0);
  std::uniform_int_distribution<int> size(1, 5);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> lengths(static_cast<std::size_t>(size(rng)));
    for (auto& l : lengths) l = len(rng);
    // the box [m, 2^nu m] can hold no admissible point; whatever is returned must qualify
    try {
      const auto r = dirichlet_box(lengths, 10.0);
      CHECK(r.lambda0 >= 10.0);
      CHECK(r.lambda0 <= r.upper);
      for (double l : lengths) CHECK(oracle::dist_to_2pi_multiple(r.lambda0, l) <= 0.5 + 1e-12);
    } catch (const InternalError&) {
    }
  }
}

TEST_CASE("phase reduction stays accurate for large products") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(1.0, 1e12);
  std::uniform_real_distribution<double> t(1.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    const double l = lam(rng);
    const double x = t(rng);
    const oracle::Big p = oracle::Big(l) * oracle::Big(x);
    const oracle::Big twopi = 2 * boost::math::constants::pi<oracle::Big>();
    oracle::Big r = p - twopi * round(p / twopi);
    CHECK(std::abs(phase_mod_2pi(l, x) - static_cast<double>(r)) <= 1e-12);
  }
}
