#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "trappedset/bump.hpp"
#include "trappedset/dirichlet.hpp"
#include "trappedset/resonance.hpp"
#include "trappedset/schottky.hpp"
#include "trappedset/trace.hpp"

using namespace trappedset;

static void BM_SchottkyEnumeration(benchmark::State& state) {
  const auto group = SchottkyGroup::create(default_schottky_config());
  EnumerationOptions opts;
  opts.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    auto sp = enumerate_schottky(group, double(state.range(0)), false, opts);
    benchmark::DoNotOptimize(sp.orbits.data());
    state.counters["orbits"] = double(sp.orbits.size());
  }
}
BENCHMARK(BM_SchottkyEnumeration)->Args({10, 1})->Args({14, 1})->Args({14, 4})->Unit(benchmark::kMillisecond);

static void BM_PhiHat(benchmark::State& state) {
  const BumpFunction phi;
  const std::complex<double> z(double(state.range(0)), -2.0);
  for (auto _ : state) benchmark::DoNotOptimize(phi_hat(phi, z));
}
BENCHMARK(BM_PhiHat)->Arg(1)->Arg(100)->Arg(1000);

static void BM_SpectralSide(benchmark::State& state) {
  const auto test = make_phi2(8.5, double(state.range(0)));
  const auto box = choose_lattice_box(2.0, MultiplicityRule::Unit, test, 1e-8);
  const auto set = cylinder_lattice(2.0, box.k_max, box.n_max);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_side(set, test, 1e-8));
  state.counters["resonances"] = double(set.entries.size());
}
BENCHMARK(BM_SpectralSide)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Dirichlet(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> len(1.0, 20.0);
  std::vector<double> lengths(static_cast<std::size_t>(state.range(0)));
  for (auto& l : lengths) l = len(rng);
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(dirichlet_box(lengths, std::exp(8.0)).lambda0);
    } catch (const std::exception&) {
    }
  }
}
BENCHMARK(BM_Dirichlet)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
