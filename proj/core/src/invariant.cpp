#include "trappedset/invariant.hpp"

#include <algorithm>
#include <cmath>

#include "trappedset/errors.hpp"

namespace trappedset {

std::string_view pairing_mode_name(PairingMode m) noexcept {
  return m == PairingMode::GeometricSide ? "geometric" : "spectral";
}

PairingMode parse_pairing_mode(std::string_view name) {
  if (name == "geometric") return PairingMode::GeometricSide;
  if (name == "spectral") return PairingMode::SpectralSide;
  throw ConfigError("unknown pairing mode '" + std::string(name) + "' (geometric|spectral)");
}

std::string_view row_status_name(InvariantRowStatus s) noexcept {
  switch (s) {
    case InvariantRowStatus::Used: return "used";
    case InvariantRowStatus::EmptyWindow: return "empty_window";
    case InvariantRowStatus::DirichletFailed: return "dirichlet_failed";
    case InvariantRowStatus::NonpositivePairing: return "nonpositive_pairing";
    case InvariantRowStatus::PairingFailed: return "pairing_failed";
  }
  return "?";
}

std::size_t InvariantEstimate::used() const noexcept {
  return std::size_t(std::count_if(rows.begin(), rows.end(),
                                   [](const InvariantRow& r) { return r.status == InvariantRowStatus::Used; }));
}

ResonanceProvider cylinder_lattice_provider(double ell0, MultiplicityRule rule, double tolerance) {
  return [=](const WindowedTest& test) {
    const LatticeBox box = choose_lattice_box(ell0, rule, test, tolerance);
    return cylinder_lattice(ell0, box.k_max, box.n_max, rule);
  };
}

double dirichlet_base(double alpha, double T, double lambda_min, double lambda_cap) {
  // compare exponents first so e^{alpha T} never overflows
  const double x = alpha * T;
  if (x >= std::log(lambda_cap)) return lambda_cap;
  return std::clamp(std::exp(x), lambda_min, lambda_cap);
}

std::vector<double> distinct_lengths(const LengthSpectrum& spectrum, double lo, double hi) {
  const auto range = orbits_in(spectrum, lo, hi);
  std::vector<double> out;
  for (std::size_t i = range.first; i < range.last; ++i) {
    const double l = spectrum.orbits[i].length;
    if (out.empty() || l - out.back() > 1e-12 * l) out.push_back(l);
  }
  return out;
}

InvariantEstimate spectral_invariant_estimate(const LengthSpectrum& spectrum, std::span<const double> T_grid,
                                              PairingMode mode, const InvariantOptions& options,
                                              const ResonanceProvider& provider) {
  if (mode == PairingMode::SpectralSide && !provider)
    throw DomainError("spectral_invariant_estimate: spectral mode needs a resonance provider");
  if (!(options.lambda_min > 0.0) || !(options.lambda_cap >= options.lambda_min) || options.alpha < 0.0)
    throw DomainError("spectral_invariant_estimate: need alpha >= 0 and 0 < lambda_min <= lambda_cap");

  InvariantEstimate est;
  est.mode = mode;
  std::vector<double> xs;
  std::vector<double> ys;
  for (double T : T_grid) {
    if (T > spectrum.horizon * (1.0 + 1e-12))
      throw OutOfHorizonError("spectral_invariant_estimate: T = " + std::to_string(T) + " beyond horizon");
    InvariantRow row;
    row.T = T;
    const auto lengths = distinct_lengths(spectrum, T - 1.0, T);
    row.distinct_lengths = lengths.size();
    if (lengths.empty()) {
      row.status = InvariantRowStatus::EmptyWindow;
      est.rows.push_back(std::move(row));
      continue;
    }
    // e^{alpha T} computed in the log domain so large alpha T saturates at the cap
    row.m = dirichlet_base(options.alpha, T, options.lambda_min, options.lambda_cap);
    try {
      row.lambda0 = dirichlet_box(lengths, row.m, options.dirichlet).lambda0;
    } catch (const Error& e) {
      row.status = InvariantRowStatus::DirichletFailed;
      row.note = e.what();
      est.rows.push_back(std::move(row));
      continue;
    }
    const WindowedTest test = make_flambda(row.lambda0, T);
    try {
      if (mode == PairingMode::GeometricSide) {
        const auto ev = geometric_side(spectrum, test);
        row.pairing = ev.real();
      } else {
        const auto ev = spectral_side(provider(test), test, options.spectral_tolerance);
        row.pairing = ev.real();
        row.truncation_bound = ev.truncation_bound;
      }
    } catch (const TruncationError& e) {
      row.status = InvariantRowStatus::PairingFailed;
      row.note = e.what();
      est.rows.push_back(std::move(row));
      continue;
    }
    if (!(row.pairing > 0.0)) {
      row.status = InvariantRowStatus::NonpositivePairing;
    } else {
      xs.push_back(T);
      ys.push_back(std::log(row.pairing));
    }
    est.rows.push_back(std::move(row));
  }
  if (xs.size() < std::max<std::size_t>(options.min_points, 2))
    throw InsufficientDataError("spectral_invariant_estimate: only " + std::to_string(xs.size()) +
                                " usable T values (need " + std::to_string(options.min_points) + ")");
  est.fit = fit_line(xs, ys);
  est.value = est.fit.slope;
  return est;
}

}  // namespace trappedset
