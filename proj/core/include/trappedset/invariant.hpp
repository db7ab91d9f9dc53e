#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trappedset/dirichlet.hpp"
#include "trappedset/numeric.hpp"
#include "trappedset/orbit.hpp"
#include "trappedset/resonance.hpp"
#include "trappedset/trace.hpp"

namespace trappedset {

enum class PairingMode : std::uint8_t { GeometricSide, SpectralSide };

std::string_view pairing_mode_name(PairingMode m) noexcept;
PairingMode parse_pairing_mode(std::string_view name);  ///< "geometric" | "spectral"

/// Supplies the resonances paired against a given f_{lambda,T}.
using ResonanceProvider = std::function<ResonanceSet(const WindowedTest&)>;

/// Exact cylinder lattice sized by choose_lattice_box for each test.
ResonanceProvider cylinder_lattice_provider(double ell0, MultiplicityRule rule, double tolerance);

struct InvariantOptions {
  /// Dirichlet base m = min(max(e^{alpha T}, lambda_min), lambda_cap).
  double alpha = 2.0;
  double lambda_min = 10.0;
  /// Keeps lambda0 * T well inside the range where phases stay exact.
  double lambda_cap = 1099511627776.0;  // 2^40
  DirichletOptions dirichlet;
  double spectral_tolerance = 1e-9;
  std::size_t min_points = 5;
};

enum class InvariantRowStatus : std::uint8_t { Used, EmptyWindow, DirichletFailed, NonpositivePairing, PairingFailed };
std::string_view row_status_name(InvariantRowStatus s) noexcept;

struct InvariantRow {
  double T = 0.0;
  std::size_t distinct_lengths = 0;
  double m = 0.0;
  double lambda0 = 0.0;
  double pairing = 0.0;
  double truncation_bound = 0.0;
  InvariantRowStatus status = InvariantRowStatus::Used;
  std::string note;
};

struct InvariantEstimate {
  double value = 0.0;  ///< fitted slope of log pairing against T
  PairingMode mode = PairingMode::GeometricSide;
  LinearFit fit;
  std::vector<InvariantRow> rows;
  [[nodiscard]] std::size_t used() const noexcept;
};

/// For each T: the distinct lengths in [T - 1, T] select lambda0 through the
/// Dirichlet box, the cosine pairing with f_{lambda0,T} is evaluated on the
/// requested side, and log(pairing) is regressed on T. Rows that cannot be
/// used are kept with their status; fewer than min_points usable rows raise
/// InsufficientDataError. SpectralSide needs a provider.
InvariantEstimate spectral_invariant_estimate(const LengthSpectrum& spectrum, std::span<const double> T_grid,
                                              PairingMode mode, const InvariantOptions& options = {},
                                              const ResonanceProvider& provider = {});

/// min(max(e^{alpha T}, lambda_min), lambda_cap) without overflow.
double dirichlet_base(double alpha, double T, double lambda_min, double lambda_cap);

/// Distinct lengths in [lo, hi], ties merged at 1e-12 relative.
std::vector<double> distinct_lengths(const LengthSpectrum& spectrum, double lo, double hi);

}  // namespace trappedset
