#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trappedset/bump.hpp"
#include "trappedset/trace.hpp"

namespace trappedset {

enum class MultiplicityRule : std::uint8_t { Unit, Two, TwoKPlusOne };

std::string_view rule_name(MultiplicityRule r) noexcept;
MultiplicityRule parse_rule(std::string_view name);
int rule_multiplicity(MultiplicityRule r, int row) noexcept;

struct Resonance {
  std::complex<double> lambda;  ///< Im <= 0
  int multiplicity = 1;
};

/// Tolerance for resonances sitting on the real axis.
inline constexpr double kRealAxisSlack = 1e-12;

enum class Provenance : std::uint8_t { CylinderLattice, Synthetic, File };

/// Box {|n| <= n_max, 0 <= k <= k_max} of the lattice 2 pi n / l0 - i (k + 1/2).
struct LatticeBox {
  double ell0 = 2.0;
  int k_max = 0;
  int n_max = 0;
  MultiplicityRule rule = MultiplicityRule::Unit;
};

struct ResonanceSet {
  std::vector<Resonance> entries;  ///< sorted by (Im desc, Re asc)
  Provenance provenance = Provenance::File;
  std::string descriptor;
  /// Present for lattice sets, so omitted lattice points can be bounded.
  std::optional<LatticeBox> lattice;
};

/// Sorts entries by (Im desc, Re asc) and checks Im <= kRealAxisSlack.
void normalize(ResonanceSet& set);

ResonanceSet cylinder_lattice(double ell0, int k_max, int n_max, MultiplicityRule rule = MultiplicityRule::Unit);

/// |phi_hat(w)| <= C (1 + |w|)^{-K} e^{|Im w|}.
struct PaleyWienerEnvelope {
  int K = 0;
  double C = 0.0;
};

struct PaleyWienerFit {
  std::vector<PaleyWienerEnvelope> envelopes;
  /// majorant[i] >= |phi_hat(w)| e^{-|Im w|} for every sampled w with
  /// |Re w| >= i * step; nonincreasing by construction.
  std::vector<double> majorant;
  double re_max = 0.0;
  double step = 0.0;
  double safety = 1.0;

  /// Envelope E(r) of |phi_hat(w)| e^{-|Im w|} over |Re w| >= r: the tabulated
  /// majorant on the grid, the tightest power law beyond it.
  [[nodiscard]] double envelope(double r) const noexcept;
};

/// Sup of |phi_hat(w)| (1+|w|)^K e^{-|Im w|} over Re w in [0, re_max] on a
/// grid of the given step and Im w in {0, -1/2, -1, -2, -4, -8, -16}, times
/// `safety`, plus the tabulated majorant. Past a few hundred the values sit
/// at the rounding floor, so K <= 6 is the useful range for re_max ~ 1000.
PaleyWienerFit fit_paley_wiener(const BumpFunction& bump, double re_max, double step, const std::vector<int>& Ks,
                                double safety = 1.0);

/// K = 4 and 6 on [0, 1000] with step 1/4 and safety factor 1.1, computed once.
const PaleyWienerFit& default_paley_wiener();

/// Bound on the lattice points outside `box` in the spectral sum for `test`.
double lattice_tail_bound(const LatticeBox& box, const WindowedTest& test, const PaleyWienerFit& fit);

/// Smallest box (k_max first, then n_max) whose tail bound is <= tolerance.
/// TruncationError when it would exceed 10^4 rows or 10^7 columns.
LatticeBox choose_lattice_box(double ell0, MultiplicityRule rule, const WindowedTest& test, double tolerance,
                              const PaleyWienerFit& fit = default_paley_wiener());

/// sum_j m_j sum_{iota = +-1} a phi_hat(a (lambda_j + iota lambda)) e^{-i b (lambda_j + iota lambda)}.
///
/// For lattice sets the tail outside the box must be <= tolerance, else a
/// TruncationError names the box that would suffice; finite sets carry a
/// zero truncation bound. Terms are computed in parallel and reduced in the
/// sorted entry order, so results are bit-stable across thread counts.
TraceEvaluation spectral_side(const ResonanceSet& set, const WindowedTest& test, double tolerance,
                              unsigned threads = 0);

inline constexpr std::string_view kResonanceCsvHeader = "re,im,multiplicity";

void write_resonance_csv(std::ostream& out, const ResonanceSet& set);
ResonanceSet read_resonance_csv(std::istream& in, std::string descriptor = "file");

/// One (multiplicity rule, orientation) pair scored against the cylinder identity.
struct CalibrationCandidate {
  MultiplicityRule rule = MultiplicityRule::Unit;
  bool oriented = false;
  double worst_excess = 0.0;  ///< max over tests of |spectral - Re geometric| - truncation bound
  bool passes = false;        ///< worst_excess <= 1e-6
};

struct CalibrationResult {
  std::vector<CalibrationCandidate> candidates;
  std::optional<CalibrationCandidate> winner;
};

/// Scores every rule/orientation pair on Phi2 tests at the given (T, lambda)
/// points; the winner is the unique passing pair with the smallest excess.
CalibrationResult calibrate_cylinder(double ell0, const std::vector<double>& Ts, const std::vector<double>& lambdas,
                                     double tolerance = 1e-8);

}  // namespace trappedset
