#include "trappedset/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>

#include "trappedset/cylinder.hpp"
#include "trappedset/errors.hpp"
#include "trappedset/numeric.hpp"
#include "trappedset/orbit_csv.hpp"

namespace trappedset {

std::string_view rule_name(MultiplicityRule r) noexcept {
  switch (r) {
    case MultiplicityRule::Unit: return "unit";
    case MultiplicityRule::Two: return "two";
    case MultiplicityRule::TwoKPlusOne: return "2k+1";
  }
  return "?";
}

MultiplicityRule parse_rule(std::string_view name) {
  if (name == "unit") return MultiplicityRule::Unit;
  if (name == "two") return MultiplicityRule::Two;
  if (name == "2k+1") return MultiplicityRule::TwoKPlusOne;
  throw ConfigError("unknown multiplicity rule '" + std::string(name) + "' (unit|two|2k+1)");
}

int rule_multiplicity(MultiplicityRule r, int row) noexcept {
  switch (r) {
    case MultiplicityRule::Unit: return 1;
    case MultiplicityRule::Two: return 2;
    case MultiplicityRule::TwoKPlusOne: return 2 * row + 1;
  }
  return 1;
}

void normalize(ResonanceSet& set) {
  for (const auto& r : set.entries) {
    if (!(r.lambda.imag() <= kRealAxisSlack) || !std::isfinite(r.lambda.real()))
      throw DomainError("resonance above the real axis: Im = " + format_real(r.lambda.imag()));
    if (r.multiplicity < 1) throw DomainError("resonance multiplicity must be positive");
  }
  std::sort(set.entries.begin(), set.entries.end(), [](const Resonance& x, const Resonance& y) {
    if (x.lambda.imag() != y.lambda.imag()) return x.lambda.imag() > y.lambda.imag();
    return x.lambda.real() < y.lambda.real();
  });
}

ResonanceSet cylinder_lattice(double ell0, int k_max, int n_max, MultiplicityRule rule) {
  if (!(ell0 > 0.0)) throw DomainError("cylinder_lattice: l0 must be positive");
  if (k_max < 0 || n_max < 0) throw DomainError("cylinder_lattice: box sizes must be nonnegative");
  ResonanceSet set;
  set.provenance = Provenance::CylinderLattice;
  set.lattice = LatticeBox{ell0, k_max, n_max, rule};
  set.descriptor = "cylinder_lattice l0=" + format_real(ell0) + " k_max=" + std::to_string(k_max) +
                   " n_max=" + std::to_string(n_max) + " rule=" + std::string(rule_name(rule));
  const double spacing = 2.0 * std::numbers::pi / ell0;
  set.entries.reserve(std::size_t(k_max + 1) * std::size_t(2 * n_max + 1));
  for (int k = 0; k <= k_max; ++k)
    for (int n = -n_max; n <= n_max; ++n)
      set.entries.push_back({{spacing * n, -(k + 0.5)}, rule_multiplicity(rule, k)});
  normalize(set);
  return set;
}

PaleyWienerFit fit_paley_wiener(const BumpFunction& bump, double re_max, double step, const std::vector<int>& Ks,
                                double safety) {
  if (!(re_max > 0.0) || !(step > 0.0) || Ks.empty()) throw DomainError("fit_paley_wiener: bad grid");
  for (int K : Ks)
    if (K < 2) throw DomainError("fit_paley_wiener: K must be at least 2");
  PaleyWienerFit fit;
  fit.re_max = re_max;
  fit.step = step;
  fit.safety = safety;
  for (int K : Ks) fit.envelopes.push_back({K, 0.0});
  const auto points = std::size_t(std::floor(re_max / step)) + 1;
  fit.majorant.assign(points, 0.0);
  for (double y : {0.0, -0.5, -1.0, -2.0, -4.0, -8.0, -16.0})
    for (std::size_t i = 0; i < points; ++i) {
      const std::complex<double> w{step * double(i), y};
      const double scaled = std::abs(phi_hat(bump, w)) * std::exp(-std::abs(y));
      fit.majorant[i] = std::max(fit.majorant[i], scaled);
      const double r = 1.0 + std::abs(w);
      for (auto& e : fit.envelopes) e.C = std::max(e.C, scaled * std::pow(r, e.K));
    }
  for (auto& e : fit.envelopes) e.C *= safety;
  // running maximum from the right makes the table a monotone majorant
  for (std::size_t i = points; i-- > 0;) {
    fit.majorant[i] *= safety;
    if (i + 1 < points) fit.majorant[i] = std::max(fit.majorant[i], fit.majorant[i + 1]);
  }
  return fit;
}

double PaleyWienerFit::envelope(double r) const noexcept {
  r = std::abs(r);
  double power = std::numeric_limits<double>::infinity();
  for (const auto& e : envelopes) power = std::min(power, e.C * std::pow(1.0 + r, -e.K));
  if (r <= re_max && !majorant.empty()) {
    const auto i = std::min(majorant.size() - 1, std::size_t(std::floor(r / step)));
    return std::min(power, majorant[i]);
  }
  return power;
}

const PaleyWienerFit& default_paley_wiener() {
  static const PaleyWienerFit fit = fit_paley_wiener(BumpFunction{}, 1000.0, 0.25, {4, 6}, 1.1);
  return fit;
}

namespace {

// sum_{k > k_max} m_k e^{-gap (k + 1/2)}
double row_tail(MultiplicityRule rule, int k_max, double gap) {
  double sum = 0.0;
  for (int k = k_max + 1; k < k_max + 100000; ++k) {
    const double term = rule_multiplicity(rule, k) * std::exp(-gap * (k + 0.5));
    sum += term;
    if (term < 1e-18 * sum || term == 0.0) break;
  }
  return sum;
}

// sum_{j >= 0} E(a (d0 + spacing j)) for d0 >= 0: term by term on the
// tabulated range, then the integral test on the power-law tail
double column_tail(const PaleyWienerFit& fit, double a, double spacing, double d0) {
  double sum = 0.0;
  double d = d0;
  for (; a * d <= fit.re_max; d += spacing) sum += fit.envelope(a * d);
  double tail = std::numeric_limits<double>::infinity();
  for (const auto& e : fit.envelopes) {
    const double first = 1.0 + a * d;
    tail = std::min(tail, e.C * (std::pow(first, -e.K) + std::pow(first, 1 - e.K) / (a * spacing * (e.K - 1))));
  }
  return sum + tail;
}

}  // namespace

double lattice_tail_bound(const LatticeBox& box, const WindowedTest& test, const PaleyWienerFit& fit) {
  const double a = test.a;
  const double gap = test.b - test.a;  // |e^{-ib z}| e^{|Im a z|} = e^{-(b - a)(k + 1/2)} on row k
  if (!(gap > 0.0)) throw DomainError("lattice tail bound needs b > a (test centred past its half-width)");
  const double spacing = 2.0 * std::numbers::pi / box.ell0;
  const double lambda = std::abs(test.lambda);
  // any full row: at most two lattice points per spacing-wide distance band
  const double all_columns = 2.0 * column_tail(fit, a, spacing, 0.0);
  const double rows_out = 2.0 * row_tail(box.rule, box.k_max, gap) * all_columns;
  double rows_in = 0.0;
  for (int k = 0; k <= box.k_max; ++k) rows_in += rule_multiplicity(box.rule, k) * std::exp(-gap * (k + 0.5));
  // |n| > n_max: the four (side, iota) combinations start at distance
  // spacing (n_max + 1) + lambda (twice) and spacing (n_max + 1) - lambda (twice)
  const double outer = spacing * (box.n_max + 1);
  double cols = 0.0;
  for (double shift : {lambda, -lambda}) {
    const double d0 = outer + shift;
    cols += d0 >= 0.0 ? column_tail(fit, a, spacing, d0) : all_columns;
  }
  return a * (rows_out + rows_in * 2.0 * cols);
}

LatticeBox choose_lattice_box(double ell0, MultiplicityRule rule, const WindowedTest& test, double tolerance,
                              const PaleyWienerFit& fit) {
  if (!(tolerance > 0.0)) throw DomainError("choose_lattice_box: tolerance must be positive");
  constexpr int kMaxRows = 10000;
  constexpr int kMaxColumns = 10'000'000;
  LatticeBox box{ell0, 0, 0, rule};
  // rows first with an unbounded column range, then the narrowest columns
  box.n_max = kMaxColumns;
  while (lattice_tail_bound(box, test, fit) > 0.5 * tolerance) {
    if (++box.k_max > kMaxRows)
      throw TruncationError("tail bound " + format_real(tolerance) + " needs more than " +
                            std::to_string(kMaxRows) + " rows");
  }
  auto ok = [&](int n) {
    LatticeBox b = box;
    b.n_max = n;
    return lattice_tail_bound(b, test, fit) <= tolerance;
  };
  if (!ok(kMaxColumns))
    throw TruncationError("tail bound " + format_real(tolerance) + " needs n_max > " + std::to_string(kMaxColumns) +
                          " with k_max = " + std::to_string(box.k_max));
  int lo = 0;
  int hi = 1;
  while (!ok(hi)) {
    lo = hi;
    hi = std::min(kMaxColumns, hi * 2);
  }
  if (ok(lo)) hi = lo;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  box.n_max = hi;
  return box;
}

TraceEvaluation spectral_side(const ResonanceSet& set, const WindowedTest& test, double tolerance,
                              unsigned threads) {
  TraceEvaluation ev;
  if (set.lattice) {
    ev.truncation_bound = lattice_tail_bound(*set.lattice, test, default_paley_wiener());
    if (ev.truncation_bound > tolerance) {
      const LatticeBox need =
          choose_lattice_box(set.lattice->ell0, set.lattice->rule, test, tolerance, default_paley_wiener());
      throw TruncationError("spectral_side: tail bound " + format_real(ev.truncation_bound) + " exceeds tolerance " +
                            format_real(tolerance) + "; need k_max >= " + std::to_string(need.k_max) +
                            ", n_max >= " + std::to_string(need.n_max));
    }
  }
  const BumpFunction bump;
  const std::size_t n = set.entries.size();
  std::vector<std::complex<double>> terms(n);
  auto term = [&](const Resonance& r) {
    std::complex<double> acc;
    for (double iota : {1.0, -1.0}) {
      const std::complex<double> z = r.lambda + iota * test.lambda;
      // e^{-i b z} = e^{b Im z} e^{-i b Re z}
      const std::complex<double> shift = std::polar(std::exp(test.b * z.imag()), -phase_mod_2pi(test.b, z.real()));
      acc += test.a * phi_hat(bump, test.a * z) * shift;
    }
    return double(r.multiplicity) * acc;
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads ? threads : worker_count(), unsigned(n / 64 + 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) terms[i] = term(set.entries[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto worker = [&] {
      try {
        for (;;) {
          const std::size_t start = next.fetch_add(64);
          if (start >= n) return;
          for (std::size_t i = start; i < std::min(n, start + 64); ++i) terms[i] = term(set.entries[i]);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(n);
      }
    };
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
  }
  ComplexCompensatedSum sum;
  CompensatedSum abs_sum;
  for (const auto& t : terms) {
    sum.add(t);
    abs_sum.add(std::abs(t));
  }
  ev.value = sum.value();
  ev.amplitude_sum = abs_sum.value();
  ev.contributing_orbits = n;
  return ev;
}

void write_resonance_csv(std::ostream& out, const ResonanceSet& set) {
  out << kResonanceCsvHeader << '\n';
  for (const auto& r : set.entries)
    out << format_real(r.lambda.real()) << ',' << format_real(r.lambda.imag()) << ',' << r.multiplicity << '\n';
}

ResonanceSet read_resonance_csv(std::istream& in, std::string descriptor) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("resonance CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResonanceCsvHeader) throw ConfigError("resonance CSV: unexpected header '" + line + "'");
  ResonanceSet set;
  set.provenance = Provenance::File;
  set.descriptor = std::move(descriptor);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    const std::string ctx = "resonance CSV line " + std::to_string(line_no);
    if (f.size() != 3) throw ConfigError(ctx + ": expected 3 fields");
    const double mult = parse_real(f[2], ctx);
    if (mult != std::floor(mult) || mult < 1) throw ConfigError(ctx + ": multiplicity must be a positive integer");
    set.entries.push_back({{parse_real(f[0], ctx), parse_real(f[1], ctx)}, int(mult)});
  }
  normalize(set);
  return set;
}

CalibrationResult calibrate_cylinder(double ell0, const std::vector<double>& Ts, const std::vector<double>& lambdas,
                                     double tolerance) {
  if (Ts.empty() || lambdas.empty()) throw DomainError("calibrate_cylinder: empty test grid");
  const double horizon = *std::max_element(Ts.begin(), Ts.end());
  const LengthSpectrum unoriented = enumerate_cylinder({ell0}, horizon, false);
  const LengthSpectrum oriented = enumerate_cylinder({ell0}, horizon, true);
  CalibrationResult result;
  for (auto rule : {MultiplicityRule::Unit, MultiplicityRule::Two, MultiplicityRule::TwoKPlusOne}) {
    CalibrationCandidate per_orientation[2] = {{rule, false, 0.0, false}, {rule, true, 0.0, false}};
    for (double T : Ts)
      for (double lambda : lambdas) {
        const WindowedTest test = make_phi2(T, lambda);
        const LatticeBox box = choose_lattice_box(ell0, rule, test, tolerance);
        const ResonanceSet set = cylinder_lattice(ell0, box.k_max, box.n_max, rule);
        const TraceEvaluation spectral = spectral_side(set, test, tolerance);
        for (auto& cand : per_orientation) {
          const TraceEvaluation geo = geometric_side(cand.oriented ? oriented : unoriented, test);
          const double excess = std::abs(spectral.value - std::complex<double>(geo.real(), 0.0)) - spectral.truncation_bound;
          cand.worst_excess = std::max(cand.worst_excess, excess);
        }
      }
    for (auto& cand : per_orientation) {
      cand.passes = cand.worst_excess <= 1e-6;
      result.candidates.push_back(cand);
    }
  }
  for (const auto& c : result.candidates)
    if (c.passes && (!result.winner || c.worst_excess < result.winner->worst_excess)) result.winner = c;
  return result;
}

}  // namespace trappedset
