#include "trappedset/counting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "trappedset/errors.hpp"
#include "trappedset/orbit_csv.hpp"

namespace trappedset {

StripMeasure::StripMeasure(double s, std::vector<double> atoms, std::vector<int> multiplicities)
    : s_(s), atoms_(std::move(atoms)), mult_(std::move(multiplicities)) {
  if (atoms_.size() != mult_.size()) throw DomainError("strip measure: atoms and multiplicities differ in size");
  std::vector<std::size_t> order(atoms_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return atoms_[x] < atoms_[y]; });
  std::vector<double> a;
  std::vector<int> m;
  a.reserve(order.size());
  m.reserve(order.size());
  for (auto i : order) {
    a.push_back(atoms_[i]);
    m.push_back(mult_[i]);
  }
  atoms_ = std::move(a);
  mult_ = std::move(m);
  prefix_.assign(atoms_.size() + 1, 0);
  for (std::size_t i = 0; i < atoms_.size(); ++i) prefix_[i + 1] = prefix_[i] + mult_[i];
}

double StripMeasure::max_abs_atom() const noexcept {
  if (atoms_.empty()) return 0.0;
  return std::max(std::abs(atoms_.front()), std::abs(atoms_.back()));
}

long long StripMeasure::mass(double lo, double hi) const {
  if (hi < lo) return 0;
  const auto first = std::lower_bound(atoms_.begin(), atoms_.end(), lo) - atoms_.begin();
  const auto last = std::upper_bound(atoms_.begin(), atoms_.end(), hi) - atoms_.begin();
  return prefix_[std::size_t(last)] - prefix_[std::size_t(first)];
}

long long StripMeasure::mass_abs(double r_lo, double r_hi) const {
  if (r_hi < r_lo || r_hi < 0.0) return 0;
  if (r_lo <= 0.0) return mass(-r_hi, r_hi);
  return mass(r_lo, r_hi) + mass(-r_hi, -r_lo);
}

StripMeasure strip_measure(const ResonanceSet& set, double s) {
  if (!(s > 0.0)) throw DomainError("strip_measure: depth s must be positive");
  std::vector<double> atoms;
  std::vector<int> mult;
  for (const auto& r : set.entries) {
    const double im = r.lambda.imag();
    if (im <= kRealAxisSlack && im >= -s) {
      atoms.push_back(r.lambda.real());
      mult.push_back(r.multiplicity);
    }
  }
  return StripMeasure(s, std::move(atoms), std::move(mult));
}

long long strip_count(const StripMeasure& measure, double r) {
  if (!(r > 0.0)) throw DomainError("strip_count: r must be positive");
  return measure.mass(-r, r);
}

std::vector<WindowLowerBoundRow> window_lower_bound_check(const StripMeasure& measure,
                                                          std::span<const double> beta_grid, double epsilon,
                                                          double j_plus, double nu, double theta_plus_u) {
  std::vector<WindowLowerBoundRow> rows;
  for (double beta : beta_grid) {
    if (!(beta > 0.0)) throw DomainError("window_lower_bound_check: beta must be positive");
    WindowLowerBoundRow row;
    row.beta = beta;
    row.half_width = std::pow(beta, nu + epsilon * j_plus);
    const double w = row.half_width;
    // the two windows merge once w >= beta
    row.mass = w >= beta ? measure.mass(-beta - w, beta + w) : measure.mass(beta - w, beta + w) +
                                                                   measure.mass(-beta - w, -beta + w);
    row.target = std::pow(beta, epsilon * (j_plus - theta_plus_u));
    row.ratio = double(row.mass) / row.target;
    row.empty = row.mass == 0;
    rows.push_back(row);
  }
  return rows;
}

TauberianResult tauberian_accumulate(const StripMeasure& measure, double delta, double kappa, double c, double r0,
                                     std::size_t grid_points) {
  if (measure.empty()) throw InsufficientDataError("tauberian_accumulate: empty measure");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("tauberian_accumulate: delta must lie in (0, 1)");
  if (kappa + delta < 0.0) throw DomainError("tauberian_accumulate: kappa + delta must be nonnegative");
  if (!(c > 0.0) || !(r0 > 0.0) || grid_points < 2) throw DomainError("tauberian_accumulate: bad c, r0 or grid");
  TauberianResult res;
  // largest r whose window [r, r + r^delta] still lies inside the atoms
  const double top_atom = measure.max_abs_atom();
  double r_top = top_atom;
  for (int it = 0; it < 200; ++it) r_top = top_atom - std::pow(std::max(r_top, 0.0), delta);
  // an r0 beyond the data leaves only the single-point grid at r0
  res.r_grid = r_top > r0 ? log_grid(r0, r_top, grid_points) : std::vector<double>{r0};

  res.hypothesis_held = true;
  for (double r : res.r_grid) {
    const double window = double(measure.mass_abs(r, r + std::pow(r, delta)));
    if (window < c * std::pow(r, kappa + delta)) {
      res.hypothesis_held = false;
      res.first_violation = r;
      break;
    }
  }

  std::vector<double> x;
  std::vector<double> y;
  for (double r : res.r_grid) {
    x.push_back(std::pow(r, 1.0 + kappa));
    y.push_back(double(measure.mass_abs(0.0, r)));
  }
  if (x.size() >= 2) {
    res.c1 = fit_line(x, y).slope;
  } else {
    res.c1 = y[0] / x[0];
  }
  res.c2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) res.c2 = std::max(res.c2, res.c1 * x[i] - y[i]);
  res.conclusion_held = res.c1 > 0.0;
  res.verdict = res.hypothesis_held && res.conclusion_held;
  return res;
}

LowerBoundShapeCheck lower_bound_shape_check(const StripMeasure& measure, std::span<const double> r_grid, double epsilon,
                                   double theta) {
  if (r_grid.size() < 2) throw InsufficientDataError("lower_bound_shape_check: need at least two radii");
  LowerBoundShapeCheck out;
  out.exponent = 1.0 - epsilon * theta;
  const std::size_t half = r_grid.size() / 2;
  out.constant = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < half; ++i)
    out.constant = std::min(out.constant, double(strip_count(measure, r_grid[i])) / std::pow(r_grid[i], out.exponent));
  out.holds = out.constant > 0.0;
  for (std::size_t i = half; i < r_grid.size(); ++i) {
    if (double(strip_count(measure, r_grid[i])) < out.constant * std::pow(r_grid[i], out.exponent)) {
      out.holds = false;
      out.first_violation = r_grid[i];
      break;
    }
  }
  return out;
}

namespace {

std::string_view kind_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::Lattice: return "lattice";
    case EnsembleKind::PowerLaw: return "powerlaw";
    case EnsembleKind::Poisson: return "poisson";
  }
  return "?";
}

}  // namespace

EnsembleDescriptor parse_ensemble(const std::string& text) {
  // kind:parameter[,depth[,extent]]
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("ensemble '" + text + "': expected kind:parameter[,depth[,extent]]");
  EnsembleDescriptor d;
  const std::string kind = text.substr(0, colon);
  if (kind == "lattice")
    d.kind = EnsembleKind::Lattice;
  else if (kind == "powerlaw")
    d.kind = EnsembleKind::PowerLaw;
  else if (kind == "poisson")
    d.kind = EnsembleKind::Poisson;
  else
    throw ConfigError("ensemble kind '" + kind + "' (lattice|powerlaw|poisson)");
  const auto fields = split_csv_line(text.substr(colon + 1));
  if (fields.empty() || fields.size() > 3) throw ConfigError("ensemble '" + text + "': 1 to 3 numbers after ':'");
  d.parameter = parse_real(fields[0], "ensemble parameter");
  if (fields.size() > 1) d.depth = parse_real(fields[1], "ensemble depth");
  if (fields.size() > 2) d.extent = parse_real(fields[2], "ensemble extent");
  return d;
}

std::string ensemble_string(const EnsembleDescriptor& d) {
  return std::string(kind_name(d.kind)) + ":" + format_real(d.parameter) + "," + format_real(d.depth) + "," +
         format_real(d.extent);
}

ResonanceSet synthetic_ensemble(const EnsembleDescriptor& d, std::uint64_t seed) {
  if (!(d.parameter > 0.0) || !(d.depth > 0.0) || !(d.extent > 0.0))
    throw DomainError("synthetic ensemble parameters must be positive");
  constexpr double kMaxAtoms = 5e7;
  ResonanceSet set;
  set.provenance = Provenance::Synthetic;
  set.descriptor = ensemble_string(d) + " seed=" + std::to_string(seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> depth(-d.depth, 0.0);
  switch (d.kind) {
    case EnsembleKind::Lattice: {
      const int rows = int(std::lround(d.depth));
      if (rows < 1 || std::abs(d.depth - rows) > 1e-12) throw DomainError("lattice ensemble: rows must be a positive integer");
      const auto count = std::floor(d.extent / d.parameter + 1e-12);
      if (count * rows > kMaxAtoms) throw ResourceError("lattice ensemble too large");
      for (int k = 0; k < rows; ++k)
        for (double n = 0; n <= count; n += 1.0) set.entries.push_back({{d.parameter * n, -(k + 0.5)}, 1});
      break;
    }
    case EnsembleKind::PowerLaw: {
      const double count = std::floor(std::pow(d.extent, d.parameter));
      if (count > kMaxAtoms) throw ResourceError("power-law ensemble too large");
      for (double j = 1; j <= count; j += 1.0)
        set.entries.push_back({{std::pow(j, 1.0 / d.parameter), depth(rng)}, 1});
      break;
    }
    case EnsembleKind::Poisson: {
      if (d.parameter * d.extent > kMaxAtoms) throw ResourceError("Poisson ensemble too large");
      std::exponential_distribution<double> gap(d.parameter);
      for (double x = gap(rng); x <= d.extent; x += gap(rng)) set.entries.push_back({{x, depth(rng)}, 1});
      break;
    }
  }
  normalize(set);
  return set;
}

}  // namespace trappedset
