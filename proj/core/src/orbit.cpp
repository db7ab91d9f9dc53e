#include "trappedset/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "trappedset/errors.hpp"

namespace trappedset {

std::string_view model_name(Model m) noexcept {
  switch (m) {
    case Model::Cylinder:
      return "cylinder";
    case Model::Schottky:
      return "schottky";
    case Model::ThreeDisk:
      return "three_disk";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "cylinder") return Model::Cylinder;
  if (name == "schottky") return Model::Schottky;
  if (name == "three_disk" || name == "three-disk") return Model::ThreeDisk;
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

namespace {
constexpr std::string_view kSchottkyLetters = "AaBb";
constexpr std::string_view kCylinderLetters = "+-";
}  // namespace

std::string OrbitCode::str() const {
  std::string out;
  out.reserve(symbols.size());
  for (auto s : symbols) {
    switch (model) {
      case Model::Cylinder:
        out.push_back(kCylinderLetters.at(s));
        break;
      case Model::Schottky:
        out.push_back(kSchottkyLetters.at(s));
        break;
      case Model::ThreeDisk:
        out.push_back(char('1' + s));
        break;
    }
  }
  return out;
}

OrbitCode OrbitCode::parse(Model model, std::string_view text) {
  OrbitCode code{model, {}};
  code.symbols.reserve(text.size());
  for (char c : text) {
    std::size_t idx = std::string_view::npos;
    switch (model) {
      case Model::Cylinder:
        idx = kCylinderLetters.find(c);
        break;
      case Model::Schottky:
        idx = kSchottkyLetters.find(c);
        break;
      case Model::ThreeDisk:
        if (c >= '1' && c <= '3') idx = std::size_t(c - '1');
        break;
    }
    if (idx == std::string_view::npos)
      throw ConfigError("invalid symbol '" + std::string(1, c) + "' in " + std::string(model_name(model)) +
                        " orbit code '" + std::string(text) + "'");
    code.symbols.push_back(std::uint8_t(idx));
  }
  return code;
}

Stability stability_from_exponent(double unstable_exponent, int eigenvalue_sign) {
  if (!std::isfinite(unstable_exponent) || unstable_exponent <= 0.0)
    throw DomainError("stability: unstable exponent must be finite and positive");
  const double x = unstable_exponent;
  Stability s;
  if (eigenvalue_sign >= 0) {
    // e^x (1 - e^-x)^2; -expm1(-x) keeps the small-x limit x^2 accurate
    const double f = -std::expm1(-x);
    s.log_value = x + 2.0 * std::log(f);
    s.value = std::exp(x) * f * f;
  } else {
    const double f = 1.0 + std::exp(-x);
    s.log_value = x + 2.0 * std::log1p(std::exp(-x));
    s.value = std::exp(x) * f * f;
  }
  s.overflow = !std::isfinite(s.value);
  if (s.overflow) s.value = std::numeric_limits<double>::infinity();
  return s;
}

Stability surface_stability_from_length(double length) {
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("surface stability: length must be positive and finite");
  return stability_from_exponent(length, 1);
}

double amplitude(const PeriodicOrbit& orbit) {
  if (!std::isfinite(orbit.primitive_length) || !std::isfinite(orbit.log_stability_det) ||
      std::isnan(orbit.stability_det_abs))
    throw DomainError("amplitude: non-finite orbit fields for " + orbit.code.str());
  if (!(orbit.stability_det_abs > 0.0)) throw DomainError("amplitude: |det(1-P)| must be positive");
  if (!std::isinf(orbit.stability_det_abs)) return orbit.primitive_length / std::sqrt(orbit.stability_det_abs);
  return orbit.primitive_length * std::exp(-0.5 * orbit.log_stability_det);
}

std::vector<PeriodicOrbit> expand_repetitions(const PeriodicOrbit& primitive, double horizon) {
  if (primitive.repetition != 1) throw DomainError("expand_repetitions: orbit is not primitive");
  std::vector<PeriodicOrbit> out;
  for (int m = 1; double(m) * primitive.primitive_length <= horizon_cut(horizon); ++m) {
    PeriodicOrbit o;
    o.code.model = primitive.code.model;
    for (int i = 0; i < m; ++i)
      o.code.symbols.insert(o.code.symbols.end(), primitive.code.symbols.begin(), primitive.code.symbols.end());
    o.primitive_length = primitive.primitive_length;
    o.length = double(m) * primitive.primitive_length;
    o.repetition = m;
    o.unstable_exponent = double(m) * primitive.unstable_exponent;
    o.eigenvalue_sign = (primitive.eigenvalue_sign < 0 && m % 2 == 1) ? -1 : 1;
    const Stability st = stability_from_exponent(o.unstable_exponent, o.eigenvalue_sign);
    o.stability_det_abs = st.value;
    o.log_stability_det = st.log_value;
    out.push_back(std::move(o));
  }
  return out;
}

void normalize(LengthSpectrum& spectrum) {
  auto& v = spectrum.orbits;
  std::sort(v.begin(), v.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.code < b.code;
  });
  std::set<OrbitCode> seen;
  std::erase_if(v, [&](const PeriodicOrbit& o) { return !seen.insert(o.code).second; });
}

OrbitRange orbits_in(const LengthSpectrum& spectrum, double lo, double hi) {
  const auto& v = spectrum.orbits;
  // Closed window with a relative allowance: lengths such as 2k for a power of
  // a funnel generator sit on grid edges and must not flip sides on the last bit.
  lo -= kWindowEdgeTolerance * std::max(1.0, std::abs(lo));
  hi += kWindowEdgeTolerance * std::max(1.0, std::abs(hi));
  auto first = std::lower_bound(v.begin(), v.end(), lo,
                                [](const PeriodicOrbit& o, double x) { return o.length < x; });
  auto last = std::upper_bound(first, v.end(), hi,
                               [](double x, const PeriodicOrbit& o) { return x < o.length; });
  return {std::size_t(first - v.begin()), std::size_t(last - v.begin())};
}

std::string check_invariants(const LengthSpectrum& spectrum) {
  std::ostringstream err;
  std::set<OrbitCode> codes;
  const auto& v = spectrum.orbits;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& o = v[i];
    if (i > 0 && v[i - 1].length > o.length) err << "unsorted at " << i << "; ";
    if (!codes.insert(o.code).second) err << "duplicate code " << o.code.str() << "; ";
    if (std::abs(o.length - o.repetition * o.primitive_length) > 1e-12 * o.length)
      err << "length != repetition * primitive_length for " << o.code.str() << "; ";
    if (o.length > horizon_cut(spectrum.horizon)) err << "orbit beyond horizon " << o.code.str() << "; ";
  }
  if (spectrum.complete) {
    for (const auto& o : v) {
      if (o.repetition != 1) continue;
      for (int m = 2; m * o.primitive_length <= spectrum.horizon * (1.0 - 1e-12); ++m) {
        OrbitCode c{o.code.model, {}};
        for (int k = 0; k < m; ++k) c.symbols.insert(c.symbols.end(), o.code.symbols.begin(), o.code.symbols.end());
        if (!codes.count(c)) {
          // canonical forms of powers coincide with powers of canonical forms,
          // so a missing entry is a genuine gap
          err << "missing repetition " << m << " of " << o.code.str() << "; ";
          break;
        }
      }
    }
  }
  return err.str();
}

}  // namespace trappedset
