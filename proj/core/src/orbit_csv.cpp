#include "trappedset/orbit_csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "trappedset/errors.hpp"

namespace trappedset {

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  // shortest text that reads back to the same double
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

void write_orbit_csv(std::ostream& out, const LengthSpectrum& spectrum) {
  out << kOrbitCsvHeader << '\n';
  for (const auto& o : spectrum.orbits) {
    out << model_name(o.code.model) << ',' << o.code.str() << ',' << format_real(o.length) << ','
        << format_real(o.primitive_length) << ',' << o.repetition << ',' << format_real(o.unstable_exponent) << ','
        << format_real(o.log_stability_det) << '\n';
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s, std::string_view context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(std::string(context) + ": bad number '" + s + "'");
  return v;
}

namespace {

double to_real(const std::string& s, std::size_t line_no) {
  return parse_real(s, "orbit CSV line " + std::to_string(line_no));
}

}  // namespace

LengthSpectrum read_orbit_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("orbit CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kOrbitCsvHeader) throw ConfigError("orbit CSV: unexpected header '" + line + "'");

  LengthSpectrum spectrum;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw ConfigError("orbit CSV line " + std::to_string(line_no) + ": expected 7 fields");
    PeriodicOrbit o;
    o.code = OrbitCode::parse(parse_model(f[0]), f[1]);
    o.length = to_real(f[2], line_no);
    o.primitive_length = to_real(f[3], line_no);
    o.repetition = int(to_real(f[4], line_no));
    o.unstable_exponent = to_real(f[5], line_no);
    o.log_stability_det = to_real(f[6], line_no);
    o.stability_det_abs = std::exp(o.log_stability_det);
    // log|det| - x = 2 log|1 - sign e^-x|: positive only for inverse-hyperbolic orbits
    o.eigenvalue_sign = o.log_stability_det > o.unstable_exponent ? -1 : 1;
    spectrum.horizon = std::max(spectrum.horizon, o.length);
    spectrum.orbits.push_back(std::move(o));
  }
  normalize(spectrum);
  return spectrum;
}

}  // namespace trappedset
