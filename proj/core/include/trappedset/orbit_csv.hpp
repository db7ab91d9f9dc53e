#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "trappedset/orbit.hpp"

namespace trappedset {

inline constexpr const char* kOrbitCsvHeader =
    "model,code,length,primitive_length,repetition,unstable_exponent,log_abs_det_one_minus_P";

/// Shortest text that parses back to the same double; '.' separator.
std::string format_real(double x);

/// Comma-separated fields; a trailing comma yields a trailing empty field.
std::vector<std::string> split_csv_line(const std::string& line);

/// Whole-field number parse; ConfigError mentioning `context` otherwise.
double parse_real(const std::string& field, std::string_view context);

void write_orbit_csv(std::ostream& out, const LengthSpectrum& spectrum);

/// Reads rows written by write_orbit_csv. The horizon defaults to the longest
/// orbit; completeness is not recorded in the CSV so the result is incomplete.
LengthSpectrum read_orbit_csv(std::istream& in);

}  // namespace trappedset
