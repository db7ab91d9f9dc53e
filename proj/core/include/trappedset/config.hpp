#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "trappedset/cylinder.hpp"
#include "trappedset/orbit.hpp"
#include "trappedset/schottky.hpp"
#include "trappedset/three_disk.hpp"

namespace trappedset {

/// Largest accepted enumeration horizon.
inline constexpr double kHorizonCap = 64.0;
/// Largest accepted epsilon (error text quotes it as 0.2); downstream exponents
/// assume eps J+ well below 1/2.
inline constexpr double kEpsilonCap = 0.2;

struct EnumerationConfig {
  Model model = Model::Cylinder;
  double horizon = 12.0;
  bool oriented = false;
  std::size_t max_symbol_length = 8;
  std::size_t orbit_cap = 10'000'000;
};

struct EstimatorConfig {
  double epsilon = 0.1;
  double nu = 0.1;
  double c0 = 1.0;
  double width = 0.5;
  double alpha = 2.0;
  double lambda_min = 10.0;
  double tolerance = 1e-8;
};

/// Parsed run configuration. Schottky generators are range-checked here but
/// the ping-pong validation is left to the caller, which reports it.
struct RunConfig {
  CylinderConfig cylinder;
  SchottkyConfig schottky = default_schottky_config();
  ThreeDiskConfig three_disk;
  EnumerationConfig enumeration;
  EstimatorConfig estimators;
};

/// INI-style key = value text with [cylinder], [schottky], [three_disk],
/// [enumeration] and [estimators] sections; whole-line comments start with
/// '#' or ';'.
/// Unknown sections or keys and out-of-range values raise ConfigError naming
/// the offending key. Missing keys keep their defaults.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Sets one "section.key" with the same checks as the file parser.
void apply_config_key(RunConfig& config, const std::string& key, const std::string& value);

/// Canonical text of every key, in schema order; parse_config reads it back.
std::string config_text(const RunConfig& config);

/// Short descriptor of the selected model and its parameters.
std::string model_descriptor(const RunConfig& config);

}  // namespace trappedset
