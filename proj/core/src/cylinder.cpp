#include "trappedset/cylinder.hpp"

#include <cmath>

#include "trappedset/errors.hpp"
#include "trappedset/orbit_csv.hpp"

namespace trappedset {

LengthSpectrum enumerate_cylinder(const CylinderConfig& config, double horizon, bool oriented) {
  if (!(config.core_length > 0.0) || !std::isfinite(config.core_length))
    throw ConfigError("cylinder: core_length must be positive");
  if (!(horizon > 0.0)) throw DomainError("cylinder: horizon must be positive");

  LengthSpectrum spectrum;
  spectrum.horizon = horizon;
  spectrum.oriented = oriented;
  spectrum.complete = true;
  spectrum.model_descriptor = "cylinder core_length=" + format_real(config.core_length);

  for (std::uint8_t direction = 0; direction < (oriented ? 2 : 1); ++direction) {
    PeriodicOrbit prime;
    prime.code = {Model::Cylinder, {direction}};
    prime.length = prime.primitive_length = config.core_length;
    prime.unstable_exponent = config.core_length;
    const Stability st = surface_stability_from_length(config.core_length);
    prime.stability_det_abs = st.value;
    prime.log_stability_det = st.log_value;
    for (auto& o : expand_repetitions(prime, horizon)) spectrum.orbits.push_back(std::move(o));
  }
  normalize(spectrum);
  return spectrum;
}

}  // namespace trappedset
