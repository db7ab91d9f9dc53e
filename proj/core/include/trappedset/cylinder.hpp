#pragma once

#include "trappedset/orbit.hpp"

namespace trappedset {

/// Hyperbolic cylinder with a single primitive closed geodesic.
struct CylinderConfig {
  double core_length = 2.0;
};

/// gamma^m for m * core_length <= horizon; both traversal directions when oriented.
LengthSpectrum enumerate_cylinder(const CylinderConfig& config, double horizon, bool oriented);

}  // namespace trappedset
