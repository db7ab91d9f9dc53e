#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "trappedset/orbit.hpp"

namespace fixture {

/// Complete synthetic spectrum with the given lengths, each a primitive
/// surface-type orbit (unstable exponent = length).
inline trappedset::LengthSpectrum synthetic(const std::vector<double>& lengths, double horizon) {
  using namespace trappedset;
  LengthSpectrum sp;
  sp.horizon = horizon;
  sp.complete = true;
  sp.model_descriptor = "synthetic";
  std::size_t i = 0;
  for (double l : lengths) {
    PeriodicOrbit o;
    // distinct codes: binary spelling of the index
    o.code.model = Model::ThreeDisk;
    std::size_t k = i++;
    o.code.symbols = {0};
    do {
      o.code.symbols.push_back(std::uint8_t(1 + k % 2));
      k /= 2;
    } while (k);
    o.length = o.primitive_length = l;
    o.unstable_exponent = l;
    const auto st = stability_from_exponent(l);
    o.stability_det_abs = st.value;
    o.log_stability_det = st.log_value;
    sp.orbits.push_back(o);
  }
  normalize(sp);
  return sp;
}

}  // namespace fixture
