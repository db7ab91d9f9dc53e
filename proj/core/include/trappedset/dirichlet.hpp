#pragma once

#include <cstddef>
#include <span>

namespace trappedset {

struct DirichletOptions {
  /// Search-tree node budget; exceeding it raises ResourceError.
  std::size_t max_nodes = 200'000'000;
};

struct DirichletResult {
  double lambda0 = 0.0;
  double upper = 0.0;      ///< 2^nu * m, the end of the searched interval
  double worst_phase = 0.0;  ///< max_j |lambda0 r_j mod 2pi|
  std::size_t nodes = 0;
};

/// Lowest lambda0 in [m, 2^nu m] with |lambda0 r_j mod 2pi| <= 1/2 for every j.
///
/// The admissible set for each r_j is a union of intervals of half-width
/// 1/(2 r_j) around the multiples of 2 pi / r_j; the search intersects these
/// depth first, longest r_j first, so the first complete leaf is the lowest
/// admissible frequency. Throws DomainError for repeated or non-positive
/// lengths or nu > 24, and InternalError when the interval holds no solution.
DirichletResult dirichlet_box(std::span<const double> lengths, double m, const DirichletOptions& options = {});

/// max_j |lambda r_j mod 2pi| with an exactly rounded product.
double worst_alignment(double lambda, std::span<const double> lengths) noexcept;

}  // namespace trappedset
