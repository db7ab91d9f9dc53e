#include "trappedset/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "trappedset/errors.hpp"
#include "trappedset/numeric.hpp"

namespace trappedset {

double worst_alignment(double lambda, std::span<const double> lengths) noexcept {
  double worst = 0.0;
  for (double r : lengths) worst = std::max(worst, std::abs(phase_mod_2pi(lambda, r)));
  return worst;
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTolerance = 0.5;

class IntervalSearch {
 public:
  IntervalSearch(std::vector<double> lengths, std::size_t budget) : r_(std::move(lengths)), budget_(budget) {}

  std::optional<double> run(double lo, double hi) { return descend(0, lo, hi); }
  [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }

 private:
  std::optional<double> descend(std::size_t level, double lo, double hi) {
    if (level == r_.size()) {
      // leaf: verify with the exact phase; rounding in the interval arithmetic
      // is absorbed by the shrunken half-width, so a failure here is a bug
      if (worst_alignment(lo, r_) <= kTolerance) return lo;
      return std::nullopt;
    }
    const double r = r_[level];
    const double k_lo = std::ceil((lo * r - kTolerance) / kTwoPi);
    const double k_hi = std::floor((hi * r + kTolerance) / kTwoPi);
    for (double k = k_lo; k <= k_hi; k += 1.0) {
      if (++nodes_ > budget_)
        throw ResourceError("dirichlet_box: search exceeded " + std::to_string(budget_) + " nodes");
      // the phase of lambda r near 2 pi k carries ~ulp(2 pi k) rounding, so
      // the admissible half-width is shrunk by a generous multiple of it
      const double slack = 16.0 * std::numeric_limits<double>::epsilon() * (kTwoPi * std::abs(k) + 1.0);
      const double half = kTolerance - slack;
      if (half <= 0.25) throw DomainError("dirichlet_box: frequencies too large for double precision");
      const double a = std::max(lo, (kTwoPi * k - half) / r);
      const double b = std::min(hi, (kTwoPi * k + half) / r);
      if (a > b) continue;
      if (auto hit = descend(level + 1, a, b)) return hit;
    }
    return std::nullopt;
  }

  std::vector<double> r_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
};

}  // namespace

DirichletResult dirichlet_box(std::span<const double> lengths, double m, const DirichletOptions& options) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("dirichlet_box: m must be positive");
  if (lengths.empty()) throw DomainError("dirichlet_box: no lengths");
  if (lengths.size() > 24) throw DomainError("dirichlet_box: more than 24 lengths (search-space guard)");
  std::vector<double> r(lengths.begin(), lengths.end());
  for (double x : r)
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("dirichlet_box: lengths must be positive");
  std::sort(r.begin(), r.end(), std::greater<>());
  if (std::adjacent_find(r.begin(), r.end()) != r.end()) throw DomainError("dirichlet_box: lengths must be distinct");

  DirichletResult result;
  result.upper = std::ldexp(m, int(r.size()));
  IntervalSearch search(r, options.max_nodes);
  const auto hit = search.run(m, result.upper);
  result.nodes = search.nodes();
  if (!hit)
    throw InternalError("dirichlet_box: no admissible frequency in [" + std::to_string(m) + ", " +
                        std::to_string(result.upper) + "] for " + std::to_string(r.size()) + " lengths");
  result.lambda0 = *hit;
  result.worst_phase = worst_alignment(result.lambda0, r);
  return result;
}

}  // namespace trappedset
