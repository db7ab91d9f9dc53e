#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "trappedset/mat2.hpp"
#include "trappedset/orbit.hpp"
#include "trappedset/words.hpp"

namespace trappedset {

struct SchottkyConfig {
  Mat2 generator_a;
  Mat2 generator_b;
};

/// A = diag(e^{l/2}, e^{-l/2}) and B = C A C^-1 with C = [[2, 1], [1, 1]], so
/// both funnel geodesics have length l and B's axis runs from 1 to 2.
SchottkyConfig default_schottky_config(double funnel_length = 2.0);

/// Isometric circle |cz + d| = 1: center -d/c, radius 1/|c|.
struct IsometricDisk {
  double center = 0.0;
  double radius = 0.0;
};

/// Euclidean gap between two closed disks on the real axis (negative on overlap).
double isometric_gap(const IsometricDisk& x, const IsometricDisk& y) noexcept;

struct DiskGap {
  int first = 0;
  int second = 0;
  double gap = 0.0;
};

struct SchottkyReport {
  bool accepted = false;
  std::string message;
  /// Real point sent to infinity by the conjugation used; NaN for none.
  double conjugation_pole = 0.0;
  Mat2 conjugator;
  /// Disks of A, A^-1, B, B^-1 in the conjugated frame.
  std::array<IsometricDisk, 4> disks{};
  std::vector<DiskGap> gaps;
  double min_gap = 0.0;
  /// pair_bound[i][j]: lower bound on the length contributed by letter i when
  /// followed by letter j in a cyclically reduced word (unused when j = i^-1).
  std::array<std::array<double, 4>, 4> pair_bound{};
  double min_pair_bound = 0.0;
  /// Smallest expansion constant: every letter adds at least 2 log(sigma_minus).
  double sigma_minus = 0.0;

  [[nodiscard]] std::string str() const;
};

/// Ping-pong check on isometric circles, after conjugating so that no
/// generator fixes infinity. Never throws for well-formed matrices.
SchottkyReport validate_schottky(const SchottkyConfig& config);

/// A configuration that passed validate_schottky.
class SchottkyGroup {
 public:
  /// Throws ConfigError carrying the rejection report.
  static SchottkyGroup create(const SchottkyConfig& config);

  [[nodiscard]] const SchottkyConfig& config() const noexcept { return config_; }
  [[nodiscard]] const SchottkyReport& report() const noexcept { return report_; }
  /// A, A^-1, B, B^-1 as supplied (lengths are conjugation invariant).
  [[nodiscard]] const std::array<Mat2, 4>& generators() const noexcept { return gens_; }

  [[nodiscard]] Mat2 word_matrix(const Word& w) const;
  [[nodiscard]] double word_length(const Word& w) const;
  [[nodiscard]] std::string descriptor() const;

 private:
  SchottkyGroup() = default;
  SchottkyConfig config_;
  SchottkyReport report_;
  std::array<Mat2, 4> gens_{};
};

struct EnumerationOptions {
  std::size_t orbit_cap = 10'000'000;
  /// 0 selects worker_count().
  unsigned threads = 0;
};

/// Every conjugacy class (per orientation if `oriented`) with length <= horizon.
/// Completeness is certified by the per-letter-pair length bounds.
LengthSpectrum enumerate_schottky(const SchottkyGroup& group, double horizon, bool oriented,
                                  const EnumerationOptions& options = {});

}  // namespace trappedset
