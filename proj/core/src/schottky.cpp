#include "trappedset/schottky.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "trappedset/errors.hpp"
#include "trappedset/numeric.hpp"
#include "trappedset/orbit_csv.hpp"

namespace trappedset {

SchottkyConfig default_schottky_config(double funnel_length) {
  const double h = std::exp(0.5 * funnel_length);
  const Mat2 a{h, 0.0, 0.0, 1.0 / h};
  const Mat2 c{2.0, 1.0, 1.0, 1.0};
  return {a, c * a * c.inverse()};
}

double isometric_gap(const IsometricDisk& x, const IsometricDisk& y) noexcept {
  return std::abs(x.center - y.center) - x.radius - y.radius;
}

namespace {

constexpr const char* kLetterNames[4] = {"A", "A^-1", "B", "B^-1"};

bool has_vertical_axis(const Mat2& m) {
  const double scale = std::abs(m.a) + std::abs(m.b) + std::abs(m.c) + std::abs(m.d);
  return std::abs(m.c) <= 1e-12 * scale;
}

IsometricDisk isometric_disk(const Mat2& m) { return {-m.d / m.c, 1.0 / std::abs(m.c)}; }

}  // namespace

std::string SchottkyReport::str() const {
  std::ostringstream out;
  out << (accepted ? "accepted" : "rejected");
  if (!message.empty()) out << ": " << message;
  out << '\n';
  if (gaps.empty()) return out.str();
  out << "conjugation pole: " << format_real(conjugation_pole) << '\n';
  for (int i = 0; i < 4; ++i)
    out << "disk " << kLetterNames[i] << ": center " << format_real(disks[i].center) << " radius "
        << format_real(disks[i].radius) << '\n';
  for (const auto& g : gaps)
    out << "gap " << kLetterNames[g.first] << " / " << kLetterNames[g.second] << ": " << format_real(g.gap) << '\n';
  out << "min gap: " << format_real(min_gap) << '\n';
  if (accepted) out << "sigma_minus: " << format_real(sigma_minus) << '\n';
  return out.str();
}

SchottkyReport validate_schottky(const SchottkyConfig& config) {
  SchottkyReport report;
  report.conjugation_pole = std::numeric_limits<double>::quiet_NaN();

  for (const auto* m : {&config.generator_a, &config.generator_b}) {
    const char* name = m == &config.generator_a ? "A" : "B";
    for (double x : {m->a, m->b, m->c, m->d})
      if (!std::isfinite(x)) {
        report.message = std::string("generator ") + name + " has non-finite entries";
        return report;
      }
    if (std::abs(m->det() - 1.0) > 1e-12) {
      report.message = std::string("generator ") + name + " has det " + format_real(m->det()) + " != 1";
      return report;
    }
    if (!(std::abs(m->trace()) > 2.0)) {
      report.message = std::string("generator ") + name + " is not hyperbolic (|trace| <= 2)";
      return report;
    }
  }

  const std::array<Mat2, 4> gens{config.generator_a, config.generator_a.inverse(), config.generator_b,
                                 config.generator_b.inverse()};

  // Candidate frames: the identity, then z -> -1/(z - p) for p on a fixed grid
  // covering the real line. Keep the frame with the widest scale-free margin.
  constexpr int kPoles = 512;
  bool any_frame = false;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (int j = -1; j < kPoles; ++j) {
    Mat2 g;
    double pole = std::numeric_limits<double>::quiet_NaN();
    if (j >= 0) {
      pole = std::tan(std::numbers::pi * (j + 0.5) / kPoles - std::numbers::pi / 2);
      g = {0.0, -1.0, 1.0, -pole};
    }
    std::array<IsometricDisk, 4> disks{};
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      const Mat2 m = g * gens[i] * g.inverse();
      if (has_vertical_axis(m))
        ok = false;
      else
        disks[i] = isometric_disk(m);
    }
    if (!ok) continue;
    any_frame = true;
    double margin = std::numeric_limits<double>::infinity();
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q)
        margin = std::min(margin, isometric_gap(disks[p], disks[q]) / (disks[p].radius + disks[q].radius));
    if (margin > best_margin) {
      best_margin = margin;
      report.conjugation_pole = pole;
      report.conjugator = g;
      report.disks = disks;
    }
  }
  if (!any_frame) {
    report.message = "axis at infinity; supply conjugated generators";
    return report;
  }

  report.min_gap = std::numeric_limits<double>::infinity();
  for (int p = 0; p < 4; ++p)
    for (int q = p + 1; q < 4; ++q) {
      const double gap = isometric_gap(report.disks[p], report.disks[q]);
      report.gaps.push_back({p, q, gap});
      report.min_gap = std::min(report.min_gap, gap);
    }
  report.accepted = report.min_gap > 0.0;
  if (!report.accepted) {
    report.message = "isometric disks are not pairwise disjoint";
    return report;
  }

  // Letter i maps the disk of every letter other than i^-1's image into the
  // disk of i^-1 while contracting by at most (r_i / dist)^2.
  report.min_pair_bound = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (j == int(inverse_letter(std::uint8_t(i)))) {
        report.pair_bound[i][j] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const auto& home = report.disks[i];
      const auto& target = report.disks[inverse_letter(std::uint8_t(j))];
      const double dist = std::abs(home.center - target.center) - target.radius;
      report.pair_bound[i][j] = 2.0 * std::log(dist / home.radius);
      report.min_pair_bound = std::min(report.min_pair_bound, report.pair_bound[i][j]);
    }
  report.sigma_minus = std::exp(0.5 * report.min_pair_bound);
  return report;
}

SchottkyGroup SchottkyGroup::create(const SchottkyConfig& config) {
  SchottkyGroup g;
  g.report_ = validate_schottky(config);
  if (!g.report_.accepted) throw ConfigError("Schottky configuration rejected\n" + g.report_.str());
  g.config_ = config;
  g.gens_ = {config.generator_a, config.generator_a.inverse(), config.generator_b, config.generator_b.inverse()};
  return g;
}

Mat2 SchottkyGroup::word_matrix(const Word& w) const {
  Mat2 m;
  for (auto x : w) m = m * gens_.at(x);
  return m;
}

double SchottkyGroup::word_length(const Word& w) const { return length_from_trace(word_matrix(w).trace()); }

std::string SchottkyGroup::descriptor() const {
  const auto& a = config_.generator_a;
  const auto& b = config_.generator_b;
  std::ostringstream out;
  out << "schottky a=[" << format_real(a.a) << ',' << format_real(a.b) << ',' << format_real(a.c) << ','
      << format_real(a.d) << "] b=[" << format_real(b.a) << ',' << format_real(b.b) << ',' << format_real(b.c)
      << ',' << format_real(b.d) << ']';
  return out.str();
}

namespace {

class WordTreeSearch {
 public:
  WordTreeSearch(const SchottkyGroup& group, double horizon, bool oriented, std::size_t cap,
                 std::atomic<std::size_t>& emitted)
      : group_(group), horizon_(horizon), oriented_(oriented), cap_(cap), emitted_(emitted) {
    const auto& r = group.report();
    bounds_ = r.pair_bound;
    min_bound_ = r.min_pair_bound;
    const Mat2& g = r.conjugator;
    const Mat2 g_inv = g.inverse();
    for (std::size_t i = 0; i < 4; ++i) frame_[i] = g * group.generators()[i] * g_inv;
    // For a cyclically reduced word starting with x, the isometric circles of
    // W^-1 and W sit inside the disks of x^-1 and of the last letter, which is
    // any letter but x^-1.
    for (std::uint8_t x = 0; x < 4; ++x) {
      double gap = std::numeric_limits<double>::infinity();
      for (std::uint8_t k = 0; k < 4; ++k)
        if (k != inverse_letter(x)) gap = std::min(gap, isometric_gap(r.disks[inverse_letter(x)], r.disks[k]));
      closing_gap_[x] = gap;
    }
  }

  [[nodiscard]] const std::array<Mat2, 4>& frame() const noexcept { return frame_; }

  // Visits prefix w (matrix m, pair bounds of its internal adjacencies summed
  // in `internal`) and its subtree.
  //
  // m is the prefix matrix as supplied (lengths come from it) and frame_m the
  // same word in the conjugated frame where the disks are finite.
  // Two bounds prune a child: the pair bounds (every closing adjacency adds at
  // least min_bound_), and |tr| >= |c| * gap + 2 for every cyclically reduced
  // extension, since |c| never decreases along a reduced word.
  void visit(Word& w, const Mat2& m, const Mat2& frame_m, double internal) {
    emit_if_canonical(w, m);
    const std::uint8_t last = w.back();
    const double gap = closing_gap_[w.front()];
    for (std::uint8_t x = w.front(); x < 4; ++x) {
      if (x == inverse_letter(last)) continue;
      const double inner = internal + bounds_[last][x];
      if (inner + min_bound_ > horizon_) continue;
      const Mat2 child = frame_m * frame_[x];
      const double c_gap = std::abs(child.c) * gap;
      if (c_gap > 0.0 && length_from_trace(c_gap + 2.0) > horizon_ * (1.0 + 1e-9) + 1e-9) continue;
      w.push_back(x);
      visit(w, m * group_.generators()[x], child, inner);
      w.pop_back();
    }
  }

  std::vector<PeriodicOrbit> take() { return std::move(out_); }

 private:
  void emit_if_canonical(const Word& w, const Mat2& m) {
    if (!is_cyclically_reduced(w)) return;
    const double len = length_from_trace(m.trace());
    if (len > horizon_) return;
    const Word canon = oriented_ ? least_rotation(w) : canonical_word(w);
    if (canon != w) return;
    if (emitted_.fetch_add(1) + 1 > cap_)
      throw ResourceError("Schottky enumeration exceeds orbit_cap = " + std::to_string(cap_));
    PeriodicOrbit o;
    o.code = {Model::Schottky, w};
    o.length = len;
    o.repetition = power_exponent(w);
    o.primitive_length = len / o.repetition;
    o.unstable_exponent = len;
    o.eigenvalue_sign = 1;
    const Stability st = surface_stability_from_length(len);
    o.stability_det_abs = st.value;
    o.log_stability_det = st.log_value;
    out_.push_back(std::move(o));
  }

  const SchottkyGroup& group_;
  double horizon_;
  bool oriented_;
  std::size_t cap_;
  std::atomic<std::size_t>& emitted_;
  std::array<std::array<double, 4>, 4> bounds_{};
  double min_bound_ = 0.0;
  std::array<Mat2, 4> frame_{};
  std::array<double, 4> closing_gap_{};
  std::vector<PeriodicOrbit> out_;
};

}  // namespace

LengthSpectrum enumerate_schottky(const SchottkyGroup& group, double requested_horizon, bool oriented,
                                  const EnumerationOptions& options) {
  if (!(requested_horizon > 0.0) || !std::isfinite(requested_horizon))
    throw DomainError("enumerate_schottky: horizon must be positive");
  const double horizon = horizon_cut(requested_horizon);
  const auto& gens = group.generators();
  const auto& bounds = group.report().pair_bound;
  const double min_bound = group.report().min_pair_bound;

  // Work items: every admissible two-letter prefix. One-letter words are
  // handled up front so the subtrees below are disjoint.
  struct Task {
    Word prefix;
    double internal;
  };
  std::vector<Task> tasks;
  for (std::uint8_t a = 0; a < 4; ++a)
    for (std::uint8_t b = a; b < 4; ++b) {
      if (b == inverse_letter(a)) continue;
      if (bounds[a][b] + min_bound > horizon) continue;
      tasks.push_back({Word{a, b}, bounds[a][b]});
    }

  std::atomic<std::size_t> emitted{0};
  std::vector<std::vector<PeriodicOrbit>> results(tasks.size() + 1);

  // single letters: the closing pair (x, x) is the only adjacency
  {
    std::vector<PeriodicOrbit> singles;
    for (std::uint8_t a = 0; a < 4; ++a) {
      const Word w{a};
      if (!is_cyclically_reduced(w)) continue;
      const Word canon = oriented ? least_rotation(w) : canonical_word(w);
      if (canon != w) continue;
      const double len = length_from_trace(gens[a].trace());
      if (len > horizon) continue;
      if (emitted.fetch_add(1) + 1 > options.orbit_cap)
        throw ResourceError("Schottky enumeration exceeds orbit_cap = " + std::to_string(options.orbit_cap));
      PeriodicOrbit o;
      o.code = {Model::Schottky, w};
      o.length = len;
      o.primitive_length = len;
      o.unstable_exponent = len;
      const Stability st = surface_stability_from_length(len);
      o.stability_det_abs = st.value;
      o.log_stability_det = st.log_value;
      singles.push_back(std::move(o));
    }
    results.back() = std::move(singles);
  }

  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads ? options.threads : worker_count(), unsigned(tasks.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        WordTreeSearch search(group, horizon, oriented, options.orbit_cap, emitted);
        Word w = tasks[i].prefix;
        search.visit(w, gens[w[0]] * gens[w[1]], search.frame()[w[0]] * search.frame()[w[1]], tasks[i].internal);
        results[i] = search.take();
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(tasks.size());
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  LengthSpectrum spectrum;
  spectrum.horizon = requested_horizon;
  spectrum.oriented = oriented;
  spectrum.complete = true;
  spectrum.model_descriptor = group.descriptor();
  std::size_t total = 0;
  for (const auto& r : results) total += r.size();
  spectrum.orbits.reserve(total);
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(spectrum.orbits));
  normalize(spectrum);
  return spectrum;
}

}  // namespace trappedset
