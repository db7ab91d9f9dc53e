#include "trappedset/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numbers>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "trappedset/config.hpp"
#include "trappedset/counting.hpp"
#include "trappedset/cylinder.hpp"
#include "trappedset/dirichlet.hpp"
#include "trappedset/errors.hpp"
#include "trappedset/invariant.hpp"
#include "trappedset/numeric.hpp"
#include "trappedset/orbit_csv.hpp"
#include "trappedset/pressure.hpp"
#include "trappedset/resonance.hpp"
#include "trappedset/schottky.hpp"
#include "trappedset/spectrum_stats.hpp"
#include "trappedset/three_disk.hpp"
#include "trappedset/trace.hpp"

#ifndef TRAPPEDSET_VERSION
#define TRAPPEDSET_VERSION "unknown"
#endif

namespace trappedset::cli {

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw InternalError("SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xF]);
  }
  return hex;
}

namespace {

using json = nlohmann::ordered_json;

constexpr std::array<const char*, 8> kSubcommands = {"orbits", "spectrum", "pressure", "bowen",
                                                     "trace",  "count",    "pair",     "invariant"};

constexpr const char* kSpectrumCsvHeader = "T,count,witness_found,left_gap,right_gap,cluster_span";
constexpr const char* kPressureCsvHeader = "T,window_sum,log_window_sum";
constexpr const char* kBowenCsvHeader = "t_u,d_H,bracket_lo,bracket_hi";
constexpr const char* kTraceCsvHeader = "T,lambda,re,im,truncation_bound,n_orbits";
constexpr const char* kCountCsvHeader = "r,count";
constexpr const char* kPairCsvHeader = "T,lambda,re,im,truncation_bound,n_resonances";
constexpr const char* kInvariantCsvHeader = "T,distinct_lengths,m,lambda0,pairing,status";

constexpr double kLambdaCap = 1099511627776.0;  // 2^40, as in InvariantOptions

/// Flags shared by every subcommand; each maps onto a config key.
struct ModelFlags {
  std::string config_path;
  std::string model;
  double core_length = 0.0;
  double horizon = 0.0;
  bool oriented = false;
  std::size_t max_symbol_length = 0;
  std::size_t orbit_cap = 0;
  double separation = 0.0;
  double radius = 0.0;
  std::string output;
  std::string manifest;
  std::uint64_t seed = 0;

  CLI::Option* model_opt = nullptr;
  CLI::Option* core_length_opt = nullptr;
  CLI::Option* horizon_opt = nullptr;
  CLI::Option* oriented_opt = nullptr;
  CLI::Option* max_symbol_opt = nullptr;
  CLI::Option* orbit_cap_opt = nullptr;
  CLI::Option* separation_opt = nullptr;
  CLI::Option* radius_opt = nullptr;
};

void add_model_flags(CLI::App* app, ModelFlags& f) {
  app->add_option("--config", f.config_path, "Key-value config file")->check(CLI::ExistingFile);
  f.model_opt = app->add_option("--model", f.model, "cylinder | schottky | three_disk");
  f.core_length_opt = app->add_option("--core-length", f.core_length, "Cylinder core geodesic length");
  f.horizon_opt = app->add_option("--horizon", f.horizon, "Enumeration horizon (default: what the command needs)");
  f.oriented_opt = app->add_flag("--oriented", f.oriented, "Store both orientations of every orbit");
  f.max_symbol_opt = app->add_option("--max-symbol-length", f.max_symbol_length, "Three-disk symbol length limit");
  f.orbit_cap_opt = app->add_option("--orbit-cap", f.orbit_cap, "Maximum number of orbits");
  f.separation_opt = app->add_option("--separation", f.separation, "Three-disk centre separation R");
  f.radius_opt = app->add_option("--radius", f.radius, "Three-disk radius a");
  app->add_option("-o,--output", f.output, "CSV output file (default: standard output)");
  app->add_option("--manifest", f.manifest, "Run manifest path (default: <output>.manifest.json)");
  app->add_option("--seed", f.seed, "Seed for every random choice")->capture_default_str();
}

/// Config file (if any) with flag overrides applied through the config schema.
RunConfig resolve_config(const ModelFlags& f) {
  RunConfig cfg = f.config_path.empty() ? RunConfig{} : load_config(f.config_path);
  if (f.model_opt->count()) apply_config_key(cfg, "enumeration.model", f.model);
  if (f.core_length_opt->count()) apply_config_key(cfg, "cylinder.core_length", format_real(f.core_length));
  if (f.horizon_opt->count()) apply_config_key(cfg, "enumeration.horizon", format_real(f.horizon));
  if (f.oriented_opt->count()) apply_config_key(cfg, "enumeration.oriented", f.oriented ? "true" : "false");
  if (f.max_symbol_opt->count())
    apply_config_key(cfg, "enumeration.max_symbol_length", std::to_string(f.max_symbol_length));
  if (f.orbit_cap_opt->count()) apply_config_key(cfg, "enumeration.orbit_cap", std::to_string(f.orbit_cap));
  if (f.separation_opt->count()) apply_config_key(cfg, "three_disk.separation", format_real(f.separation));
  if (f.radius_opt->count()) apply_config_key(cfg, "three_disk.radius", format_real(f.radius));
  return cfg;
}

struct Context {
  const std::vector<std::string>& args;
  std::ostream& out;
  std::ostream& err;
  ModelFlags flags;
  RunConfig config;
  std::size_t orbit_count = 0;
  json results = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

/// Horizon: --horizon (or the config value when one was loaded) if given,
/// otherwise exactly what the command needs.
double resolve_horizon(const Context& ctx, double needed) {
  if (ctx.flags.horizon_opt->count() || (needed <= 0.0)) return ctx.config.enumeration.horizon;
  if (!ctx.flags.config_path.empty()) return std::max(ctx.config.enumeration.horizon, needed);
  if (needed > kHorizonCap) throw ConfigError("required horizon " + format_real(needed) + " exceeds the cap");
  return needed;
}

LengthSpectrum build_spectrum(Context& ctx, double needed) {
  RunConfig& cfg = ctx.config;
  const double horizon = resolve_horizon(ctx, needed);
  ctx.config.enumeration.horizon = horizon;  // the manifest records what was enumerated
  const bool oriented = cfg.enumeration.oriented;
  LengthSpectrum sp;
  switch (cfg.enumeration.model) {
    case Model::Cylinder:
      sp = enumerate_cylinder(cfg.cylinder, horizon, oriented);
      break;
    case Model::Schottky: {
      const auto group = SchottkyGroup::create(cfg.schottky);
      EnumerationOptions opts;
      opts.orbit_cap = cfg.enumeration.orbit_cap;
      sp = enumerate_schottky(group, horizon, oriented, opts);
      break;
    }
    case Model::ThreeDisk:
      validate(cfg.three_disk);
      sp = enumerate_three_disk(cfg.three_disk, horizon, cfg.enumeration.max_symbol_length, oriented);
      if (sp.orbits.size() > cfg.enumeration.orbit_cap)
        throw ResourceError("orbit count exceeds orbit_cap = " + std::to_string(cfg.enumeration.orbit_cap));
      break;
  }
  ctx.orbit_count = sp.orbits.size();
  return sp;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
  if (!f) throw ConfigError("write failed for '" + path + "'");
}

void emit(Context& ctx, const std::string& csv) {
  const auto& f = ctx.flags;
  if (f.output.empty())
    ctx.out << csv;
  else
    write_text_file(f.output, csv);

  std::string manifest_path = f.manifest;
  if (manifest_path.empty() && !f.output.empty()) manifest_path = f.output + ".manifest.json";
  if (manifest_path.empty()) return;

  json m;
  m["command_line"] = ctx.args;
  m["config_hash"] = sha256_hex(config_text(ctx.config));
  m["config"] = config_text(ctx.config);
  m["model_descriptor"] = model_descriptor(ctx.config);
  m["code_version"] = TRAPPEDSET_VERSION;
  m["seed"] = f.seed;
  m["threads"] = worker_count();
  m["outputs"] = json::array({json{{"path", f.output.empty() ? "-" : f.output}, {"sha256", sha256_hex(csv)}}});
  m["orbit_count"] = ctx.orbit_count;
  m["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
  m["results"] = ctx.results;
  write_text_file(manifest_path, m.dump(2) + "\n");
}

std::string opt_real(double x, bool present) { return present ? format_real(x) : std::string(); }

/// Resonances from a CSV file, a synthetic ensemble, or nothing (caller decides).
struct ResonanceFlags {
  std::string file;
  std::string ensemble;
};

void add_resonance_flags(CLI::App* app, ResonanceFlags& r) {
  auto* file = app->add_option("--resonances", r.file, "Resonance CSV (re,im,multiplicity)")->check(CLI::ExistingFile);
  app->add_option("--ensemble", r.ensemble, "Synthetic set kind:parameter[,depth[,extent]]")->excludes(file);
}

std::optional<ResonanceSet> load_resonances(const Context& ctx, const ResonanceFlags& r) {
  if (!r.file.empty()) {
    std::ifstream in(r.file);
    if (!in) throw ConfigError("cannot open resonance file '" + r.file + "'");
    return read_resonance_csv(in, r.file);
  }
  if (!r.ensemble.empty()) return synthetic_ensemble(parse_ensemble(r.ensemble), ctx.flags.seed);
  return std::nullopt;
}

// ---------------------------------------------------------------- orbits

void cmd_orbits(Context& ctx) {
  const auto sp = build_spectrum(ctx, 0.0);
  std::ostringstream csv;
  write_orbit_csv(csv, sp);
  ctx.results["complete"] = sp.complete;
  ctx.results["horizon"] = sp.horizon;
  emit(ctx, csv.str());
}

// ---------------------------------------------------------------- spectrum

struct SpectrumFlags {
  double nu = 0.0, c0 = 0.0, t_min = 1.0, t_max = 0.0, t_step = 0.5, width = 0.0;
  CLI::Option *nu_opt = nullptr, *c0_opt = nullptr, *t_max_opt = nullptr, *width_opt = nullptr;
};

void cmd_spectrum(Context& ctx, SpectrumFlags& s) {
  const auto& est = ctx.config.estimators;
  const double nu = s.nu_opt->count() ? s.nu : est.nu;
  const double c0 = s.c0_opt->count() ? s.c0 : est.c0;
  const double width = s.width_opt->count() ? s.width : est.width;
  if (!(nu > 0.0) || !(c0 > 0.0) || !(width > 0.0) || !(s.t_step > 0.0))
    throw ConfigError("spectrum: --nu, --c0, --width and --t-step must be positive");
  const double t_max = s.t_max_opt->count() ? s.t_max : ctx.config.enumeration.horizon;
  const auto sp = build_spectrum(ctx, t_max);
  const auto grid = step_grid(s.t_min, t_max, s.t_step);
  const auto rows = check_minimal_separation(sp, nu, c0, grid, width);
  std::ostringstream csv;
  csv << kSpectrumCsvHeader << '\n';
  std::size_t found = 0;
  for (const auto& r : rows) {
    const bool w = r.witness.has_value();
    found += w;
    csv << format_real(r.T) << ',' << r.count << ',' << (w ? 1 : 0) << ','
        << opt_real(w ? r.witness->left_gap : 0, w) << ',' << opt_real(w ? r.witness->right_gap : 0, w) << ','
        << opt_real(w ? r.witness->cluster_span : 0, w) << '\n';
  }
  ctx.results["witnesses"] = found;
  try {
    ctx.results["theta_plus_u"] = theta_plus_u(sp, Interval{s.t_min, t_max});
  } catch (const InsufficientDataError&) {
  }
  emit(ctx, csv.str());
}

// ---------------------------------------------------------------- pressure / bowen

struct PressureFlags {
  double s = 0.5;
  std::string method = "window";
  double t_min = 6.0, t_max = 0.0, width = 1.0, step = 0.5;
  CLI::Option* t_max_opt = nullptr;
};

void add_pressure_flags(CLI::App* app, PressureFlags& p, bool with_s) {
  if (with_s) app->add_option("--s", p.s, "Weight parameter s in -s J^u")->capture_default_str();
  app->add_option("--method", p.method, "cumulative | window | bowen")->capture_default_str();
  app->add_option("--t-min", p.t_min, "Lower end of the T range")->capture_default_str();
  p.t_max_opt = app->add_option("--t-max", p.t_max, "Upper end of the T range (default: config horizon)");
  app->add_option("--width", p.width, "Window width")->capture_default_str();
  app->add_option("--step", p.step, "T grid step")->capture_default_str();
}

PressureOptions pressure_options(const PressureFlags& p) {
  if (!(p.width > 0.0) || !(p.step > 0.0)) throw ConfigError("--width and --step must be positive");
  PressureOptions o;
  o.window_width = p.width;
  o.grid_step = p.step;
  return o;
}

void cmd_pressure(Context& ctx, PressureFlags& p) {
  const double t_max = p.t_max_opt->count() ? p.t_max : ctx.config.enumeration.horizon;
  const auto sp = build_spectrum(ctx, t_max);
  const auto method = parse_method(p.method);
  const auto opts = pressure_options(p);
  const Interval range{p.t_min, t_max};
  std::ostringstream csv;
  csv << kPressureCsvHeader << '\n';
  for (double T : pressure_grid(range, opts)) {
    const Interval window = method == PressureMethod::CumulativeSum ? Interval{0.0, T} : Interval{T - p.width, T};
    const double sum = orbit_sum(sp, p.s, window);
    csv << format_real(T) << ',' << format_real(sum) << ',' << opt_real(std::log(sum), sum > 0.0) << '\n';
  }
  const auto est = pressure_estimate(sp, p.s, method, range, opts);
  ctx.results["pressure"] = est.value;
  ctx.results["s"] = p.s;
  ctx.results["method"] = std::string(method_name(method));
  ctx.results["nonempty_windows"] = est.nonempty_window_count;
  if (method == PressureMethod::BowenAsymptotic) ctx.results["asymptotic_ratio"] = est.asymptotic_ratio;
  ctx.err << "pressure Pr(-" << format_real(p.s) << " J^u) = " << format_real(est.value) << '\n';
  emit(ctx, csv.str());
}

void cmd_bowen(Context& ctx, PressureFlags& p) {
  const double t_max = p.t_max_opt->count() ? p.t_max : ctx.config.enumeration.horizon;
  const auto sp = build_spectrum(ctx, t_max);
  const auto root = bowen_root(sp, parse_method(p.method), Interval{p.t_min, t_max}, pressure_options(p));
  std::ostringstream csv;
  csv << kBowenCsvHeader << '\n'
      << format_real(root.t_u) << ',' << format_real(root.hausdorff_dimension) << ',' << format_real(root.bracket.lo)
      << ',' << format_real(root.bracket.hi) << '\n';
  ctx.results["t_u"] = root.t_u;
  ctx.results["hausdorff_dimension"] = root.hausdorff_dimension;
  emit(ctx, csv.str());
}

// ---------------------------------------------------------------- trace / pair

struct TestFlags {
  std::string test = "phi2";
  std::vector<double> Ts;
  std::vector<double> lambdas;
  double epsilon = 0.0, beta = 0.0, j_plus = 0.0, center = 0.0, tolerance = 1e-8, alpha = 0.0, lambda_min = 0.0;
  bool auto_align = false;
  std::string mode = "geometric";
  CLI::Option *epsilon_opt = nullptr, *beta_opt = nullptr, *j_plus_opt = nullptr, *center_opt = nullptr,
              *lambda_opt = nullptr, *alpha_opt = nullptr, *lambda_min_opt = nullptr;
};

void add_test_flags(CLI::App* app, TestFlags& t, bool with_auto_align) {
  app->add_option("--test", t.test, "phi1 | phi2 | flambda")->capture_default_str();
  app->add_option("--T", t.Ts, "Time scale T (repeatable)");
  t.epsilon_opt = app->add_option("--epsilon", t.epsilon, "Epsilon (phi1; default from config)");
  t.beta_opt = app->add_option("--beta", t.beta, "Beta (phi1)");
  t.j_plus_opt = app->add_option("--j-plus", t.j_plus, "J+ (phi1)");
  t.center_opt = app->add_option("--center", t.center, "Window centre b (phi1)");
  t.lambda_opt = app->add_option("--lambda", t.lambdas, "Oscillation frequency (repeatable)");
  app->add_option("--tolerance", t.tolerance, "Spectral-side truncation tolerance")->capture_default_str();
  if (with_auto_align) {
    app->add_flag("--auto-align", t.auto_align, "Choose lambda so the window lengths are phase aligned")
        ->excludes(t.lambda_opt);
    t.alpha_opt = app->add_option("--alpha", t.alpha, "Dirichlet base exponent (default from config)");
    t.lambda_min_opt = app->add_option("--lambda-min", t.lambda_min, "Dirichlet base floor (default from config)");
  }
}

WindowedTest build_test(TestKind kind, double T, double lambda, double epsilon, double beta, double j_plus,
                        double center) {
  switch (kind) {
    case TestKind::Phi1:
      return make_phi1(beta, epsilon, j_plus, center, lambda);
    case TestKind::Phi2:
      return make_phi2(T, lambda);
    case TestKind::FLambdaT:
      return make_flambda(lambda, T);
  }
  throw InternalError("unreachable test kind");
}

void write_eval_row(std::ostringstream& csv, const WindowedTest& t, const TraceEvaluation& ev) {
  csv << format_real(t.T) << ',' << format_real(t.lambda) << ',' << format_real(ev.value.real()) << ','
      << format_real(ev.value.imag()) << ',' << format_real(ev.truncation_bound) << ',' << ev.contributing_orbits
      << '\n';
}

double phi1_epsilon(const Context& ctx, const TestFlags& t) {
  const double eps = t.epsilon_opt->count() ? t.epsilon : ctx.config.estimators.epsilon;
  if (!(eps > 0.0) || eps > kEpsilonCap) throw ConfigError("--epsilon must lie in (0, 0.2]");
  return eps;
}

void cmd_trace(Context& ctx, TestFlags& t, ResonanceFlags& rf) {
  const TestKind kind = parse_test_kind(t.test);
  const PairingMode mode = parse_pairing_mode(t.mode);
  if (!t.auto_align && t.lambdas.empty()) throw ConfigError("trace: give --lambda or --auto-align");
  double epsilon = 0.0;
  std::vector<double> Ts = t.Ts;
  if (kind == TestKind::Phi1) {
    if (!t.beta_opt->count() || !(t.beta > 1.0)) throw ConfigError("trace: phi1 needs --beta > 1");
    epsilon = phi1_epsilon(ctx, t);
    Ts = {epsilon * std::log(t.beta)};
  } else if (Ts.empty()) {
    throw ConfigError("trace: --T is required for " + t.test);
  }
  const double needed = *std::max_element(Ts.begin(), Ts.end()) + (kind == TestKind::Phi1 ? 1.0 : 0.0);
  const auto sp = build_spectrum(ctx, needed);
  const double alpha = t.alpha_opt->count() ? t.alpha : ctx.config.estimators.alpha;
  const double lambda_min = t.lambda_min_opt->count() ? t.lambda_min : ctx.config.estimators.lambda_min;

  std::ostringstream csv;
  csv << kTraceCsvHeader << '\n';
  json rows = json::array();
  for (double T : Ts) {
    double center = t.center;
    double j_plus = t.j_plus;
    if (kind == TestKind::Phi1) {
      if (!t.center_opt->count()) {
        // centre on the window length nearest T - 1/2
        const auto lengths = distinct_lengths(sp, T - 1.0, T);
        if (lengths.empty()) throw ConfigError("trace: no orbit length in [T-1, T]; pass --center");
        center = *std::min_element(lengths.begin(), lengths.end(), [&](double x, double y) {
          return std::abs(x - (T - 0.5)) < std::abs(y - (T - 0.5));
        });
      }
      if (!t.j_plus_opt->count()) {
        double theta = 0.5;
        try {
          theta = theta_plus_u(sp, Interval{T - 1.0, T});
        } catch (const InsufficientDataError&) {
        }
        j_plus = choose_j_plus(theta, 0.0, ctx.config.estimators.nu);
      }
    }
    std::vector<double> lambdas = t.lambdas;
    if (t.auto_align) {
      if (kind == TestKind::Phi1) {
        lambdas = {align_lambda_phi1(center, t.beta)};
      } else {
        const WindowedTest probe = build_test(kind, T, 0.0, epsilon, t.beta, j_plus, center);
        const auto lengths = distinct_lengths(sp, probe.support_lo(), probe.support_hi());
        if (lengths.empty()) throw ConfigError("trace: --auto-align needs at least one length in the support");
        const double m = dirichlet_base(alpha, T, lambda_min, kLambdaCap);
        lambdas = {dirichlet_box(lengths, m).lambda0};
      }
    }
    for (double lambda : lambdas) {
      const WindowedTest test = build_test(kind, T, lambda, epsilon, t.beta, j_plus, center);
      TraceEvaluation ev;
      if (mode == PairingMode::GeometricSide) {
        ev = geometric_side(sp, test);
      } else {
        auto set = load_resonances(ctx, rf);
        if (!set) {
          if (ctx.config.enumeration.model != Model::Cylinder)
            throw ConfigError("trace: spectral mode needs --resonances or --ensemble for this model");
          const auto box = choose_lattice_box(ctx.config.cylinder.core_length, MultiplicityRule::Unit, test, t.tolerance);
          set = cylinder_lattice(box.ell0, box.k_max, box.n_max, box.rule);
        }
        ev = spectral_side(*set, test, t.tolerance);
      }
      write_eval_row(csv, test, ev);
      rows.push_back(json{{"T", test.T}, {"lambda", test.lambda}, {"a", test.a}, {"b", test.b}});
    }
  }
  ctx.results["tests"] = rows;
  emit(ctx, csv.str());
}

void cmd_pair(Context& ctx, TestFlags& t, ResonanceFlags& rf) {
  const TestKind kind = parse_test_kind(t.test);
  if (t.lambdas.empty()) throw ConfigError("pair: --lambda is required");
  auto set = load_resonances(ctx, rf);
  double epsilon = 0.0;
  std::vector<double> Ts = t.Ts;
  if (kind == TestKind::Phi1) {
    if (!t.beta_opt->count() || !t.center_opt->count() || !t.j_plus_opt->count())
      throw ConfigError("pair: phi1 needs --beta, --center and --j-plus");
    epsilon = phi1_epsilon(ctx, t);
    Ts = {epsilon * std::log(t.beta)};
  } else if (Ts.empty()) {
    throw ConfigError("pair: --T is required for " + t.test);
  }
  std::ostringstream csv;
  csv << kPairCsvHeader << '\n';
  for (double T : Ts) {
    for (double lambda : t.lambdas) {
      const WindowedTest test = build_test(kind, T, lambda, epsilon, t.beta, t.j_plus, t.center);
      ResonanceSet local;
      const ResonanceSet* use = set ? &*set : nullptr;
      if (!use) {
        if (ctx.config.enumeration.model != Model::Cylinder)
          throw ConfigError("pair: give --resonances or --ensemble (or use the cylinder model)");
        const auto box = choose_lattice_box(ctx.config.cylinder.core_length, MultiplicityRule::Unit, test, t.tolerance);
        local = cylinder_lattice(box.ell0, box.k_max, box.n_max, box.rule);
        use = &local;
      }
      write_eval_row(csv, test, spectral_side(*use, test, t.tolerance));
    }
  }
  emit(ctx, csv.str());
}

// ---------------------------------------------------------------- count

struct CountFlags {
  double s = 1.0, r_min = 10.0, r_max = 1e4, delta = 0.5, kappa = 0.0, c = 0.25, theta = 1.5;
  std::size_t r_count = 32;
  int k_max = -1, n_max = -1;
  double epsilon = 0.0;
  CLI::Option *epsilon_opt = nullptr, *r0_opt = nullptr;
  double r0 = 0.0;
};

void cmd_count(Context& ctx, CountFlags& c, ResonanceFlags& rf) {
  if (!(c.r_min > 0.0) || !(c.r_max > c.r_min) || c.r_count < 2)
    throw ConfigError("count: need 0 < --r-min < --r-max and --r-count >= 2");
  auto set = load_resonances(ctx, rf);
  if (!set) {
    if (ctx.config.enumeration.model != Model::Cylinder)
      throw ConfigError("count: give --resonances or --ensemble (or use the cylinder model)");
    const double ell0 = ctx.config.cylinder.core_length;
    const int k_max = c.k_max >= 0 ? c.k_max : std::max(0, int(std::ceil(c.s - 0.5)));
    // columns up to twice r_max so every Tauberian window stays inside the lattice
    const int n_max = c.n_max >= 0 ? c.n_max : int(std::ceil(2.0 * c.r_max * ell0 / (2.0 * std::numbers::pi)));
    set = cylinder_lattice(ell0, k_max, n_max, MultiplicityRule::Unit);
  }
  const auto measure = strip_measure(*set, c.s);
  const auto grid = log_grid(c.r_min, c.r_max, c.r_count);
  std::ostringstream csv;
  csv << kCountCsvHeader << '\n';
  for (double r : grid) csv << format_real(r) << ',' << strip_count(measure, r) << '\n';

  std::vector<double> x;
  std::vector<double> y;
  for (double r : grid) {
    x.push_back(r);
    y.push_back(double(strip_count(measure, r)));
  }
  ctx.results["linear_slope"] = fit_line(x, y).slope;
  const double r0 = c.r0_opt->count() ? c.r0 : c.r_min;
  if (!measure.empty()) {
    const auto tb = tauberian_accumulate(measure, c.delta, c.kappa, c.c, r0);
    ctx.results["tauberian"] = json{{"hypothesis_held", tb.hypothesis_held},
                                    {"conclusion_held", tb.conclusion_held},
                                    {"verdict", tb.verdict},
                                    {"c1", tb.c1},
                                    {"c2", tb.c2}};
    if (tb.first_violation) ctx.results["tauberian"]["first_violation"] = *tb.first_violation;
    const double eps = c.epsilon_opt->count() ? c.epsilon : ctx.config.estimators.epsilon;
    const auto th = lower_bound_shape_check(measure, grid, eps, c.theta);
    ctx.results["lower_bound_shape"] = json{{"exponent", th.exponent}, {"constant", th.constant}, {"holds", th.holds}};
    ctx.err << "tauberian verdict " << (tb.verdict ? "true" : "false") << " c1=" << format_real(tb.c1)
            << " c2=" << format_real(tb.c2) << '\n';
  }
  emit(ctx, csv.str());
}

// ---------------------------------------------------------------- invariant

struct InvariantFlags {
  std::string mode = "geometric";
  double t_min = 6.0, t_max = 0.0, t_step = 0.5, alpha = 0.0, lambda_min = 0.0, tolerance = 1e-9;
  CLI::Option *t_max_opt = nullptr, *alpha_opt = nullptr, *lambda_min_opt = nullptr;
};

void cmd_invariant(Context& ctx, InvariantFlags& f, ResonanceFlags& rf) {
  const double t_max = f.t_max_opt->count() ? f.t_max : ctx.config.enumeration.horizon;
  if (!(f.t_step > 0.0)) throw ConfigError("invariant: --t-step must be positive");
  const auto sp = build_spectrum(ctx, t_max);
  const auto grid = step_grid(f.t_min, t_max, f.t_step);
  InvariantOptions opts;
  opts.alpha = f.alpha_opt->count() ? f.alpha : ctx.config.estimators.alpha;
  opts.lambda_min = f.lambda_min_opt->count() ? f.lambda_min : ctx.config.estimators.lambda_min;
  opts.spectral_tolerance = f.tolerance;
  const PairingMode mode = parse_pairing_mode(f.mode);
  ResonanceProvider provider;
  if (mode == PairingMode::SpectralSide) {
    auto set = load_resonances(ctx, rf);
    if (set) {
      provider = [fixed = std::move(*set)](const WindowedTest&) { return fixed; };
    } else if (ctx.config.enumeration.model == Model::Cylinder) {
      provider = cylinder_lattice_provider(ctx.config.cylinder.core_length, MultiplicityRule::Unit, f.tolerance);
    } else {
      throw ConfigError("invariant: spectral mode needs --resonances or --ensemble for this model");
    }
  }
  const auto est = spectral_invariant_estimate(sp, grid, mode, opts, provider);
  std::ostringstream csv;
  csv << kInvariantCsvHeader << '\n';
  for (const auto& r : est.rows)
    csv << format_real(r.T) << ',' << r.distinct_lengths << ',' << format_real(r.m) << ',' << format_real(r.lambda0)
        << ',' << format_real(r.pairing) << ',' << row_status_name(r.status) << '\n';
  ctx.results["slope"] = est.value;
  ctx.results["used"] = est.used();
  ctx.err << "spectral invariant slope " << format_real(est.value) << " from " << est.used() << " values of T\n";
  emit(ctx, csv.str());
}

bool is_known_subcommand(const std::string& s) {
  return std::find(kSubcommands.begin(), kSubcommands.end(), s) != kSubcommands.end();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic-orbit and resonance laboratory for model trapped sets", "trappedset"};
  app.require_subcommand(1);

  Context ctx{args, out, err, {}, {}};
  std::vector<std::function<void()>> actions;

  auto* orbits = app.add_subcommand("orbits", "Enumerate the length spectrum (orbit CSV)");
  ModelFlags orbits_flags;
  add_model_flags(orbits, orbits_flags);

  auto* spectrum = app.add_subcommand("spectrum", "Window counts and the minimal-separation scan");
  ModelFlags spectrum_model;
  add_model_flags(spectrum, spectrum_model);
  SpectrumFlags sflags;
  sflags.nu_opt = spectrum->add_option("--nu", sflags.nu, "Gap exponent nu");
  sflags.c0_opt = spectrum->add_option("--c0", sflags.c0, "Cluster exponent C0");
  spectrum->add_option("--t-min", sflags.t_min, "First T")->capture_default_str();
  sflags.t_max_opt = spectrum->add_option("--t-max", sflags.t_max, "Last T (default: config horizon)");
  spectrum->add_option("--t-step", sflags.t_step, "T step")->capture_default_str();
  sflags.width_opt = spectrum->add_option("--width", sflags.width, "Window width");

  auto* pressure = app.add_subcommand("pressure", "Topological pressure of -s J^u");
  ModelFlags pressure_model;
  add_model_flags(pressure, pressure_model);
  PressureFlags pflags;
  add_pressure_flags(pressure, pflags, true);

  auto* bowen = app.add_subcommand("bowen", "Root of Bowen's equation and the Hausdorff dimension");
  ModelFlags bowen_model;
  add_model_flags(bowen, bowen_model);
  PressureFlags bflags;
  add_pressure_flags(bowen, bflags, false);

  auto* trace = app.add_subcommand("trace", "Windowed trace pairing");
  ModelFlags trace_model;
  add_model_flags(trace, trace_model);
  TestFlags tflags;
  add_test_flags(trace, tflags, true);
  trace->add_option("--mode", tflags.mode, "geometric | spectral")->capture_default_str();
  ResonanceFlags trace_res;
  add_resonance_flags(trace, trace_res);

  auto* count = app.add_subcommand("count", "Strip counting function and Tauberian check");
  ModelFlags count_model;
  add_model_flags(count, count_model);
  CountFlags cflags;
  count->add_option("--s", cflags.s, "Strip depth")->capture_default_str();
  count->add_option("--r-min", cflags.r_min, "Smallest radius of the log grid")->capture_default_str();
  count->add_option("--r-max", cflags.r_max, "Largest radius of the log grid")->capture_default_str();
  count->add_option("--r-count", cflags.r_count, "Grid points")->capture_default_str();
  count->add_option("--delta", cflags.delta, "Tauberian window exponent")->capture_default_str();
  count->add_option("--kappa", cflags.kappa, "Tauberian growth exponent")->capture_default_str();
  count->add_option("--c", cflags.c, "Tauberian hypothesis constant")->capture_default_str();
  cflags.r0_opt = count->add_option("--r0", cflags.r0, "Start of the Tauberian grid (default: --r-min)");
  cflags.epsilon_opt = count->add_option("--epsilon", cflags.epsilon, "Epsilon for the lower-bound shape");
  count->add_option("--theta", cflags.theta, "Theta in r^{1 - eps Theta}")->capture_default_str();
  count->add_option("--k-max", cflags.k_max, "Cylinder lattice rows (default: ceil(s - 1/2))");
  count->add_option("--n-max", cflags.n_max, "Cylinder lattice columns (default: covers 2 r-max)");
  ResonanceFlags count_res;
  add_resonance_flags(count, count_res);

  auto* pair = app.add_subcommand("pair", "Spectral side of the pairing for a resonance set");
  ModelFlags pair_model;
  add_model_flags(pair, pair_model);
  TestFlags pair_flags;
  add_test_flags(pair, pair_flags, false);
  ResonanceFlags pair_res;
  add_resonance_flags(pair, pair_res);

  auto* invariant = app.add_subcommand("invariant", "Spectral-invariant slope of log pairing against T");
  ModelFlags inv_model;
  add_model_flags(invariant, inv_model);
  InvariantFlags iflags;
  invariant->add_option("--mode", iflags.mode, "geometric | spectral")->capture_default_str();
  invariant->add_option("--t-min", iflags.t_min, "First T")->capture_default_str();
  iflags.t_max_opt = invariant->add_option("--t-max", iflags.t_max, "Last T (default: config horizon)");
  invariant->add_option("--t-step", iflags.t_step, "T step")->capture_default_str();
  iflags.alpha_opt = invariant->add_option("--alpha", iflags.alpha, "Dirichlet base exponent");
  iflags.lambda_min_opt = invariant->add_option("--lambda-min", iflags.lambda_min, "Dirichlet base floor");
  invariant->add_option("--tolerance", iflags.tolerance, "Spectral-side tolerance")->capture_default_str();
  ResonanceFlags inv_res;
  add_resonance_flags(invariant, inv_res);

  if (args.empty() || (args[0].empty() || args[0][0] != '-') && !is_known_subcommand(args[0])) {
    if (!args.empty()) err << "unknown subcommand '" << args[0] << "'\n\n";
    err << app.help();
    return kExitUsage;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  struct Selected {
    CLI::App* app;
    ModelFlags* flags;
    std::function<void()> action;
  };
  const std::vector<Selected> table = {
      {orbits, &orbits_flags, [&] { cmd_orbits(ctx); }},
      {spectrum, &spectrum_model, [&] { cmd_spectrum(ctx, sflags); }},
      {pressure, &pressure_model, [&] { cmd_pressure(ctx, pflags); }},
      {bowen, &bowen_model, [&] { cmd_bowen(ctx, bflags); }},
      {trace, &trace_model, [&] { cmd_trace(ctx, tflags, trace_res); }},
      {count, &count_model, [&] { cmd_count(ctx, cflags, count_res); }},
      {pair, &pair_model, [&] { cmd_pair(ctx, pair_flags, pair_res); }},
      {invariant, &inv_model, [&] { cmd_invariant(ctx, iflags, inv_res); }},
  };

  try {
    for (const auto& s : table) {
      if (!s.app->parsed()) continue;
      ctx.flags = *s.flags;
      ctx.config = resolve_config(ctx.flags);
      if (ctx.config.enumeration.model == Model::Schottky) {
        const auto report = validate_schottky(ctx.config.schottky);
        if (!report.accepted) {
          err << "Schottky configuration rejected\n" << report.str() << '\n';
          return kExitValidation;
        }
      }
      s.action();
      return kExitOk;
    }
  } catch (const ResourceError& e) {
    err << "resource cap: " << e.what() << '\n';
    return kExitResource;
  } catch (const ConfigError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const OutOfHorizonError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    err << "failed: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace trappedset::cli
