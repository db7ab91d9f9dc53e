#include "trappedset/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string_view>
#include <vector>

#include "trappedset/errors.hpp"
#include "trappedset/orbit_csv.hpp"

namespace trappedset {

namespace {

struct Key {
  std::string_view section;
  std::string_view name;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

double real_in(const std::string& text, const std::string& key) { return parse_real(text, "config key '" + key + "'"); }

double positive(const std::string& text, const std::string& key) {
  const double v = real_in(text, key);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("config key '" + key + "' must be positive and finite");
  return v;
}

double finite(const std::string& text, const std::string& key) {
  const double v = real_in(text, key);
  if (!std::isfinite(v)) throw ConfigError("config key '" + key + "' must be finite");
  return v;
}

std::size_t count_in(const std::string& text, const std::string& key, std::size_t lo, std::size_t hi) {
  const double v = real_in(text, key);
  if (v != std::floor(v) || v < double(lo) || v > double(hi))
    throw ConfigError("config key '" + key + "' must be an integer in [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  return std::size_t(v);
}

bool boolean(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + key + "' must be true or false, got '" + text + "'");
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

#define REAL_KEY(sec, nm, field, parser)                                                       \
  Key {                                                                                        \
    sec, nm, [](RunConfig& c, const std::string& v, const std::string& k) { c.field = parser(v, k); }, \
        [](const RunConfig& c) { return format_real(c.field); }                                \
  }

const std::vector<Key>& schema() {
  static const std::vector<Key> keys = {
      REAL_KEY("cylinder", "core_length", cylinder.core_length, positive),
      REAL_KEY("schottky", "a11", schottky.generator_a.a, finite),
      REAL_KEY("schottky", "a12", schottky.generator_a.b, finite),
      REAL_KEY("schottky", "a21", schottky.generator_a.c, finite),
      REAL_KEY("schottky", "a22", schottky.generator_a.d, finite),
      REAL_KEY("schottky", "b11", schottky.generator_b.a, finite),
      REAL_KEY("schottky", "b12", schottky.generator_b.b, finite),
      REAL_KEY("schottky", "b21", schottky.generator_b.c, finite),
      REAL_KEY("schottky", "b22", schottky.generator_b.d, finite),
      REAL_KEY("three_disk", "separation", three_disk.center_separation, positive),
      REAL_KEY("three_disk", "radius", three_disk.disk_radius, positive),
      Key{"enumeration", "model",
          [](RunConfig& c, const std::string& v, const std::string&) { c.enumeration.model = parse_model(v); },
          [](const RunConfig& c) { return std::string(model_name(c.enumeration.model)); }},
      Key{"enumeration", "horizon",
          [](RunConfig& c, const std::string& v, const std::string& k) {
            const double h = positive(v, k);
            if (h > kHorizonCap)
              throw ConfigError("config key '" + k + "' exceeds the horizon cap " + format_real(kHorizonCap));
            c.enumeration.horizon = h;
          },
          [](const RunConfig& c) { return format_real(c.enumeration.horizon); }},
      Key{"enumeration", "oriented",
          [](RunConfig& c, const std::string& v, const std::string& k) { c.enumeration.oriented = boolean(v, k); },
          [](const RunConfig& c) { return yes_no(c.enumeration.oriented); }},
      Key{"enumeration", "max_symbol_length",
          [](RunConfig& c, const std::string& v, const std::string& k) {
            c.enumeration.max_symbol_length = count_in(v, k, 2, 24);
          },
          [](const RunConfig& c) { return std::to_string(c.enumeration.max_symbol_length); }},
      Key{"enumeration", "orbit_cap",
          [](RunConfig& c, const std::string& v, const std::string& k) {
            c.enumeration.orbit_cap = count_in(v, k, 1, 1'000'000'000);
          },
          [](const RunConfig& c) { return std::to_string(c.enumeration.orbit_cap); }},
      Key{"estimators", "epsilon",
          [](RunConfig& c, const std::string& v, const std::string& k) {
            const double e = positive(v, k);
            if (e > kEpsilonCap)
              throw ConfigError("config key '" + k + "' = " + v + " is outside (0, 0.2]: epsilon is capped at 0.2");
            c.estimators.epsilon = e;
          },
          [](const RunConfig& c) { return format_real(c.estimators.epsilon); }},
      REAL_KEY("estimators", "nu", estimators.nu, positive),
      REAL_KEY("estimators", "c0", estimators.c0, positive),
      REAL_KEY("estimators", "width", estimators.width, positive),
      Key{"estimators", "alpha",
          [](RunConfig& c, const std::string& v, const std::string& k) {
            const double a = finite(v, k);
            if (a < 0.0) throw ConfigError("config key '" + k + "' must be nonnegative");
            c.estimators.alpha = a;
          },
          [](const RunConfig& c) { return format_real(c.estimators.alpha); }},
      REAL_KEY("estimators", "lambda_min", estimators.lambda_min, positive),
      REAL_KEY("estimators", "tolerance", estimators.tolerance, positive),
  };
  return keys;
}

#undef REAL_KEY

}  // namespace

RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  const auto& keys = schema();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config key '" + section + "' appears outside any section");
    bool known_section = false;
    for (const auto& k : keys) known_section |= k.section == section;
    if (!known_section) throw ConfigError("unknown config section '[" + section + "]'");
    for (const auto& [name, value] : body) {
      const std::string full = section + "." + name;
      const Key* match = nullptr;
      for (const auto& k : keys)
        if (k.section == section && k.name == name) match = &k;
      if (!match) throw ConfigError("unknown config key '" + full + "'");
      match->set(cfg, value.data(), full);
    }
  }
  if (cfg.three_disk.center_separation <= 2.0 * cfg.three_disk.disk_radius)
    throw ConfigError("config key 'three_disk.separation' must exceed 2 * three_disk.radius");
  return cfg;
}

void apply_config_key(RunConfig& config, const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  const std::string section = key.substr(0, dot);
  const std::string name = dot == std::string::npos ? std::string() : key.substr(dot + 1);
  for (const auto& k : schema()) {
    if (k.section == section && k.name == name) {
      k.set(config, value, key);
      if (config.three_disk.center_separation <= 2.0 * config.three_disk.disk_radius)
        throw ConfigError("config key 'three_disk.separation' must exceed 2 * three_disk.radius");
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

std::string config_text(const RunConfig& config) {
  std::ostringstream out;
  std::string_view section;
  for (const auto& k : schema()) {
    if (k.section != section) {
      if (!section.empty()) out << '\n';
      section = k.section;
      out << '[' << section << "]\n";
    }
    out << k.name << " = " << k.get(config) << '\n';
  }
  return out.str();
}

std::string model_descriptor(const RunConfig& config) {
  std::ostringstream out;
  out << model_name(config.enumeration.model);
  switch (config.enumeration.model) {
    case Model::Cylinder:
      out << " core_length=" << format_real(config.cylinder.core_length);
      break;
    case Model::Schottky: {
      const auto& a = config.schottky.generator_a;
      const auto& b = config.schottky.generator_b;
      out << " A=[" << format_real(a.a) << ',' << format_real(a.b) << ';' << format_real(a.c) << ','
          << format_real(a.d) << "] B=[" << format_real(b.a) << ',' << format_real(b.b) << ';' << format_real(b.c)
          << ',' << format_real(b.d) << ']';
      break;
    }
    case Model::ThreeDisk:
      out << " separation=" << format_real(config.three_disk.center_separation)
          << " radius=" << format_real(config.three_disk.disk_radius)
          << " max_symbol_length=" << config.enumeration.max_symbol_length;
      break;
  }
  out << " horizon=" << format_real(config.enumeration.horizon) << " oriented=" << yes_no(config.enumeration.oriented);
  return out.str();
}

}  // namespace trappedset
