#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wpk/errors.hpp"
#include "wpk/grid.hpp"
#include "wpk/hamiltonian.hpp"
#include "wpk/io.hpp"
#include "wpk/propagator.hpp"
#include "wpk/version.hpp"

namespace wpk {

enum class Command { optimize, sample, scan, chain, validate };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::optimize: return "optimize";
    case Command::sample: return "sample";
    case Command::scan: return "scan";
    case Command::chain: return "chain";
    case Command::validate: return "validate";
  }
  return "unknown";
}

enum class ModelKind { h2plus_reduced, point_charge, harmonic, full_cartesian };

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// strips an inline comment introduced by whitespace followed by # or ;
inline std::string strip_comment(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((s[i] == '#' || s[i] == ';') &&
        (i == 0 || std::isspace(static_cast<unsigned char>(s[i - 1])))) {
      return s.substr(0, i);
    }
  }
  return s;
}

}  // namespace detail

// flat "section.key" -> raw string view of one config file
struct RawConfig {
  std::string path;
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;
};

inline RawConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");

  RawConfig raw;
  raw.path = path;
  std::vector<std::string> problems;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = detail::trim(detail::strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        problems.push_back(path + ":" + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      section = detail::trim(body.substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      problems.push_back(path + ":" + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    if (section.empty()) {
      problems.push_back(path + ":" + std::to_string(line_no) + ": key outside any [section]");
      continue;
    }
    const std::string key = section + "." + detail::trim(body.substr(0, eq));
    if (raw.values.count(key)) {
      problems.push_back(path + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
      continue;
    }
    raw.values[key] = detail::trim(body.substr(eq + 1));
    raw.lines[key] = line_no;
  }
  if (!problems.empty()) {
    std::string joined = "config syntax problems:";
    for (const auto& p : problems) joined += "\n  " + p;
    throw ConfigError(joined);
  }
  return raw;
}

// Fully resolved run parameters. Built by load_run_config, which validates
// everything up front and reports every problem in one shot; once a RunConfig
// exists, the compute code no longer second-guesses its inputs.
struct RunConfig {
  Command command = Command::validate;

  std::optional<ModelKind> kind;
  double mass_1 = proton_mass;
  double mass_2 = proton_mass;
  double electron_mass = 1.0;
  std::size_t grid_points = 0;
  double grid_step = 0.0;
  double grid_offset = 0.0;
  double softening_cap = 0.0;  // resolved; 0 means "auto", decided per grid
  double separation = 0.0;
  double omega = 0.0;
  double harmonic_mass = 1.0;
  std::size_t harmonic_axes = 1;
  std::vector<ChargedParticle> nuclei;
  std::size_t n_electrons = 1;
  std::size_t element_cap = std::size_t{1} << 26;

  PropagatorParams propagator;
  double initial_width = 0.5;

  std::size_t n_obs = 200;
  std::uint64_t seed = 1;
  std::string prng = "mt19937_64";
  std::string input_state;

  double r_min = 0.25;
  double r_max = 0.60;
  double r_step = 0.01;

  double chain_mass = 1.0;
  double chain_spring_k = 1.0;
  std::size_t chain_n_min = 100;
  std::size_t chain_n_max = 10000;
  std::size_t chain_n_count = 13;

  std::string out_dir = "out";

  // grid of identical axes as configured; rank depends on the model kind
  GridSpec make_grid(std::size_t rank) const {
    GridSpec g;
    g.axes.assign(rank, AxisSpec{grid_points, grid_step, grid_offset});
    return g;
  }

  double resolved_cap() const {
    return softening_cap > 0.0 ? softening_cap : default_softening_cap(grid_step, grid_step);
  }

  HamiltonianModel build_model() const {
    if (!kind) throw ConfigError("no model kind configured");
    switch (*kind) {
      case ModelKind::h2plus_reduced:
        return build_h2plus_reduced(make_grid(4), {mass_1, mass_2, electron_mass},
                                    resolved_cap());
      case ModelKind::point_charge:
        return build_point_charge_electronic(make_grid(2), separation, resolved_cap());
      case ModelKind::harmonic:
        return build_harmonic(make_grid(harmonic_axes), harmonic_mass, omega);
      case ModelKind::full_cartesian:
        return build_full_cartesian(make_grid(2 * (nuclei.size() + n_electrons)), nuclei,
                                    n_electrons, electron_mass, resolved_cap(), element_cap);
    }
    throw ConfigError("no model kind configured");
  }

  Metadata resolved() const;
};

namespace detail {

struct ConfigReader {
  const RawConfig& raw;
  std::vector<std::string> problems;

  bool has(const std::string& key) const { return raw.values.count(key) != 0; }

  void fail(const std::string& key, const std::string& why) {
    auto it = raw.lines.find(key);
    const std::string at =
        (it != raw.lines.end()) ? raw.path + ":" + std::to_string(it->second) + ": " : "";
    problems.push_back(at + "'" + key + "' " + why);
  }

  std::optional<double> parse_double(const std::string& key) {
    const std::string& s = raw.values.at(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
      fail(key, "is not a number: '" + s + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::uint64_t> parse_u64(const std::string& key) {
    const std::string& s = raw.values.at(key);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      fail(key, "is not a nonnegative integer: '" + s + "'");
      return std::nullopt;
    }
    return v;
  }

  double get_double(const std::string& key, double def, double min_exclusive = 0.0) {
    if (!has(key)) return def;
    const auto v = parse_double(key);
    if (!v) return def;
    if (!(*v > min_exclusive)) {
      std::ostringstream msg;
      msg << "must be greater than " << min_exclusive << ", got " << *v;
      fail(key, msg.str());
      return def;
    }
    return *v;
  }

  double get_double_any(const std::string& key, double def) {
    if (!has(key)) return def;
    const auto v = parse_double(key);
    return v ? *v : def;
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t def, std::uint64_t min = 0) {
    if (!has(key)) return def;
    const auto v = parse_u64(key);
    if (!v) return def;
    if (*v < min) {
      fail(key, "must be at least " + std::to_string(min));
      return def;
    }
    return *v;
  }

  std::string get_string(const std::string& key, const std::string& def) {
    return has(key) ? raw.values.at(key) : def;
  }

  void require(const std::string& key, const std::string& why) {
    if (!has(key)) problems.push_back("missing required key '" + key + "' (" + why + ")");
  }
};

// every key the schema knows; anything else in a file is a typo worth failing on
inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "model.kind",          "model.mass_1",        "model.mass_2",
      "model.electron_mass", "model.grid_points",   "model.grid_step",
      "model.grid_offset",   "model.softening_cap", "model.separation",
      "model.omega",         "model.mass",          "model.axes",
      "model.nuclei",        "model.n_electrons",   "model.element_cap",
      "propagator.d_tau",    "propagator.max_steps", "propagator.energy_tol",
      "propagator.energy_check_interval",            "propagator.renormalize_every",
      "propagator.initial_width",                    "sampling.n_obs",
      "sampling.seed",       "sampling.prng",       "sampling.input_state",
      "scan.r_min",          "scan.r_max",          "scan.r_step",
      "chain.mass",          "chain.spring_k",      "chain.n_min",
      "chain.n_max",         "chain.n_count",       "output.directory",
  };
  return keys;
}

}  // namespace detail

// Parses and validates a config for one command. Collects every problem it
// can find (unknown keys, type errors, range errors, missing requirements)
// and throws a single ConfigError listing all of them; nothing is computed
// until the whole file checks out.
inline RunConfig load_run_config(Command command, const std::string& path) {
  const RawConfig raw = parse_config_file(path);
  detail::ConfigReader reader{raw, {}};
  RunConfig cfg;
  cfg.command = command;

  for (const auto& [key, value] : raw.values) {
    bool known = false;
    for (const auto& k : detail::known_keys()) {
      if (k == key) {
        known = true;
        break;
      }
    }
    if (!known) reader.fail(key, "is not a recognized setting");
  }

  // model section
  if (reader.has("model.kind")) {
    const std::string kind = raw.values.at("model.kind");
    if (kind == "h2plus_reduced") cfg.kind = ModelKind::h2plus_reduced;
    else if (kind == "point_charge") cfg.kind = ModelKind::point_charge;
    else if (kind == "harmonic") cfg.kind = ModelKind::harmonic;
    else if (kind == "full_cartesian") cfg.kind = ModelKind::full_cartesian;
    else
      reader.fail("model.kind",
                  "must be one of h2plus_reduced, point_charge, harmonic, full_cartesian");
  }
  cfg.mass_1 = reader.get_double("model.mass_1", proton_mass);
  cfg.mass_2 = reader.get_double("model.mass_2", proton_mass);
  cfg.electron_mass = reader.get_double("model.electron_mass", 1.0);
  cfg.grid_points = reader.get_u64("model.grid_points", 0, 2);
  cfg.grid_step = reader.get_double("model.grid_step", 0.0);
  cfg.separation = reader.get_double("model.separation", 0.0);
  cfg.omega = reader.get_double("model.omega", 0.0);
  cfg.harmonic_mass = reader.get_double("model.mass", 1.0);
  cfg.harmonic_axes = reader.get_u64("model.axes", 1, 1);
  cfg.n_electrons = reader.get_u64("model.n_electrons", 1);
  cfg.element_cap = reader.get_u64("model.element_cap", std::size_t{1} << 26, 2);
  if (reader.has("model.grid_offset")) {
    cfg.grid_offset = reader.get_double_any("model.grid_offset", 0.0);
  } else if (cfg.grid_points >= 2 && cfg.grid_step > 0.0) {
    cfg.grid_offset = centered_axis(cfg.grid_points, cfg.grid_step).offset;
  }
  if (reader.has("model.softening_cap")) {
    if (raw.values.at("model.softening_cap") == "auto") {
      cfg.softening_cap = 0.0;
    } else {
      cfg.softening_cap = reader.get_double("model.softening_cap", 0.0);
    }
  }
  if (reader.has("model.nuclei")) {
    const std::string& list = raw.values.at("model.nuclei");
    std::istringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      ChargedParticle p;
      char* end = nullptr;
      bool ok = colon != std::string::npos;
      if (ok) {
        const std::string mass_s = detail::trim(item.substr(0, colon));
        p.mass = std::strtod(mass_s.c_str(), &end);
        ok = end != mass_s.c_str() && *end == '\0' && p.mass > 0.0;
        const std::string charge_s = detail::trim(item.substr(colon + 1));
        p.charge = std::strtod(charge_s.c_str(), &end);
        ok = ok && end != charge_s.c_str() && *end == '\0';
      }
      if (!ok) {
        reader.fail("model.nuclei", "expects 'mass:charge, mass:charge, ...' with positive masses");
        break;
      }
      cfg.nuclei.push_back(p);
    }
  }

  // propagator section
  cfg.propagator.d_tau = reader.get_double("propagator.d_tau", 0.0);
  cfg.propagator.max_steps = reader.get_u64("propagator.max_steps", 100000, 1);
  cfg.propagator.energy_tol = reader.get_double("propagator.energy_tol", 1e-10);
  cfg.propagator.energy_check_interval =
      reader.get_u64("propagator.energy_check_interval", 10, 1);
  cfg.propagator.renormalize_every = reader.get_u64("propagator.renormalize_every", 1, 1);
  cfg.initial_width = reader.get_double("propagator.initial_width", 0.5);

  // sampling section
  cfg.n_obs = reader.get_u64("sampling.n_obs", 200, 1);
  cfg.seed = reader.get_u64("sampling.seed", 1);
  cfg.prng = reader.get_string("sampling.prng", "mt19937_64");
  if (cfg.prng != "mt19937_64") {
    reader.fail("sampling.prng", "only mt19937_64 is implemented");
  }
  cfg.input_state = reader.get_string("sampling.input_state", "");

  // scan section
  cfg.r_min = reader.get_double("scan.r_min", 0.25);
  cfg.r_max = reader.get_double("scan.r_max", 0.60);
  cfg.r_step = reader.get_double("scan.r_step", 0.01);
  if (cfg.r_max < cfg.r_min) reader.problems.push_back("scan range is empty (r_max < r_min)");

  // chain section
  cfg.chain_mass = reader.get_double("chain.mass", 1.0);
  cfg.chain_spring_k = reader.get_double("chain.spring_k", 1.0);
  cfg.chain_n_min = reader.get_u64("chain.n_min", 100, 2);
  cfg.chain_n_max = reader.get_u64("chain.n_max", 10000, 2);
  cfg.chain_n_count = reader.get_u64("chain.n_count", 13, 1);
  if (cfg.chain_n_max < cfg.chain_n_min) {
    reader.problems.push_back("chain ladder is empty (n_max < n_min)");
  }

  cfg.out_dir = reader.get_string("output.directory", "out");

  // command-specific requirements
  const bool needs_model =
      command == Command::optimize ||
      (command == Command::sample && cfg.input_state.empty());
  if (needs_model) {
    reader.require("model.kind", "selects what to optimize");
    reader.require("model.grid_points", "grid size per axis");
    reader.require("model.grid_step", "grid spacing");
    reader.require("propagator.d_tau", "sets the imaginary-time step");
    if (cfg.kind) {
      if (*cfg.kind == ModelKind::harmonic) {
        reader.require("model.omega", "harmonic frequency");
      }
      if (*cfg.kind == ModelKind::point_charge) {
        reader.require("model.separation", "distance between the point charges");
      }
      if (*cfg.kind == ModelKind::full_cartesian) {
        reader.require("model.nuclei", "list of nuclear masses and charges");
      }
    }
  }
  if (command == Command::sample && cfg.input_state.empty() && cfg.kind &&
      *cfg.kind != ModelKind::h2plus_reduced) {
    reader.problems.push_back(
        "sample without sampling.input_state needs model.kind = h2plus_reduced");
  }
  if (command == Command::scan) {
    reader.require("model.grid_points", "grid size per axis");
    reader.require("model.grid_step", "grid spacing");
    reader.require("propagator.d_tau", "sets the imaginary-time step");
    if (cfg.kind && *cfg.kind != ModelKind::point_charge) {
      reader.problems.push_back("scan only works with the point_charge model");
    }
  }

  if (!reader.problems.empty()) {
    std::string joined = "invalid config '" + path + "':";
    for (const auto& p : reader.problems) joined += "\n  " + p;
    throw ConfigError(joined);
  }
  return cfg;
}

inline Metadata RunConfig::resolved() const {
  Metadata meta;
  meta.emplace_back("version", version_string);
  meta.emplace_back("command", to_string(command));
  const auto add_d = [&meta](const char* k, double v) {
    meta.emplace_back(k, detail::format_double(v));
  };
  const auto add_u = [&meta](const char* k, std::uint64_t v) {
    meta.emplace_back(k, std::to_string(v));
  };

  if (kind) {
    const char* names[] = {"h2plus_reduced", "point_charge", "harmonic", "full_cartesian"};
    meta.emplace_back("model.kind", names[static_cast<int>(*kind)]);
    add_u("model.grid_points", grid_points);
    add_d("model.grid_step", grid_step);
    add_d("model.grid_offset", grid_offset);
    switch (*kind) {
      case ModelKind::h2plus_reduced:
        add_d("model.mass_1", mass_1);
        add_d("model.mass_2", mass_2);
        add_d("model.electron_mass", electron_mass);
        add_d("model.softening_cap", resolved_cap());
        break;
      case ModelKind::point_charge:
        add_d("model.separation", separation);
        add_d("model.softening_cap", resolved_cap());
        break;
      case ModelKind::harmonic:
        add_d("model.omega", omega);
        add_d("model.mass", harmonic_mass);
        add_u("model.axes", harmonic_axes);
        break;
      case ModelKind::full_cartesian: {
        std::string list;
        for (const auto& p : nuclei) {
          if (!list.empty()) list += ", ";
          list += detail::format_double(p.mass) + ":" + detail::format_double(p.charge);
        }
        meta.emplace_back("model.nuclei", list);
        add_u("model.n_electrons", n_electrons);
        add_d("model.electron_mass", electron_mass);
        add_d("model.softening_cap", resolved_cap());
        break;
      }
    }
  }
  if (command == Command::optimize || command == Command::sample || command == Command::scan) {
    add_d("propagator.d_tau", propagator.d_tau);
    add_u("propagator.max_steps", propagator.max_steps);
    add_d("propagator.energy_tol", propagator.energy_tol);
    add_u("propagator.energy_check_interval", propagator.energy_check_interval);
    add_u("propagator.renormalize_every", propagator.renormalize_every);
    add_d("propagator.initial_width", initial_width);
  }
  if (command == Command::sample) {
    add_u("sampling.n_obs", n_obs);
    add_u("sampling.seed", seed);
    meta.emplace_back("sampling.prng", prng);
    if (!input_state.empty()) meta.emplace_back("sampling.input_state", input_state);
  }
  if (command == Command::scan) {
    add_d("scan.r_min", r_min);
    add_d("scan.r_max", r_max);
    add_d("scan.r_step", r_step);
  }
  if (command == Command::chain) {
    add_d("chain.mass", chain_mass);
    add_d("chain.spring_k", chain_spring_k);
    add_u("chain.n_min", chain_n_min);
    add_u("chain.n_max", chain_n_max);
    add_u("chain.n_count", chain_n_count);
  }
  meta.emplace_back("output.directory", out_dir);
  return meta;
}

}  // namespace wpk
