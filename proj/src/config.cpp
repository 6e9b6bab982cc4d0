#include "qulat/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qulat {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

const std::set<std::string> kPotentialParams = {
    "omega", "center", "lambda", "phi0", "eps", "v0",
    "mu",    "ell",    "phi_fv", "phi_tv", "alpha", "gamma"};

const std::set<std::string> kKnownKeys = {
    "lattice.N", "lattice.a", "lattice.d", "lattice.L", "lattice.boundary_corrected",
    "potential.kind", "potential.lift",
    "prep.method", "prep.M_adiabatic", "prep.lift_delta", "prep.seed",
    "prep.n_samples", "prep.sample_index", "prep.omega0", "prep.dtau",
    "prep.max_steps", "prep.energy_tol", "prep.geometric_decay", "prep.measure_stride",
    "evolution.dt", "evolution.t_total", "evolution.order_sweep", "evolution.chi_max",
    "evolution.cutoff", "evolution.record_stride",
    "seed_kick.enabled", "seed_kick.p0",
    "bubble.enabled", "bubble.r0", "bubble.beta", "bubble.profile",
    "bounce.r_max", "bounce.tol", "bounce.points",
    "pde.bc",
    "qumode.initial", "qumode.nu",
    "output.dir", "output.formats", "output.pgm_binary", "output.checkpoint_stride"};

struct RawEntry {
  std::string value;
  int line;
};

}  // namespace

LiftSpec RunConfig::lift_spec() const {
  LiftSpec lift;
  lift.kind = lift_kind;
  lift.delta = lift_delta;
  return lift;
}

Potential RunConfig::lifted_potential() const {
  if (lift_kind == LiftKind::None) return potential;
  return potential.with_lift(lift_spec());
}

double RunConfig::resolved_half_width() const {
  return half_width > 0 ? half_width : default_half_width(potential);
}

TruncationPolicy RunConfig::policy() const { return TruncationPolicy{chi_max, cutoff}; }

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  std::map<std::string, RawEntry> raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = line;
    size_t hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected 'section.key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) fail(origin, lineno, "empty key or value");
    if (raw.count(key)) fail(origin, lineno, "duplicate key '" + key + "'");
    raw[key] = {value, lineno};
  }

  // Split off potential parameters (kind-specific whitelist handled by the
  // potential factory); everything else must be a known key.
  std::map<std::string, double> pot_params;
  for (auto it = raw.begin(); it != raw.end();) {
    const std::string& key = it->first;
    if (key.rfind("potential.", 0) == 0 && key != "potential.kind" &&
        key != "potential.lift") {
      std::string name = key.substr(10);
      if (!kPotentialParams.count(name))
        fail(origin, it->second.line, "unknown potential parameter '" + name + "'");
      try {
        pot_params[name] = std::stod(it->second.value);
      } catch (const std::exception&) {
        fail(origin, it->second.line, "bad number for '" + key + "'");
      }
      it = raw.erase(it);
    } else {
      if (!kKnownKeys.count(key)) fail(origin, it->second.line, "unknown key '" + key + "'");
      ++it;
    }
  }

  RunConfig cfg;
  auto take = [&](const char* key) -> const RawEntry* {
    auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };
  auto num = [&](const char* key, double dflt, auto validate) {
    const RawEntry* e = take(key);
    if (!e) return dflt;
    double v;
    try {
      v = std::stod(e->value);
    } catch (const std::exception&) {
      fail(origin, e->line, std::string("bad number for '") + key + "'");
    }
    if (!validate(v)) fail(origin, e->line, std::string("invalid value for '") + key + "'");
    return v;
  };
  auto integer = [&](const char* key, long long dflt, long long lo, long long hi) {
    const RawEntry* e = take(key);
    if (!e) return dflt;
    long long v;
    try {
      v = std::stoll(e->value);
    } catch (const std::exception&) {
      fail(origin, e->line, std::string("bad integer for '") + key + "'");
    }
    if (v < lo || v > hi)
      fail(origin, e->line, std::string("out-of-range value for '") + key + "'");
    return v;
  };
  auto boolean = [&](const char* key, bool dflt) {
    const RawEntry* e = take(key);
    if (!e) return dflt;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    fail(origin, e->line, std::string("bad boolean for '") + key + "'");
  };
  auto word = [&](const char* key, const std::string& dflt,
                  std::initializer_list<const char*> allowed) {
    const RawEntry* e = take(key);
    if (!e) return dflt;
    for (const char* w : allowed)
      if (e->value == w) return e->value;
    fail(origin, e->line, std::string("invalid choice for '") + key + "'");
  };

  auto positive = [](double v) { return v > 0; };
  auto nonneg = [](double v) { return v >= 0; };

  cfg.n_sites = static_cast<int>(integer("lattice.N", 16, 1, 100000));
  cfg.a = num("lattice.a", 1.0, positive);
  cfg.d = static_cast<int>(integer("lattice.d", 20, 2, 4096));
  cfg.half_width = num("lattice.L", 0.0, nonneg);
  cfg.boundary_corrected = boolean("lattice.boundary_corrected", false);

  cfg.potential_kind = word("potential.kind", "sho",
                            {"sho", "quartic", "double_tanh", "poschl_teller"});
  try {
    cfg.potential = Potential::from_params(cfg.potential_kind, pot_params);
  } catch (const std::invalid_argument& e) {
    fail(origin, 0, e.what());
  }
  std::string lift = word("potential.lift", "none", {"none", "gaussian", "drop_true_well"});
  cfg.lift_kind = lift == "none" ? LiftKind::None
                  : lift == "gaussian" ? LiftKind::Gaussian
                                       : LiftKind::DropTrueWell;

  std::string method = word("prep.method", "product_sho",
                            {"product_sho", "product_adiabatic", "sampled", "imaginary_time"});
  cfg.prep_method = method == "product_sho"       ? PrepMethod::ProductSHO
                    : method == "product_adiabatic" ? PrepMethod::ProductAdiabatic
                    : method == "sampled"           ? PrepMethod::Sampled
                                                    : PrepMethod::ImaginaryTime;
  cfg.m_adiabatic = static_cast<int>(integer("prep.M_adiabatic", 600, 1, 10000000));
  cfg.lift_delta = num("prep.lift_delta", 4.0, positive);
  cfg.seed = static_cast<std::uint64_t>(integer("prep.seed", 12345, 0,
                                                std::numeric_limits<long long>::max()));
  cfg.n_samples = static_cast<int>(integer("prep.n_samples", 1, 1, 100000000));
  cfg.sample_index = static_cast<std::uint64_t>(
      integer("prep.sample_index", 0, 0, std::numeric_limits<long long>::max()));
  cfg.omega0 = num("prep.omega0", 0.0, nonneg);
  cfg.dtau = num("prep.dtau", 0.05, positive);
  cfg.prep_max_steps = static_cast<int>(integer("prep.max_steps", 1500, 1, 100000000));
  cfg.energy_tol = num("prep.energy_tol", 1e-7, positive);
  cfg.geometric_decay = boolean("prep.geometric_decay", false);
  cfg.measure_stride = static_cast<int>(integer("prep.measure_stride", 1, 1, 1000000));

  cfg.dt = num("evolution.dt", 0.05, positive);
  cfg.t_total = num("evolution.t_total", 10.0, nonneg);
  cfg.ordering = word("evolution.order_sweep", "odd_even", {"odd_even", "sweep"}) ==
                         "odd_even"
                     ? GateOrdering::OddEven
                     : GateOrdering::Sweep;
  cfg.chi_max = static_cast<int>(integer("evolution.chi_max", 64, 1, 100000));
  cfg.cutoff = num("evolution.cutoff", 1e-10, nonneg);
  if (cfg.cutoff >= 1.0) fail(origin, 0, "evolution.cutoff must be < 1");
  cfg.record_stride = static_cast<int>(integer("evolution.record_stride", 10, 1, 1000000));

  cfg.kick_enabled = boolean("seed_kick.enabled", false);
  cfg.kick_p0 = num("seed_kick.p0", 0.1, [](double) { return true; });

  cfg.bubble_enabled = boolean("bubble.enabled", false);
  cfg.bubble_r0 = num("bubble.r0", 0.0, nonneg);
  cfg.bubble_beta = num("bubble.beta", 0.0, nonneg);
  cfg.bubble_profile = word("bubble.profile", "tanh", {"tanh"});
  if (cfg.bubble_enabled && cfg.bubble_r0 <= 0)
    fail(origin, 0, "bubble.r0 must be > 0 when bubble.enabled is on");

  cfg.bounce_r_max = num("bounce.r_max", 80.0, positive);
  cfg.bounce_tol = num("bounce.tol", 0.0, nonneg);
  cfg.quadrature_points = static_cast<int>(integer("bounce.points", 2000, 32, 100000000));

  cfg.pde_bc = word("pde.bc", "neumann", {"neumann", "dirichlet"}) == "neumann"
                   ? PdeBoundary::Neumann
                   : PdeBoundary::Dirichlet;

  cfg.qumode_initial = word("qumode.initial", "sho", {"sho", "pt", "adiabatic"});
  cfg.qumode_nu = static_cast<int>(integer("qumode.nu", 0, 0, 1000));

  if (const RawEntry* e = take("output.dir")) cfg.out_dir = e->value;
  std::string formats = take("output.formats") ? take("output.formats")->value : "csv,pgm";
  cfg.write_csv = formats.find("csv") != std::string::npos;
  cfg.write_pgm = formats.find("pgm") != std::string::npos;
  cfg.pgm_binary = boolean("output.pgm_binary", true);
  cfg.checkpoint_stride =
      static_cast<int>(integer("output.checkpoint_stride", 0, 0, 100000000));

  // Echo every resolved value.
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  cfg.echo["lattice.N"] = std::to_string(cfg.n_sites);
  cfg.echo["lattice.a"] = fmt(cfg.a);
  cfg.echo["lattice.d"] = std::to_string(cfg.d);
  cfg.echo["lattice.L"] = fmt(cfg.resolved_half_width());
  cfg.echo["lattice.boundary_corrected"] = cfg.boundary_corrected ? "true" : "false";
  cfg.echo["potential.kind"] = cfg.potential_kind;
  cfg.echo["potential.lift"] = lift;
  for (const auto& [k, v] : pot_params) cfg.echo["potential." + k] = fmt(v);
  cfg.echo["prep.method"] = method;
  cfg.echo["prep.M_adiabatic"] = std::to_string(cfg.m_adiabatic);
  cfg.echo["prep.lift_delta"] = fmt(cfg.lift_delta);
  cfg.echo["prep.seed"] = std::to_string(cfg.seed);
  cfg.echo["prep.n_samples"] = std::to_string(cfg.n_samples);
  cfg.echo["prep.sample_index"] = std::to_string(cfg.sample_index);
  cfg.echo["prep.omega0"] = fmt(cfg.omega0);
  cfg.echo["prep.dtau"] = fmt(cfg.dtau);
  cfg.echo["prep.max_steps"] = std::to_string(cfg.prep_max_steps);
  cfg.echo["prep.energy_tol"] = fmt(cfg.energy_tol);
  cfg.echo["prep.geometric_decay"] = cfg.geometric_decay ? "true" : "false";
  cfg.echo["prep.measure_stride"] = std::to_string(cfg.measure_stride);
  cfg.echo["evolution.dt"] = fmt(cfg.dt);
  cfg.echo["evolution.t_total"] = fmt(cfg.t_total);
  cfg.echo["evolution.order_sweep"] =
      cfg.ordering == GateOrdering::OddEven ? "odd_even" : "sweep";
  cfg.echo["evolution.chi_max"] = std::to_string(cfg.chi_max);
  cfg.echo["evolution.cutoff"] = fmt(cfg.cutoff);
  cfg.echo["evolution.record_stride"] = std::to_string(cfg.record_stride);
  cfg.echo["seed_kick.enabled"] = cfg.kick_enabled ? "true" : "false";
  cfg.echo["seed_kick.p0"] = fmt(cfg.kick_p0);
  cfg.echo["bubble.enabled"] = cfg.bubble_enabled ? "true" : "false";
  cfg.echo["bubble.r0"] = fmt(cfg.bubble_r0);
  cfg.echo["bubble.beta"] = fmt(cfg.bubble_beta);
  cfg.echo["bubble.profile"] = cfg.bubble_profile;
  cfg.echo["bounce.r_max"] = fmt(cfg.bounce_r_max);
  cfg.echo["bounce.tol"] = fmt(cfg.bounce_tol);
  cfg.echo["bounce.points"] = std::to_string(cfg.quadrature_points);
  cfg.echo["pde.bc"] = cfg.pde_bc == PdeBoundary::Neumann ? "neumann" : "dirichlet";
  cfg.echo["qumode.initial"] = cfg.qumode_initial;
  cfg.echo["qumode.nu"] = std::to_string(cfg.qumode_nu);
  cfg.echo["output.dir"] = cfg.out_dir;
  cfg.echo["output.formats"] = formats;
  cfg.echo["output.pgm_binary"] = cfg.pgm_binary ? "true" : "false";
  cfg.echo["output.checkpoint_stride"] = std::to_string(cfg.checkpoint_stride);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string render_config(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& [k, v] : cfg.echo) os << k << " = " << v << "\n";
  return os.str();
}

}  // namespace qulat
