// Command-line front end: config-driven runs, CSV/PGM/JSON outputs,
// checkpointing. Exit codes: 0 success, 2 config validation, 3 numerical
// failure, 4 I/O.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qulat/config.hpp"
#include "qulat/output.hpp"
#include "qulat/semiclassical.hpp"
#include "qulat/tebd.hpp"
#include "qulat/vacuum.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace qulat;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;       // overrides output.dir
  std::string checkpoint;    // input checkpoint path
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
};

struct RunContext {
  RunConfig cfg;
  fs::path out;
  json meta;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  fs::path path(const std::string& name) {
    outputs.push_back((out / name).string());
    return out / name;
  }
  void finish(const std::string& command) {
    meta["command"] = command;
    meta["version"] = version_string();
    meta["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json echo = json::object();
    for (const auto& [k, v] : cfg.echo) echo[k] = v;
    meta["config"] = echo;
    meta["outputs"] = outputs;
    std::ofstream os(out / (command + "_meta.json"));
    if (!os) throw IoError("cannot write metadata sidecar");
    os << meta.dump(2) << "\n";
    std::ofstream cfgout(out / (command + "_config.resolved"));
    if (!cfgout) throw IoError("cannot write resolved config");
    cfgout << render_config(cfg);
  }
};

RunContext make_context(const CliOptions& opts) {
  RunContext ctx{parse_config_file(opts.config_path), {}, json::object(), {}};
  if (!opts.out_dir.empty()) {
    ctx.cfg.out_dir = opts.out_dir;
    ctx.cfg.echo["output.dir"] = opts.out_dir;
  }
  if (opts.seed_set) {
    ctx.cfg.seed = opts.seed;
    ctx.cfg.echo["prep.seed"] = std::to_string(opts.seed);
  }
  ctx.out = ctx.cfg.out_dir;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw IoError("cannot create output directory '" + ctx.out.string() + "'");
  ctx.meta["seed"] = ctx.cfg.seed;
  return ctx;
}

QumodeGrid config_grid(const RunConfig& cfg) {
  return build_grid(cfg.d, cfg.resolved_half_width());
}

double prep_omega(const RunConfig& cfg) {
  if (cfg.omega0 > 0) return cfg.omega0;
  double curv = cfg.potential.curvature_fv();
  return curv > 1e-4 ? std::sqrt(curv) : 1.0;
}

LocalWavefunction initial_qumode(const RunConfig& cfg, const QumodeGrid& g) {
  double center = cfg.potential.false_vacuum();
  if (cfg.qumode_initial == "sho") return sho_ground_state(g, prep_omega(cfg), center);
  if (cfg.qumode_initial == "pt") {
    if (cfg.potential.kind() != PotentialKind::PoschlTeller)
      throw ConfigError("qumode.initial = pt needs a poschl_teller potential");
    double gamma = cfg.potential.param("gamma");
    int gi = static_cast<int>(std::lround(gamma));
    if (std::abs(gamma - gi) > 1e-9)
      throw ConfigError("qumode.initial = pt needs an integer gamma");
    return pt_eigenstate(g, cfg.potential.param("alpha"), gi, cfg.qumode_nu, center).state;
  }
  return adiabatic_prepare(g, prep_omega(cfg), center, cfg.lifted_potential(),
                           cfg.m_adiabatic, cfg.dt);
}

/// Initial lattice state per prep.method / bubble settings (no checkpoint).
MPSState initial_lattice_state(const RunConfig& cfg, const QumodeGrid& g, json& meta) {
  double omega = prep_omega(cfg);
  double fv = cfg.potential.false_vacuum();
  if (cfg.bubble_enabled) {
    double beta = cfg.bubble_beta;
    double interior = cfg.potential.true_vacuum_exact();
    if (beta <= 0) {
      BounceProfile prof = bounce_profile(cfg.potential, cfg.bounce_r_max, cfg.bounce_tol);
      beta = prof.beta;
      interior = prof.phi_escape;
    }
    meta["bubble"] = {{"r0", cfg.bubble_r0}, {"beta", beta}, {"interior", interior}};
    double xc = 0.5 * (cfg.n_sites - 1) * cfg.a;
    std::vector<double> centers = tanh_bubble_slice(cfg.potential.false_vacuum_exact(),
                                                    interior, cfg.bubble_r0, beta,
                                                    cfg.n_sites, cfg.a, xc);
    std::vector<LocalWavefunction> locals;
    for (double c : centers) locals.push_back(sho_ground_state(g, omega, c));
    return MPSState(locals);
  }

  ProductVacuumOptions popts;
  popts.omega_override = cfg.omega0;
  popts.m_adiabatic = cfg.m_adiabatic;
  popts.dt_adiabatic = cfg.dt;
  popts.lift = cfg.lift_spec();
  switch (cfg.prep_method) {
    case PrepMethod::ProductAdiabatic:
      return product_vacuum(g, cfg.potential, cfg.n_sites, ProductMethod::Adiabatic, popts);
    case PrepMethod::Sampled: {
      MPSState s = product_vacuum(g, cfg.potential, cfg.n_sites,
                                  ProductMethod::SHOGaussian, popts);
      FluctuationSample f = sample_fluctuations(omega, cfg.n_sites, cfg.a, cfg.seed,
                                                cfg.sample_index);
      apply_fluctuations(s, g, f, omega, fv);
      meta["sample_index"] = cfg.sample_index;
      return s;
    }
    case PrepMethod::ImaginaryTime:  // projection happens in the caller
    case PrepMethod::ProductSHO:
    default:
      return product_vacuum(g, cfg.potential, cfg.n_sites, ProductMethod::SHOGaussian,
                            popts);
  }
}

void write_record_files(RunContext& ctx, const EvolutionRecord& rec,
                        const std::string& stem) {
  const RunConfig& cfg = ctx.cfg;
  int n = cfg.n_sites;
  if (cfg.write_csv) {
    write_timeseries_csv(ctx.path(stem + "_field.csv").string(), rec.times,
                         rec.field_expectations, site_headers(n, "q"));
    write_timeseries_csv(ctx.path(stem + "_entropy.csv").string(), rec.times,
                         rec.entropies, site_headers(n - 1, "bond"));
    std::vector<std::vector<double>> trunc;
    for (size_t i = 0; i < rec.truncation_history.size(); ++i)
      trunc.push_back({rec.truncation_history[i], double(rec.max_bond_history[i])});
    write_timeseries_csv(ctx.path(stem + "_truncation.csv").string(), rec.times, trunc,
                         {"cumulative_truncation", "max_bond_dim"});
    if (!rec.energy_history.empty()) {
      std::vector<std::vector<double>> e;
      for (double v : rec.energy_history) e.push_back({v});
      write_timeseries_csv(ctx.path(stem + "_energy.csv").string(), rec.times, e,
                           {"energy"});
    }
  }
  if (cfg.write_pgm && rec.field_expectations.size() > 1)
    emit_heatmap(rec.field_expectations, ctx.path(stem + "_field.pgm").string(),
                 std::nullopt, cfg.pgm_binary);
  if (!rec.truncation_history.empty())
    ctx.meta["cumulative_truncation"] = rec.truncation_history.back();
  if (!rec.max_bond_history.empty()) ctx.meta["max_bond_dim"] = rec.max_bond_history.back();
}

void save_checkpoint(RunContext& ctx, MPSState& s, const QumodeGrid& g,
                     const std::string& name) {
  fs::path p = ctx.path(name);
  std::ofstream os(p, std::ios::binary);
  if (!os) throw IoError("cannot write checkpoint '" + p.string() + "'");
  s.save(os, g.L);
}

MPSState load_checkpoint(const RunConfig& cfg, const std::string& path,
                         const QumodeGrid& g) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint '" + path + "'");
  double half = 0.0;
  MPSState s = [&] {
    try {
      return MPSState::load(is, &half);
    } catch (const std::runtime_error& e) {
      throw IoError(std::string("checkpoint '") + path + "': " + e.what());
    }
  }();
  if (s.size() != cfg.n_sites || s.phys_dim() != cfg.d)
    throw ConfigError("checkpoint dimensions (N=" + std::to_string(s.size()) +
                      ", d=" + std::to_string(s.phys_dim()) +
                      ") do not match the config");
  if (std::abs(half - g.L) > 1e-12)
    throw ConfigError("checkpoint grid half-width does not match the config");
  return s;
}

json fit_to_json(const CovarianceFit& fit) {
  return {{"m", fit.m},
          {"c0", fit.c0},
          {"residual", fit.residual},
          {"converged", fit.converged}};
}

CovarianceFit measure_and_fit(RunContext& ctx, MPSState& s, const QumodeGrid& g) {
  MatrixXd c = covariance_matrix(s, g);
  VectorXd spec = momentum_spectrum(c);
  CovarianceFit fit = fit_dispersion(spec, ctx.cfg.a, ctx.cfg.n_sites);
  if (ctx.cfg.write_csv) {
    std::vector<std::vector<double>> crows;
    for (int i = 0; i < c.rows(); ++i) {
      std::vector<double> row(c.cols());
      for (int j = 0; j < c.cols(); ++j) row[j] = c(i, j);
      crows.push_back(std::move(row));
    }
    write_table_csv(ctx.path("covariance.csv").string(),
                    site_headers(ctx.cfg.n_sites, "q"), crows);
    std::vector<std::vector<double>> srows;
    for (int alpha = 0; alpha < spec.size(); ++alpha)
      srows.push_back({fit.k_values[alpha], spec[alpha]});
    write_table_csv(ctx.path("spectrum.csv").string(), {"k", "C"}, srows);
  }
  ctx.meta["covariance_fit"] = fit_to_json(fit);
  return fit;
}

// ---------------------------------------------------------------- commands

int cmd_qumode(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  const RunConfig& cfg = ctx.cfg;
  QumodeGrid g = config_grid(cfg);
  LocalWavefunction psi0 = initial_qumode(cfg, g);
  int steps = cfg.t_total > 0 ? static_cast<int>(std::ceil(cfg.t_total / cfg.dt - 1e-12)) : 0;
  QumodeTrajectory traj = evolve_qumode(psi0, cfg.potential, cfg.dt, steps,
                                        cfg.record_stride);
  if (cfg.write_csv) {
    std::vector<std::vector<double>> rows;
    for (const auto& rho : traj.densities)
      rows.emplace_back(rho.data(), rho.data() + rho.size());
    write_timeseries_csv(ctx.path("qumode_density.csv").string(), traj.times, rows,
                         grid_headers(g));
  }
  if (cfg.write_pgm && traj.densities.size() > 1) {
    std::vector<std::vector<double>> rows;
    for (const auto& rho : traj.densities)
      rows.emplace_back(rho.data(), rho.data() + rho.size());
    emit_heatmap(rows, ctx.path("qumode_density.pgm").string(), std::nullopt,
                 cfg.pgm_binary);
  }
  ctx.meta["steps"] = steps;
  ctx.finish("qumode");
  return 0;
}

int cmd_prepare(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  RunConfig& cfg = ctx.cfg;
  QumodeGrid g = config_grid(cfg);
  MPSState s = initial_lattice_state(cfg, g, ctx.meta);

  if (cfg.prep_method == PrepMethod::ImaginaryTime) {
    GateSet gates = build_gates(g, cfg.lifted_potential(), cfg.a, cfg.dtau,
                                EvolutionMode::Imaginary, cfg.ordering,
                                cfg.boundary_corrected);
    ImaginaryOptions iopts;
    iopts.max_steps = cfg.prep_max_steps;
    iopts.energy_tol = cfg.energy_tol;
    iopts.geometric_decay = cfg.geometric_decay;
    iopts.measure_stride = cfg.measure_stride;
    ImaginaryResult res = evolve_imaginary(s, gates, cfg.policy(), iopts);
    ctx.meta["imaginary_time"] = {{"converged", res.converged},
                                  {"final_energy", res.final_energy},
                                  {"final_dtau", res.final_dt},
                                  {"steps_measured", res.record.energy_history.size()}};
    write_record_files(ctx, res.record, "prepare");
    if (!res.converged)
      std::cerr << "warning: imaginary-time projection hit max_steps before the "
                   "energy plateau\n";
  }

  measure_and_fit(ctx, s, g);
  save_checkpoint(ctx, s, g, "vacuum.qmps");
  ctx.finish("prepare");
  return 0;
}

int cmd_evolve(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  RunConfig& cfg = ctx.cfg;
  QumodeGrid g = config_grid(cfg);
  MPSState s = opts.checkpoint.empty() ? initial_lattice_state(cfg, g, ctx.meta)
                                       : load_checkpoint(cfg, opts.checkpoint, g);
  if (cfg.kick_enabled) {
    BounceProfile prof = bounce_profile(cfg.potential, cfg.bounce_r_max, cfg.bounce_tol);
    double xc = 0.5 * (cfg.n_sites - 1) * cfg.a;
    NegativeMode mode = negative_mode(cfg.potential, prof, cfg.n_sites, cfg.a, xc);
    std::vector<double> profile(mode.chi.size());
    for (size_t i = 0; i < profile.size(); ++i) profile[i] = cfg.kick_p0 * mode.chi[i];
    momentum_kick(s, g, profile);
    ctx.meta["kick"] = {{"p0", cfg.kick_p0},
                        {"omega_minus", mode.omega_minus},
                        {"eigenvalue", mode.eigenvalue}};
  }
  GateSet gates = build_gates(g, cfg.potential, cfg.a, cfg.dt, EvolutionMode::Real,
                              cfg.ordering, cfg.boundary_corrected);
  EvolutionRecord rec = evolve_real(s, gates, cfg.policy(), cfg.t_total,
                                    cfg.record_stride);
  write_record_files(ctx, rec, "evolve");
  save_checkpoint(ctx, s, g, "final.qmps");
  ctx.finish("evolve");
  return 0;
}

int cmd_bounce(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  const RunConfig& cfg = ctx.cfg;
  BounceProfile prof = bounce_profile(cfg.potential, cfg.bounce_r_max, cfg.bounce_tol);
  double s1 = instanton_action(cfg.potential, cfg.quadrature_points);
  double rc;
  if (cfg.potential.kind() == PotentialKind::Quartic)
    rc = critical_radius(s1, cfg.potential.param("phi0"), cfg.potential.param("eps"));
  else
    rc = s1 / (cfg.potential.value(cfg.potential.false_vacuum_exact()) -
               cfg.potential.value(cfg.potential.true_vacuum_exact()));
  if (cfg.write_csv) {
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < prof.r_values.size(); ++i)
      rows.push_back({prof.r_values[i], prof.phi_values[i]});
    write_table_csv(ctx.path("bounce_profile.csv").string(), {"r", "phi"}, rows);
  }
  ctx.meta["bounce"] = {{"r0", prof.r0},
                        {"beta", prof.beta},
                        {"s1", s1},
                        {"r_c", rc},
                        {"phi_escape", prof.phi_escape}};
  std::cout << "r0 = " << prof.r0 << "\nbeta = " << prof.beta << "\nS1 = " << s1
            << "\nr_c = " << rc << "\n";
  ctx.finish("bounce");
  return 0;
}

int cmd_negative_mode(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  const RunConfig& cfg = ctx.cfg;
  BounceProfile prof = bounce_profile(cfg.potential, cfg.bounce_r_max, cfg.bounce_tol);
  double xc = 0.5 * (cfg.n_sites - 1) * cfg.a;
  NegativeMode mode = negative_mode(cfg.potential, prof, cfg.n_sites, cfg.a, xc);
  if (cfg.write_csv) {
    std::vector<std::vector<double>> rows;
    for (int n = 0; n < cfg.n_sites; ++n)
      rows.push_back({n * cfg.a, mode.chi[n]});
    write_table_csv(ctx.path("negative_mode.csv").string(), {"x", "chi"}, rows);
  }
  ctx.meta["negative_mode"] = {{"omega_minus", mode.omega_minus},
                               {"eigenvalue", mode.eigenvalue},
                               {"negative_count", mode.negative_count},
                               {"bounce_r0", prof.r0}};
  std::cout << "omega_minus = " << mode.omega_minus
            << "\neigenvalue = " << mode.eigenvalue
            << "\nnegative_count = " << mode.negative_count << "\n";
  ctx.finish("negative-mode");
  return 0;
}

int cmd_seed_instanton(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  RunConfig& cfg = ctx.cfg;
  QumodeGrid g = config_grid(cfg);
  if (opts.checkpoint.empty())
    throw ConfigError("seed-instanton requires --checkpoint with a prepared vacuum");
  MPSState s = load_checkpoint(cfg, opts.checkpoint, g);

  BounceProfile prof = bounce_profile(cfg.potential, cfg.bounce_r_max, cfg.bounce_tol);
  double xc = 0.5 * (cfg.n_sites - 1) * cfg.a;
  NegativeMode mode = negative_mode(cfg.potential, prof, cfg.n_sites, cfg.a, xc);
  MatrixXcd q = position_operator(g).matrix;
  auto base = s.site_expectations(q);
  std::vector<double> profile(mode.chi.size());
  for (size_t i = 0; i < profile.size(); ++i) profile[i] = cfg.kick_p0 * mode.chi[i];
  momentum_kick(s, g, profile);

  GateSet gates = build_gates(g, cfg.potential, cfg.a, cfg.dt, EvolutionMode::Real,
                              cfg.ordering, cfg.boundary_corrected);
  EvolutionRecord rec = evolve_real(s, gates, cfg.policy(), cfg.t_total,
                                    cfg.record_stride);
  write_record_files(ctx, rec, "seed");

  // Growth curve: projection of the displacement onto the kick mode.
  std::vector<std::vector<double>> growth;
  for (size_t k = 0; k < rec.times.size(); ++k) {
    double proj = 0.0, max_dev = 0.0;
    for (int n = 0; n < cfg.n_sites; ++n) {
      double dev = rec.field_expectations[k][n] - base[n].real();
      proj += mode.chi[n] * dev;
      max_dev = std::max(max_dev, std::abs(dev));
    }
    growth.push_back({proj, std::log(std::abs(proj) + 1e-300), max_dev});
  }
  if (cfg.write_csv)
    write_timeseries_csv(ctx.path("seed_growth.csv").string(), rec.times, growth,
                         {"mode_amplitude", "log_abs_amplitude", "max_site_deviation"});
  ctx.meta["kick"] = {{"p0", cfg.kick_p0},
                      {"omega_minus", mode.omega_minus},
                      {"negative_count", mode.negative_count}};
  save_checkpoint(ctx, s, g, "final.qmps");
  ctx.finish("seed-instanton");
  return 0;
}

int cmd_fit_covariance(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  QumodeGrid g = config_grid(ctx.cfg);
  if (opts.checkpoint.empty())
    throw ConfigError("fit-covariance requires --checkpoint");
  MPSState s = load_checkpoint(ctx.cfg, opts.checkpoint, g);
  CovarianceFit fit = measure_and_fit(ctx, s, g);
  std::cout << "m = " << fit.m << "\nC0 = " << fit.c0
            << "\nresidual = " << fit.residual << "\n";
  ctx.finish("fit-covariance");
  return 0;
}

int cmd_pde(const CliOptions& opts) {
  RunContext ctx = make_context(opts);
  const RunConfig& cfg = ctx.cfg;
  double fv = cfg.potential.false_vacuum_exact();
  double xc = 0.5 * (cfg.n_sites - 1) * cfg.a;
  std::vector<double> phi(cfg.n_sites, fv);
  if (cfg.bubble_enabled) {
    double beta = cfg.bubble_beta;
    double interior = cfg.potential.true_vacuum_exact();
    if (beta <= 0) {
      BounceProfile prof = bounce_profile(cfg.potential, cfg.bounce_r_max, cfg.bounce_tol);
      beta = prof.beta;
      interior = prof.phi_escape;
    }
    phi = tanh_bubble_slice(fv, interior, cfg.bubble_r0, beta, cfg.n_sites, cfg.a, xc);
  }
  std::vector<double> phidot(cfg.n_sites, 0.0);
  int steps = cfg.t_total > 0 ? static_cast<int>(std::ceil(cfg.t_total / cfg.dt - 1e-12)) : 0;
  PdeResult res = classical_pde_evolve(phi, phidot, cfg.potential, cfg.a, cfg.dt, steps,
                                       cfg.pde_bc, cfg.record_stride);
  if (cfg.write_csv)
    write_timeseries_csv(ctx.path("pde_field.csv").string(), res.times, res.field,
                         site_headers(cfg.n_sites, "q"));
  if (cfg.write_pgm && res.field.size() > 1)
    emit_heatmap(res.field, ctx.path("pde_field.pgm").string(), std::nullopt,
                 cfg.pgm_binary);
  try {
    std::vector<double> xs(cfg.n_sites);
    for (int i = 0; i < cfg.n_sites; ++i) xs[i] = i * cfg.a;
    double eps = 0.0;
    try {
      eps = cfg.potential.param("eps");
    } catch (const std::exception&) {
    }
    WallDiagnostics diag = wall_diagnostics(res.times, xs, res.field,
                                            cfg.potential.barrier_top(), eps);
    ctx.meta["walls"] = {{"v_term", diag.v_term},
                         {"superluminal", diag.superluminal}};
    if (diag.d_bounce) ctx.meta["walls"]["d_bounce"] = *diag.d_bounce;
    if (diag.m_wall_estimate) ctx.meta["walls"]["m_wall_estimate"] = *diag.m_wall_estimate;
  } catch (const NumericalFailure&) {
    // No wall to diagnose; field output already written.
  }
  ctx.finish("pde");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qumode-lattice scalar field simulator"};
  app.require_subcommand(1);

  CliOptions opts;
  app.add_option("--config", opts.config_path, "run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", opts.out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", opts.threads, "bound on intra-run parallelism");
  app.add_option("--checkpoint", opts.checkpoint, "input MPS checkpoint");
  auto* seed_opt = app.add_option("--seed", opts.seed, "override prep.seed");

  auto* sub_qumode = app.add_subcommand("qumode", "single-qumode split-step evolution");
  auto* sub_prepare = app.add_subcommand("prepare", "lattice vacuum preparation");
  auto* sub_evolve = app.add_subcommand("evolve", "real-time lattice evolution");
  auto* sub_bounce = app.add_subcommand("bounce", "radial saddle profile and action");
  auto* sub_negmode = app.add_subcommand("negative-mode", "unstable mode of the saddle");
  auto* sub_seed = app.add_subcommand("seed-instanton", "kick the vacuum and evolve");
  auto* sub_fitcov = app.add_subcommand("fit-covariance", "covariance fit of a checkpoint");
  auto* sub_pde = app.add_subcommand("pde", "classical reference evolution");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  opts.seed_set = seed_opt->count() > 0;

  try {
    if (sub_qumode->parsed()) return cmd_qumode(opts);
    if (sub_prepare->parsed()) return cmd_prepare(opts);
    if (sub_evolve->parsed()) return cmd_evolve(opts);
    if (sub_bounce->parsed()) return cmd_bounce(opts);
    if (sub_negmode->parsed()) return cmd_negative_mode(opts);
    if (sub_seed->parsed()) return cmd_seed_instanton(opts);
    if (sub_fitcov->parsed()) return cmd_fit_covariance(opts);
    if (sub_pde->parsed()) return cmd_pde(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
