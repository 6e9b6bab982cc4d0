#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qulat/potential.hpp"
#include "qulat/semiclassical.hpp"
#include "qulat/tebd.hpp"
#include "qulat/vacuum.hpp"

namespace qulat {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PrepMethod { ProductSHO, ProductAdiabatic, Sampled, ImaginaryTime };

/// Parsed and validated run configuration. The file format is flat
/// "section.key = value" lines; '#' starts a comment; unknown keys are a
/// hard error with the offending line number.
struct RunConfig {
  // lattice
  int n_sites = 16;
  double a = 1.0;
  int d = 20;
  double half_width = 0.0;  // 0 = derive from the potential
  bool boundary_corrected = false;

  // potential
  Potential potential = Potential::sho(1.0, 0.0);
  std::string potential_kind = "sho";
  LiftKind lift_kind = LiftKind::None;

  // prep
  PrepMethod prep_method = PrepMethod::ProductSHO;
  int m_adiabatic = 600;
  double lift_delta = 4.0;
  std::uint64_t seed = 12345;
  int n_samples = 1;
  std::uint64_t sample_index = 0;
  double omega0 = 0.0;  // 0 = curvature-derived
  double dtau = 0.05;
  int prep_max_steps = 1500;
  double energy_tol = 1e-7;
  bool geometric_decay = false;
  int measure_stride = 1;

  // evolution
  double dt = 0.05;
  double t_total = 10.0;
  GateOrdering ordering = GateOrdering::OddEven;
  int chi_max = 64;
  double cutoff = 1e-10;
  int record_stride = 10;

  // seed_kick
  bool kick_enabled = false;
  double kick_p0 = 0.1;

  // bubble
  bool bubble_enabled = false;
  double bubble_r0 = 0.0;
  double bubble_beta = 0.0;  // 0 = take the bounce fit
  std::string bubble_profile = "tanh";

  // bounce
  double bounce_r_max = 80.0;
  double bounce_tol = 0.0;
  int quadrature_points = 2000;

  // pde
  PdeBoundary pde_bc = PdeBoundary::Neumann;

  // qumode
  std::string qumode_initial = "sho";
  int qumode_nu = 0;

  // output
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_pgm = true;
  bool pgm_binary = true;
  int checkpoint_stride = 0;

  /// Resolved key=value pairs, for the metadata echo and re-running.
  std::map<std::string, std::string> echo;

  LiftSpec lift_spec() const;
  /// Potential with the configured lift attached (for preparation stages).
  Potential lifted_potential() const;
  /// Grid half-width: configured value or the derived default.
  double resolved_half_width() const;
  TruncationPolicy policy() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");

/// Serialize the resolved configuration as a loadable config file.
std::string render_config(const RunConfig& cfg);

}  // namespace qulat
