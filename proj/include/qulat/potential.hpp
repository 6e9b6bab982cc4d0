#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace qulat {

enum class PotentialKind { SHO, Quartic, DoubleTanh, PoschlTeller };

enum class LiftKind { None, Gaussian, DropTrueWell };

/// Auxiliary term that raises the true minimum during state preparation so
/// the prepared state cannot relax into it.
struct LiftSpec {
  LiftKind kind = LiftKind::None;
  double delta = 0.0;  // Gaussian lift height parameter, > 0
};

/// Scalar potential families:
///   SHO          v = omega^2/2 (phi - center)^2
///   Quartic      v = lambda/4! (phi^2 - phi0^2)^2 - eps phi - v0
///   DoubleTanh   v = lambda/l! tanh(mu^-l (phi-fv)^l)
///                    + (lambda/l! + eps) (tanh(mu^-l (phi-tv)^l) - 1)
///   PoschlTeller v = a2 g(g+1)/2 tanh^2(alpha (phi-fv))
///                    - (a2 g(g+1)/2 + eps) sech^2(alpha (phi-tv))
/// with v(fv) ~ 0 and v(tv) below it for the asymmetric families.
/// Values and the first two derivatives are closed-form.
class Potential {
 public:
  static Potential sho(double omega, double center);
  static Potential quartic(double lambda, double phi0, double eps,
                           std::optional<double> v0 = std::nullopt);
  static Potential double_tanh(double lambda, double mu, int ell, double phi_fv,
                               double phi_tv, double eps);
  static Potential poschl_teller(double alpha, double gamma, double phi_fv,
                                 double phi_tv, double eps);

  /// Construct from a kind string and a flat table of named parameters, as
  /// declared in run-config files. Unknown or missing names are a hard error.
  static Potential from_params(std::string_view kind,
                               const std::map<std::string, double>& params);

  Potential with_lift(LiftSpec lift) const;
  Potential without_lift() const;

  double value(double phi) const;
  double d1(double phi) const;
  double d2(double phi) const;

  PotentialKind kind() const { return kind_; }
  const LiftSpec& lift() const { return lift_; }
  double param(const std::string& name) const;

  /// Nominal vacuum locations (-phi0/+phi0 for the quartic, the declared
  /// phi_fv/phi_tv otherwise, center for the SHO).
  double false_vacuum() const;
  double true_vacuum() const;
  /// Stationary points refined by Newton iteration from the nominal seeds.
  double false_vacuum_exact() const;
  double true_vacuum_exact() const;
  /// Location of the barrier maximum between the two vacua.
  double barrier_top() const;
  /// Curvature v'' at the (nominal) false vacuum.
  double curvature_fv() const;

  bool has_two_minima() const { return kind_ != PotentialKind::SHO; }

 private:
  Potential() = default;
  double base_value(double phi) const;
  double base_d1(double phi) const;
  double base_d2(double phi) const;
  double lift_value(double phi) const;
  double lift_d1(double phi) const;
  double lift_d2(double phi) const;
  double refine_stationary(double seed) const;

  PotentialKind kind_ = PotentialKind::SHO;
  LiftSpec lift_;
  std::map<std::string, double> params_;
};

/// On-site effective potential of the lattice Hamiltonian:
/// q -> c q^2/a^2 + v(q), with c = 1 everywhere under the uniform convention
/// and c = 1/2 at the chain ends when the open-boundary correction is on.
std::function<double(double)> effective_onsite(const Potential& p, double a,
                                               int site, int n_sites,
                                               bool boundary_corrected);

/// The c coefficient used by effective_onsite.
double onsite_coupling(int site, int n_sites, bool boundary_corrected);

}  // namespace qulat
