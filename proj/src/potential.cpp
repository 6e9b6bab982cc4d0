#include "qulat/potential.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace qulat {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double sech2(double x) {
  double c = std::cosh(x);
  return 1.0 / (c * c);
}

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("potential: " + msg); }

void require(bool ok, const std::string& msg) {
  if (!ok) bad(msg);
}

}  // namespace

Potential Potential::sho(double omega, double center) {
  require(omega > 0, "sho omega must be > 0");
  Potential p;
  p.kind_ = PotentialKind::SHO;
  p.params_ = {{"omega", omega}, {"center", center}};
  return p;
}

Potential Potential::quartic(double lambda, double phi0, double eps,
                             std::optional<double> v0) {
  require(lambda > 0, "quartic lambda must be > 0");
  require(phi0 > 0, "quartic phi0 must be > 0");
  Potential p;
  p.kind_ = PotentialKind::Quartic;
  p.params_ = {{"lambda", lambda},
               {"phi0", phi0},
               {"eps", eps},
               {"v0", v0.value_or(phi0 * eps)}};
  return p;
}

Potential Potential::double_tanh(double lambda, double mu, int ell, double phi_fv,
                                 double phi_tv, double eps) {
  require(lambda > 0, "double_tanh lambda must be > 0");
  require(mu > 0, "double_tanh mu must be > 0");
  require(ell >= 1, "double_tanh ell must be a positive integer");
  require(phi_fv < phi_tv, "double_tanh needs phi_fv < phi_tv");
  Potential p;
  p.kind_ = PotentialKind::DoubleTanh;
  p.params_ = {{"lambda", lambda}, {"mu", mu},        {"ell", double(ell)},
               {"phi_fv", phi_fv}, {"phi_tv", phi_tv}, {"eps", eps}};
  return p;
}

Potential Potential::poschl_teller(double alpha, double gamma, double phi_fv,
                                   double phi_tv, double eps) {
  require(alpha > 0, "poschl_teller alpha must be > 0");
  require(gamma > 0, "poschl_teller gamma must be > 0");
  require(phi_fv < phi_tv, "poschl_teller needs phi_fv < phi_tv");
  Potential p;
  p.kind_ = PotentialKind::PoschlTeller;
  p.params_ = {{"alpha", alpha},   {"gamma", gamma},  {"phi_fv", phi_fv},
               {"phi_tv", phi_tv}, {"eps", eps}};
  return p;
}

Potential Potential::from_params(std::string_view kind,
                                 const std::map<std::string, double>& params) {
  auto need = [&](std::initializer_list<const char*> names) {
    std::set<std::string> allowed(names.begin(), names.end());
    for (const auto& [k, v] : params)
      if (!allowed.count(k)) bad("unknown parameter '" + k + "' for kind '" + std::string(kind) + "'");
  };
  auto get = [&](const char* name) {
    auto it = params.find(name);
    if (it == params.end()) bad(std::string("missing parameter '") + name + "'");
    return it->second;
  };
  auto get_or = [&](const char* name, double dflt) {
    auto it = params.find(name);
    return it == params.end() ? dflt : it->second;
  };

  if (kind == "sho") {
    need({"omega", "center"});
    return sho(get("omega"), get_or("center", 0.0));
  }
  if (kind == "quartic") {
    need({"lambda", "phi0", "eps", "v0"});
    std::optional<double> v0;
    if (params.count("v0")) v0 = params.at("v0");
    return quartic(get("lambda"), get("phi0"), get("eps"), v0);
  }
  if (kind == "double_tanh") {
    need({"lambda", "mu", "ell", "phi_fv", "phi_tv", "eps"});
    double elld = get("ell");
    int ell = static_cast<int>(std::lround(elld));
    require(std::abs(elld - ell) < 1e-12, "ell must be an integer");
    return double_tanh(get("lambda"), get_or("mu", 1.0), ell, get("phi_fv"),
                       get("phi_tv"), get("eps"));
  }
  if (kind == "poschl_teller") {
    need({"alpha", "gamma", "phi_fv", "phi_tv", "eps"});
    return poschl_teller(get("alpha"), get("gamma"), get("phi_fv"),
                         get("phi_tv"), get("eps"));
  }
  bad("unknown potential kind '" + std::string(kind) + "'");
}

Potential Potential::with_lift(LiftSpec lift) const {
  if (lift.kind == LiftKind::Gaussian)
    require(lift.delta > 0, "gaussian lift needs delta > 0");
  if (lift.kind == LiftKind::DropTrueWell)
    require(kind_ == PotentialKind::DoubleTanh || kind_ == PotentialKind::PoschlTeller,
            "drop_true_well lift applies to double_tanh and poschl_teller only");
  Potential p = *this;
  p.lift_ = lift;
  return p;
}

Potential Potential::without_lift() const {
  Potential p = *this;
  p.lift_ = LiftSpec{};
  return p;
}

double Potential::param(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) bad("no parameter '" + name + "'");
  return it->second;
}

double Potential::base_value(double phi) const {
  switch (kind_) {
    case PotentialKind::SHO: {
      double w = params_.at("omega"), c = params_.at("center");
      double x = phi - c;
      return 0.5 * w * w * x * x;
    }
    case PotentialKind::Quartic: {
      double l = params_.at("lambda"), p0 = params_.at("phi0");
      double e = params_.at("eps"), v0 = params_.at("v0");
      double u = phi * phi - p0 * p0;
      return l / 24.0 * u * u - e * phi - v0;
    }
    case PotentialKind::DoubleTanh: {
      double l = params_.at("lambda"), mu = params_.at("mu"), e = params_.at("eps");
      int ell = static_cast<int>(params_.at("ell"));
      double fv = params_.at("phi_fv"), tv = params_.at("phi_tv");
      double c = l / factorial(ell);
      double u = std::pow(phi - fv, ell) / std::pow(mu, ell);
      double v = std::pow(phi - tv, ell) / std::pow(mu, ell);
      double first = c * std::tanh(u);
      double second = (c + e) * (std::tanh(v) - 1.0);
      if (lift_.kind == LiftKind::DropTrueWell) second = 0.0;
      return first + second;
    }
    case PotentialKind::PoschlTeller: {
      double al = params_.at("alpha"), g = params_.at("gamma"), e = params_.at("eps");
      double fv = params_.at("phi_fv"), tv = params_.at("phi_tv");
      double amp = al * al * g * (g + 1.0) / 2.0;
      double t = std::tanh(al * (phi - fv));
      double first = amp * t * t;
      double second = -(amp + e) * sech2(al * (phi - tv));
      if (lift_.kind == LiftKind::DropTrueWell) second = 0.0;
      return first + second;
    }
  }
  bad("unreachable");
}

double Potential::base_d1(double phi) const {
  switch (kind_) {
    case PotentialKind::SHO: {
      double w = params_.at("omega"), c = params_.at("center");
      return w * w * (phi - c);
    }
    case PotentialKind::Quartic: {
      double l = params_.at("lambda"), p0 = params_.at("phi0"), e = params_.at("eps");
      return l / 6.0 * phi * (phi * phi - p0 * p0) - e;
    }
    case PotentialKind::DoubleTanh: {
      double l = params_.at("lambda"), mu = params_.at("mu"), e = params_.at("eps");
      int ell = static_cast<int>(params_.at("ell"));
      double fv = params_.at("phi_fv"), tv = params_.at("phi_tv");
      double c = l / factorial(ell);
      double mun = std::pow(mu, ell);
      double xu = phi - fv, xv = phi - tv;
      double u = std::pow(xu, ell) / mun, v = std::pow(xv, ell) / mun;
      double du = ell * std::pow(xu, ell - 1) / mun;
      double dv = ell * std::pow(xv, ell - 1) / mun;
      double first = c * sech2(u) * du;
      double second = (c + e) * sech2(v) * dv;
      if (lift_.kind == LiftKind::DropTrueWell) second = 0.0;
      return first + second;
    }
    case PotentialKind::PoschlTeller: {
      double al = params_.at("alpha"), g = params_.at("gamma"), e = params_.at("eps");
      double fv = params_.at("phi_fv"), tv = params_.at("phi_tv");
      double amp = al * al * g * (g + 1.0) / 2.0;
      double tu = std::tanh(al * (phi - fv));
      double first = 2.0 * amp * tu * sech2(al * (phi - fv)) * al;
      double tv_ = std::tanh(al * (phi - tv));
      double second = 2.0 * (amp + e) * sech2(al * (phi - tv)) * tv_ * al;
      if (lift_.kind == LiftKind::DropTrueWell) second = 0.0;
      return first + second;
    }
  }
  bad("unreachable");
}

double Potential::base_d2(double phi) const {
  switch (kind_) {
    case PotentialKind::SHO: {
      double w = params_.at("omega");
      return w * w;
    }
    case PotentialKind::Quartic: {
      double l = params_.at("lambda"), p0 = params_.at("phi0");
      return l / 6.0 * (3.0 * phi * phi - p0 * p0);
    }
    case PotentialKind::DoubleTanh: {
      double l = params_.at("lambda"), mu = params_.at("mu"), e = params_.at("eps");
      int ell = static_cast<int>(params_.at("ell"));
      double fv = params_.at("phi_fv"), tv = params_.at("phi_tv");
      double c = l / factorial(ell);
      double mun = std::pow(mu, ell);
      auto term = [&](double x) {
        double u = std::pow(x, ell) / mun;
        double du = ell * std::pow(x, ell - 1) / mun;
        double ddu = (ell >= 2) ? ell * (ell - 1) * std::pow(x, ell - 2) / mun : 0.0;
        double s2 = sech2(u);
        return s2 * ddu - 2.0 * s2 * std::tanh(u) * du * du;
      };
      double first = c * term(phi - fv);
      double second = (c + e) * term(phi - tv);
      if (lift_.kind == LiftKind::DropTrueWell) second = 0.0;
      return first + second;
    }
    case PotentialKind::PoschlTeller: {
      double al = params_.at("alpha"), g = params_.at("gamma"), e = params_.at("eps");
      double fv = params_.at("phi_fv"), tv = params_.at("phi_tv");
      double amp = al * al * g * (g + 1.0) / 2.0;
      // d2/dphi2 tanh^2(al x) = 2 al^2 sech^2 (1 - 3 tanh^2) ... expand:
      // d/dx [2 tanh sech^2] = 2 sech^4 - 4 tanh^2 sech^2
      double xu = al * (phi - fv);
      double s2u = sech2(xu), t2u = std::tanh(xu) * std::tanh(xu);
      double first = amp * al * al * (2.0 * s2u * s2u - 4.0 * t2u * s2u);
      // d2/dx2 sech^2 = 4 tanh^2 sech^2 - 2 sech^4
      double xv = al * (phi - tv);
      double s2v = sech2(xv), t2v = std::tanh(xv) * std::tanh(xv);
      double second = -(amp + e) * al * al * (4.0 * t2v * s2v - 2.0 * s2v * s2v);
      if (lift_.kind == LiftKind::DropTrueWell) second = 0.0;
      return first + second;
    }
  }
  bad("unreachable");
}

// Gaussian lift (2+delta) phi_t eps exp(-(phi-phi_t)^2) centered on the true
// vacuum; for the quartic phi_t is the phi0 parameter itself.
double Potential::lift_value(double phi) const {
  if (lift_.kind != LiftKind::Gaussian) return 0.0;
  double pt = true_vacuum();
  double eps = params_.count("eps") ? params_.at("eps") : 0.0;
  double x = phi - pt;
  return (2.0 + lift_.delta) * pt * eps * std::exp(-x * x);
}

double Potential::lift_d1(double phi) const {
  if (lift_.kind != LiftKind::Gaussian) return 0.0;
  double pt = true_vacuum();
  double eps = params_.count("eps") ? params_.at("eps") : 0.0;
  double x = phi - pt;
  return (2.0 + lift_.delta) * pt * eps * std::exp(-x * x) * (-2.0 * x);
}

double Potential::lift_d2(double phi) const {
  if (lift_.kind != LiftKind::Gaussian) return 0.0;
  double pt = true_vacuum();
  double eps = params_.count("eps") ? params_.at("eps") : 0.0;
  double x = phi - pt;
  return (2.0 + lift_.delta) * pt * eps * std::exp(-x * x) * (4.0 * x * x - 2.0);
}

double Potential::value(double phi) const { return base_value(phi) + lift_value(phi); }
double Potential::d1(double phi) const { return base_d1(phi) + lift_d1(phi); }
double Potential::d2(double phi) const { return base_d2(phi) + lift_d2(phi); }

double Potential::false_vacuum() const {
  switch (kind_) {
    case PotentialKind::SHO: return params_.at("center");
    case PotentialKind::Quartic: return -params_.at("phi0");
    default: return params_.at("phi_fv");
  }
}

double Potential::true_vacuum() const {
  switch (kind_) {
    case PotentialKind::SHO: return params_.at("center");
    case PotentialKind::Quartic: return params_.at("phi0");
    default: return params_.at("phi_tv");
  }
}

double Potential::refine_stationary(double seed) const {
  double x = seed;
  for (int i = 0; i < 100; ++i) {
    double g = d1(x), h = d2(x);
    if (std::abs(h) < 1e-14) break;
    double step = g / h;
    x -= step;
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(x))) break;
  }
  return x;
}

double Potential::false_vacuum_exact() const { return refine_stationary(false_vacuum()); }
double Potential::true_vacuum_exact() const { return refine_stationary(true_vacuum()); }

double Potential::barrier_top() const {
  double a = false_vacuum_exact(), b = true_vacuum_exact();
  if (!(a < b)) bad("barrier_top needs two distinct vacua");
  // Coarse scan for the maximum, then Newton on d1.
  const int n = 400;
  double best = a, vbest = value(a);
  for (int i = 1; i < n; ++i) {
    double x = a + (b - a) * i / n;
    double v = value(x);
    if (v > vbest) { vbest = v; best = x; }
  }
  double x = best;
  for (int i = 0; i < 100; ++i) {
    double g = d1(x), h = d2(x);
    if (std::abs(h) < 1e-14) break;
    double step = g / h;
    x -= step;
    if (x <= a || x >= b) { x = best; break; }
    if (std::abs(step) < 1e-14 * (1.0 + std::abs(x))) break;
  }
  return x;
}

double Potential::curvature_fv() const { return d2(false_vacuum()); }

double onsite_coupling(int site, int n_sites, bool boundary_corrected) {
  if (site < 0 || site >= n_sites)
    throw std::out_of_range("onsite_coupling: site out of range");
  if (boundary_corrected && (site == 0 || site == n_sites - 1)) return 0.5;
  return 1.0;
}

std::function<double(double)> effective_onsite(const Potential& p, double a,
                                               int site, int n_sites,
                                               bool boundary_corrected) {
  if (a <= 0) throw std::invalid_argument("effective_onsite: a must be > 0");
  double c = onsite_coupling(site, n_sites, boundary_corrected);
  return [p, a, c](double q) { return c * q * q / (a * a) + p.value(q); };
}

}  // namespace qulat
