#include "qulat/vacuum.hpp"

#include <cmath>
#include <stdexcept>

#include "qulat/rng.hpp"
#include "qulat/semiclassical.hpp"

namespace qulat {

MPSState product_vacuum(const QumodeGrid& g, const Potential& p, int n_sites,
                        ProductMethod method, const ProductVacuumOptions& opts) {
  if (n_sites < 1) throw std::invalid_argument("product_vacuum: need at least one site");
  double curv = p.curvature_fv();
  double omega = opts.omega_override > 0 ? opts.omega_override
                                         : (curv > 1e-4 ? std::sqrt(curv) : 1.0);
  double center = p.false_vacuum();

  LocalWavefunction local;
  if (method == ProductMethod::SHOGaussian) {
    local = sho_ground_state(g, omega, center);
  } else {
    Potential target = p.with_lift(opts.lift);
    local = adiabatic_prepare(g, omega, center, target, opts.m_adiabatic, opts.dt_adiabatic);
  }
  return MPSState(std::vector<LocalWavefunction>(n_sites, local));
}

FluctuationSample sample_fluctuations(double omega, int n_sites, double a,
                                      std::uint64_t seed, std::uint64_t sample_index,
                                      FluctuationForm form) {
  if (omega <= 0) throw std::invalid_argument("sample_fluctuations: omega must be > 0");
  if (n_sites < 1) throw std::invalid_argument("sample_fluctuations: bad N");
  CounterRng rng(seed, sample_index);
  std::vector<double> eta(n_sites), etap(n_sites);
  for (auto& x : eta) x = rng.next_normal();
  for (auto& x : etap) x = rng.next_normal();

  FluctuationSample f;
  f.seed = seed;
  f.sample_index = sample_index;
  f.dq.assign(n_sites, 0.0);
  f.dp.assign(n_sites, 0.0);
  const double norm = 1.0 / std::sqrt(2.0 * n_sites);
  // eta_a = eta_{N-a}: one draw per cosine mode, interior amplitudes doubled.
  for (int alpha = 0; alpha <= n_sites / 2; ++alpha) {
    double wa = dispersion(omega, a, n_sites, alpha);
    double wq, wp;
    if (form == FluctuationForm::Difference) {
      wq = std::sqrt(std::max(1.0 / omega - 1.0 / wa, 0.0));
      wp = std::sqrt(std::max(wa - omega, 0.0));
    } else {
      wq = std::sqrt(1.0 / wa);
      wp = std::sqrt(wa);
    }
    double pair = (alpha == 0 || 2 * alpha == n_sites) ? 1.0 : 2.0;
    wq *= norm * pair;
    wp *= norm * pair;
    if (wq == 0.0 && wp == 0.0) continue;
    for (int n = 0; n < n_sites; ++n) {
      double c = std::cos(2.0 * M_PI * double(n) * double(alpha) / n_sites);
      f.dq[n] += wq * c * eta[alpha];
      f.dp[n] += wp * c * etap[alpha];
    }
  }
  return f;
}

void apply_fluctuations(MPSState& s, const QumodeGrid& g, const FluctuationSample& f,
                        double omega, double phi_fv) {
  if (static_cast<int>(f.dq.size()) != s.size())
    throw std::invalid_argument("apply_fluctuations: sample length mismatch");
  std::vector<LocalWavefunction> locals;
  locals.reserve(s.size());
  for (int n = 0; n < s.size(); ++n) {
    LocalWavefunction psi = sho_ground_state(g, omega, phi_fv + f.dq[n]);
    for (int j = 0; j < g.d; ++j)
      psi.amplitudes[j] *= std::exp(Complex(0.0, f.dp[n] * g.points[j]));
    locals.push_back(std::move(psi));
  }
  s = MPSState(locals);
}

MatrixXd covariance_matrix(MPSState& s, const QumodeGrid& g) {
  const int n_sites = s.size();
  MatrixXcd q = position_operator(g).matrix;
  auto means = s.site_expectations(q);

  MatrixXd c(n_sites, n_sites);
  for (int n = 0; n < n_sites; ++n) {
    auto row = s.correlation_row(n, q, q);
    for (int m = n; m < n_sites; ++m) {
      double v = row[m - n].real() - means[n].real() * means[m].real();
      c(n, m) = v;
      c(m, n) = v;
    }
  }
  return 0.5 * (c + c.transpose());
}

VectorXd momentum_spectrum(const MatrixXd& c) {
  const int n = static_cast<int>(c.rows());
  if (c.cols() != n) throw std::invalid_argument("momentum_spectrum: matrix not square");
  double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8)
    throw std::invalid_argument("momentum_spectrum: matrix not symmetric");

  VectorXd out(n);
  for (int alpha = 0; alpha < n; ++alpha) {
    double re = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        re += c(i, j) * std::cos(2.0 * M_PI * alpha * double(i - j) / n);
    out[alpha] = re / n;
  }
  return out;
}

namespace {

// For fixed m, the best c0 is the mean residual; returns (c0, sse).
std::pair<double, double> fit_offset(const VectorXd& spectrum, const VectorXd& model) {
  double c0 = (spectrum - model).mean();
  double sse = (spectrum - model).array().matrix().squaredNorm() -
               spectrum.size() * c0 * c0;
  return {c0, sse};
}

VectorXd dispersion_model(double m, double a, int n) {
  VectorXd v(n);
  for (int alpha = 0; alpha < n; ++alpha) {
    double s = std::sin(M_PI * alpha / double(n));
    v[alpha] = 0.5 / std::sqrt(m * m + 4.0 / (a * a) * s * s);
  }
  return v;
}

}  // namespace

CovarianceFit fit_dispersion(const VectorXd& spectrum, double a, int n_sites,
                             double residual_threshold) {
  if (spectrum.size() != n_sites)
    throw std::invalid_argument("fit_dispersion: spectrum length mismatch");
  CovarianceFit fit;
  fit.c_values = spectrum;
  fit.k_values.resize(n_sites);
  for (int alpha = 0; alpha < n_sites; ++alpha)
    fit.k_values[alpha] = 2.0 * M_PI * alpha / (a * n_sites);

  double best_m = 0.0, best_c0 = 0.0, best_sse = std::numeric_limits<double>::max();
  for (double m = 0.05; m <= 5.0 + 1e-12; m += 1e-3) {
    auto [c0, sse] = fit_offset(spectrum, dispersion_model(m, a, n_sites));
    if (sse < best_sse) {
      best_sse = sse;
      best_m = m;
      best_c0 = c0;
    }
  }
  // Bounded golden-section refinement around the best grid point.
  double lo = std::max(best_m - 2e-3, 1e-4), hi = best_m + 2e-3;
  const double gr = 0.6180339887498949;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  auto sse_at = [&](double m) { return fit_offset(spectrum, dispersion_model(m, a, n_sites)).second; };
  double f1 = sse_at(x1), f2 = sse_at(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - gr * (hi - lo); f1 = sse_at(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + gr * (hi - lo); f2 = sse_at(x2);
    }
  }
  best_m = 0.5 * (lo + hi);
  auto [c0, sse] = fit_offset(spectrum, dispersion_model(best_m, a, n_sites));
  fit.m = best_m;
  fit.c0 = c0;
  fit.residual = std::sqrt(std::max(sse, 0.0) / n_sites);
  fit.converged = fit.residual < residual_threshold;
  return fit;
}

double discretized_potential_mass(const QumodeGrid& g, const Potential& p,
                                  double center, double window) {
  // Quartic polynomial least squares on grid points within the window.
  std::vector<double> xs, ys;
  for (int j = 0; j < g.d; ++j) {
    double x = g.points[j] - center;
    if (std::abs(x) <= window) {
      xs.push_back(x);
      ys.push_back(p.value(g.points[j]));
    }
  }
  if (xs.size() < 6)
    throw std::invalid_argument("discretized_potential_mass: window too narrow");
  const int n = static_cast<int>(xs.size());
  MatrixXd van(n, 5);
  VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    double xp = 1.0;
    for (int k = 0; k < 5; ++k) {
      van(i, k) = xp;
      xp *= xs[i];
    }
    rhs[i] = ys[i];
  }
  VectorXd coef = van.colPivHouseholderQr().solve(rhs);
  // Minimum of the fitted polynomial near 0, then its second derivative there.
  double x = 0.0;
  for (int it = 0; it < 50; ++it) {
    double g1 = coef[1] + 2 * coef[2] * x + 3 * coef[3] * x * x + 4 * coef[4] * x * x * x;
    double g2 = 2 * coef[2] + 6 * coef[3] * x + 12 * coef[4] * x * x;
    if (std::abs(g2) < 1e-12) break;
    double stepx = g1 / g2;
    x -= stepx;
    if (std::abs(stepx) < 1e-14) break;
  }
  double curv = 2 * coef[2] + 6 * coef[3] * x + 12 * coef[4] * x * x;
  if (curv <= 0) throw std::runtime_error("discretized_potential_mass: non-convex fit");
  return std::sqrt(curv);
}

}  // namespace qulat
