#include "qulat/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qulat {

double dispersion(double omega, double a, int n_sites, int alpha) {
  if (alpha < 0 || alpha >= n_sites)
    throw std::out_of_range("dispersion: mode index out of range");
  double s = std::sin(M_PI * alpha / double(n_sites));
  return std::sqrt(omega * omega + 4.0 / (a * a) * s * s);
}

namespace {

// Dormand-Prince 5(4) step for y' = f(r, y), y = (phi, dphi).
struct Deriv {
  const Potential& p;
  void operator()(double r, const double y[2], double dy[2]) const {
    dy[0] = y[1];
    dy[1] = p.d1(y[0]) - y[1] / std::max(r, 1e-300);
  }
};

struct StepResult {
  double y[2];
  double err;
};

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

StepResult dopri_step(const Deriv& f, double r, const double y[2], double h,
                      double k1[2]) {
  double k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], yt[2];
  for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * a21 * k1[i];
  f(r + c2 * h, yt, k2);
  for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  f(r + c3 * h, yt, k3);
  for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  f(r + c4 * h, yt, k4);
  for (int i = 0; i < 2; ++i)
    yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  f(r + c5 * h, yt, k5);
  for (int i = 0; i < 2; ++i)
    yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  f(r + h, yt, k6);
  StepResult out;
  for (int i = 0; i < 2; ++i)
    out.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  f(r + h, out.y, k7);
  out.err = 0.0;
  for (int i = 0; i < 2; ++i) {
    double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                    e7 * k7[i]);
    double sc = 1e-12 + 1e-10 * std::max(std::abs(y[i]), std::abs(out.y[i]));
    out.err = std::max(out.err, std::abs(e) / sc);
  }
  for (int i = 0; i < 2; ++i) k1[i] = k7[i];  // FSAL
  return out;
}

enum class ShotKind { Overshoot, Undershoot, Landed };

struct Shot {
  ShotKind kind;
  std::vector<double> r, phi, dphi;
};

// Integrate one release from near r = 0. A trajectory undershoots when the
// velocity reverses after passing the barrier top, overshoots when it crosses
// the false vacuum, and lands when it survives to r_max within tol of it.
Shot shoot(const Potential& p, double phi_start, double phi_fv, double barrier,
           double r_max, double tol, bool record, double dr_record) {
  Deriv f{p};
  double r = 1e-8;
  double y[2] = {phi_start + p.d1(phi_start) * r * r / 4.0, p.d1(phi_start) * r / 2.0};
  double k1[2];
  f(r, y, k1);
  double h = 1e-4;

  Shot shot;
  shot.kind = ShotKind::Landed;
  double next_rec = 0.0;
  auto record_point = [&](double rr, double ph, double dph) {
    if (!record) return;
    shot.r.push_back(rr);
    shot.phi.push_back(ph);
    shot.dphi.push_back(dph);
  };
  if (record) {
    record_point(0.0, phi_start, 0.0);
    next_rec = dr_record;
  }

  const double side = (phi_fv < phi_start) ? 1.0 : -1.0;  // rolling downward in phi
  while (r < r_max) {
    h = std::min(h, r_max - r);
    StepResult s = dopri_step(f, r, y, h, k1);
    if (s.err > 1.0) {
      f(r, y, k1);  // restore k1 after rejected step
      h *= std::max(0.2, 0.9 * std::pow(s.err, -0.25));
      continue;
    }
    double r_new = r + h;
    // Record at fixed strides (linear interpolation inside the step).
    while (record && next_rec <= r_new) {
      double w = (next_rec - r) / h;
      record_point(next_rec, y[0] * (1 - w) + s.y[0] * w, y[1] * (1 - w) + s.y[1] * w);
      next_rec += dr_record;
    }
    r = r_new;
    y[0] = s.y[0];
    y[1] = s.y[1];
    if (side * (phi_fv - y[0]) > tol) {
      shot.kind = ShotKind::Overshoot;
      break;
    }
    if (side * y[1] > 1e-13 && side * (y[0] - barrier) < 0.0) {
      shot.kind = ShotKind::Undershoot;
      break;
    }
    if (s.err > 1e-30) h *= std::min(5.0, 0.9 * std::pow(s.err, -0.2));
  }
  if (record) record_point(r, y[0], y[1]);
  return shot;
}

}  // namespace

BounceProfile bounce_profile(const Potential& p, double r_max, double tol) {
  if (!p.has_two_minima()) throw NoBounceError("bounce: potential has a single minimum");
  double fv = p.false_vacuum_exact();
  double tv = p.true_vacuum_exact();
  double top = p.barrier_top();
  double span = std::abs(tv - fv);
  if (tol <= 0) tol = 1e-6 * span;
  if (p.value(tv) >= p.value(fv) - 1e-14)
    throw NoBounceError("bounce: wells are degenerate or inverted");

  // The release bracket: just above the barrier top (undershoots) up to the
  // true vacuum (waits arbitrarily long, then overshoots). Probe for an
  // overshoot at the floating-point edge of the bracket; thinner walls need
  // exponentially finer release tuning, so this is the representable limit.
  double lo = top + 1e-6;
  double hi = tv;
  double probe = tv - std::max(1e-13 * span, 64 * std::numeric_limits<double>::epsilon() *
                                                 std::abs(tv));
  if (shoot(p, probe, fv, top, r_max, tol, false, 0).kind != ShotKind::Overshoot)
    throw NoBounceError("bounce: no overshoot found below the true vacuum; "
                        "wells too close to degenerate or r_max too small");

  const int max_bisections = 200;
  for (int it = 0; it < max_bisections; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    Shot s = shoot(p, mid, fv, top, r_max, tol, false, 0);
    if (s.kind == ShotKind::Overshoot)
      hi = mid;
    else
      lo = mid;
  }
  if (hi - lo > 1e-6 * span)
    throw NumericalFailure("bounce: bisection stalled, bracket [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]");

  double dr = std::min(0.05, r_max / 2000.0);
  Shot s = shoot(p, lo, fv, top, r_max, tol, true, dr);

  BounceProfile prof;
  prof.phi_escape = lo;
  prof.phi_fv = fv;
  // Clamp to the false vacuum beyond the closest approach; the fine-tuned
  // trajectory eventually diverges no matter how tight the bracket.
  size_t closest = 0;
  double best = std::numeric_limits<double>::max();
  for (size_t i = 0; i < s.phi.size(); ++i) {
    double dist = std::abs(s.phi[i] - fv);
    if (dist < best) {
      best = dist;
      closest = i;
    }
  }
  // Floating-point resolution of the release value can run out before the
  // trajectory reaches the false vacuum (very thin walls / huge radii).
  if (best > std::max(tol, 1e-4 * span))
    throw NumericalFailure(
        "bounce: release resolution exhausted before landing; closest approach " +
        std::to_string(best) + " at escape bracket [" + std::to_string(lo) + ", " +
        std::to_string(hi) + "]");
  double last_r = s.r.empty() ? 0.0 : s.r.back();
  for (size_t i = 0; i < s.phi.size(); ++i) {
    prof.r_values.push_back(s.r[i]);
    prof.phi_values.push_back(i <= closest ? s.phi[i] : fv);
  }
  for (double r = last_r + dr; r <= r_max + 1e-12; r += dr) {
    prof.r_values.push_back(r);
    prof.phi_values.push_back(fv);
  }

  // Wall fit on the normalized symmetric form.
  double c = 0.5 * (prof.phi_escape + fv);
  double w = 0.5 * (prof.phi_escape - fv);
  std::vector<double> norm(prof.phi_values.size());
  for (size_t i = 0; i < norm.size(); ++i) norm[i] = (prof.phi_values[i] - c) / w;
  WallFit fit = fit_wall(prof.r_values, norm, 1.0);
  prof.r0 = fit.r0;
  prof.beta = fit.beta;
  prof.s1 = instanton_action(p);
  return prof;
}

double instanton_action(const Potential& p, int quadrature_points) {
  if (quadrature_points < 32)
    throw std::invalid_argument("instanton_action: too few quadrature points");
  if (!p.has_two_minima())
    throw std::invalid_argument("instanton_action: single-well potential");
  double fv = p.false_vacuum_exact();
  double top = p.barrier_top();
  double tv = p.true_vacuum_exact();
  double vfv = p.value(fv);
  auto shifted = [&](double x) { return p.value(x) - vfv; };

  // Far-side zero of the shifted potential, bracketed in (top, tv).
  double a = top, b = tv;
  if (shifted(a) <= 0 || shifted(b) >= 0)
    throw NumericalFailure("instanton_action: no barrier crossing on the far side");
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (a + b);
    (shifted(m) > 0 ? a : b) = m;
  }
  double esc = 0.5 * (a + b);

  double span = esc - fv;
  auto integrand2 = [&](double x) {
    double v = shifted(x);
    if (v < -1e-12)
      throw NumericalFailure("instanton_action: potential dips below the false "
                             "vacuum level inside the wall path");
    return std::max(v, 0.0);
  };

  // Simpson with square-root substitutions on the first and last 10%.
  auto simpson = [](auto&& f, double x0, double x1, int n) {
    if (n % 2) ++n;
    double h = (x1 - x0) / n;
    double acc = f(x0) + f(x1);
    for (int i = 1; i < n; ++i) acc += f(x0 + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
  };
  double cut_lo = fv + 0.1 * span;
  double cut_hi = esc - 0.1 * span;
  int n_end = quadrature_points / 10;
  int n_mid = quadrature_points - 2 * n_end;

  // phi = fv + u^2  ->  d phi = 2u du
  double s_lo = simpson(
      [&](double u) { return 2.0 * u * std::sqrt(2.0 * integrand2(fv + u * u)); }, 0.0,
      std::sqrt(cut_lo - fv), n_end);
  double s_mid = simpson([&](double x) { return std::sqrt(2.0 * integrand2(x)); },
                         cut_lo, cut_hi, n_mid);
  // phi = esc - u^2
  double s_hi = simpson(
      [&](double u) { return 2.0 * u * std::sqrt(2.0 * integrand2(esc - u * u)); }, 0.0,
      std::sqrt(esc - cut_hi), n_end);
  return s_lo + s_mid + s_hi;
}

double critical_radius(double s1, double phi0, double eps) {
  if (s1 == 0.0) return 0.0;
  if (phi0 <= 0 || eps <= 0)
    throw std::invalid_argument("critical_radius: phi0 and eps must be > 0");
  return s1 / (2.0 * phi0 * eps);
}

WallFit fit_wall(const std::vector<double>& r, const std::vector<double>& phi,
                 double phi0) {
  if (r.size() != phi.size() || r.size() < 8)
    throw std::invalid_argument("fit_wall: bad profile");
  // Initialization: zero crossing and 10-90% width of the drop.
  double r_cross = -1.0, r_hi = -1.0, r_lo = -1.0;
  for (size_t i = 1; i < r.size(); ++i) {
    auto cross = [&](double level) -> double {
      double f0 = phi[i - 1] - level, f1 = phi[i] - level;
      if (f0 > 0 && f1 <= 0) return r[i - 1] + (r[i] - r[i - 1]) * f0 / (f0 - f1);
      return -1.0;
    };
    if (r_hi < 0) r_hi = cross(0.8 * phi0);
    if (r_cross < 0) r_cross = cross(0.0);
    if (r_lo < 0) r_lo = cross(-0.8 * phi0);
  }
  if (r_cross < 0) throw NoCrossingError("fit_wall: profile never crosses the mid-value");
  double width = (r_hi >= 0 && r_lo > r_hi) ? (r_lo - r_hi) : 1.0;
  double r0 = r_cross;
  double beta = 2.197224577 / std::max(width, 1e-6);

  // Gauss-Newton with step damping.
  for (int it = 0; it < 200; ++it) {
    double jtj[2][2] = {{0, 0}, {0, 0}};
    double jtr[2] = {0, 0};
    for (size_t i = 0; i < r.size(); ++i) {
      double u = beta * (r[i] - r0);
      double th = std::tanh(u);
      double sech2 = 1.0 - th * th;
      double res = -phi0 * th - phi[i];
      double d_r0 = phi0 * beta * sech2;
      double d_beta = -phi0 * (r[i] - r0) * sech2;
      jtj[0][0] += d_r0 * d_r0;
      jtj[0][1] += d_r0 * d_beta;
      jtj[1][1] += d_beta * d_beta;
      jtr[0] += d_r0 * res;
      jtr[1] += d_beta * res;
    }
    jtj[1][0] = jtj[0][1];
    double det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[0][1];
    if (std::abs(det) < 1e-300) break;
    double dr0 = -(jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
    double dbeta = -(-jtj[0][1] * jtr[0] + jtj[0][0] * jtr[1]) / det;
    r0 += dr0;
    beta += dbeta;
    if (std::abs(dr0) < 1e-12 && std::abs(dbeta) < 1e-12) break;
  }
  WallFit fit;
  fit.r0 = r0;
  fit.beta = beta;
  double sse = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    double res = -phi0 * std::tanh(beta * (r[i] - r0)) - phi[i];
    sse += res * res;
  }
  fit.rms = std::sqrt(sse / r.size());
  return fit;
}

namespace {

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  size_t i = static_cast<size_t>(it - xs.begin());
  double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] * (1 - w) + ys[i] * w;
}

}  // namespace

NegativeMode negative_mode(const Potential& p, const BounceProfile& bounce,
                           int n_sites, double a, double x_center, double h_max) {
  if (bounce.r_values.empty()) throw std::invalid_argument("negative_mode: empty profile");
  double r_max = bounce.r_values.back();
  double h = std::min(h_max, a);
  int m = static_cast<int>(std::floor(r_max / h)) - 1;
  if (m < 16) throw std::invalid_argument("negative_mode: profile too short");

  // Radial s-wave operator on the half-offset grid r_i = (i + 1/2) h:
  //   (A chi)_i = -(chi_{i+1} - 2 chi_i + chi_{i-1})/h^2
  //               -(chi_{i+1} - chi_{i-1})/(2 h r_i) + v''(phi_B(r_i)) chi_i
  // with a reflecting inner boundary. Symmetrized by a diagonal similarity
  // (off-diagonal products are positive), so a self-adjoint solver applies.
  VectorXd diag(m), upper(m - 1), lower(m - 1);
  for (int i = 0; i < m; ++i) {
    double r = (i + 0.5) * h;
    double phi = interp(bounce.r_values, bounce.phi_values, r);
    diag[i] = 2.0 / (h * h) + p.d2(phi);
    if (i + 1 < m) {
      upper[i] = -1.0 / (h * h) - 1.0 / (2.0 * h * r);
      lower[i] = -1.0 / (h * h) + 1.0 / (2.0 * h * ((i + 1.5) * h));
    }
  }
  // Inner boundary: ghost chi_{-1} = chi_0 (zero slope at the origin).
  diag[0] += -1.0 / (h * h) + 1.0 / (2.0 * h * (0.5 * h));

  MatrixXd sym = MatrixXd::Zero(m, m);
  VectorXd d_weights(m);
  d_weights[0] = 1.0;
  for (int i = 0; i + 1 < m; ++i)
    d_weights[i + 1] = d_weights[i] * std::sqrt(lower[i] / upper[i]);
  for (int i = 0; i < m; ++i) {
    sym(i, i) = diag[i];
    if (i + 1 < m) {
      double off = -std::sqrt(upper[i] * lower[i]);
      sym(i, i + 1) = off;
      sym(i + 1, i) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("negative_mode: eigensolve failed");
  const VectorXd& evals = es.eigenvalues();
  int n_neg = 0;
  for (int i = 0; i < m; ++i)
    if (evals[i] < 0) ++n_neg;
  if (evals[0] >= 0)
    throw NoNegativeModeError(
        "negative_mode: lowest eigenvalue " + std::to_string(evals[0]) +
        " is non-negative (subcritical or invalid background)");

  VectorXd u = es.eigenvectors().col(0);
  std::vector<double> r_grid(m), chi_rad(m);
  for (int i = 0; i < m; ++i) {
    r_grid[i] = (i + 0.5) * h;
    chi_rad[i] = u[i] / d_weights[i];
  }
  // Sign convention: positive at the wall peak.
  double peak = 0.0;
  for (double v : chi_rad)
    if (std::abs(v) > std::abs(peak)) peak = v;
  if (peak < 0)
    for (double& v : chi_rad) v = -v;

  NegativeMode mode;
  mode.eigenvalue = evals[0];
  mode.omega_minus = std::sqrt(-evals[0]);
  mode.negative_count = n_neg;
  mode.chi.resize(n_sites);
  double norm2 = 0.0;
  for (int n = 0; n < n_sites; ++n) {
    double r = std::abs(n * a - x_center);
    mode.chi[n] = (r > r_grid.back()) ? 0.0 : interp(r_grid, chi_rad, r);
    norm2 += mode.chi[n] * mode.chi[n];
  }
  if (norm2 <= 0) throw std::runtime_error("negative_mode: zero lattice profile");
  for (double& v : mode.chi) v /= std::sqrt(norm2);
  return mode;
}

NegativeMode negative_mode(const Potential& p, const std::vector<double>& phi_slice,
                           double a) {
  const int n = static_cast<int>(phi_slice.size());
  if (n < 8) throw std::invalid_argument("negative_mode: slice too short");
  double x_center = 0.5 * (n - 1) * a;
  // Fold the slice into a radial profile (right half).
  BounceProfile prof;
  prof.phi_fv = phi_slice.front();
  for (int i = 0; i <= (n - 1) / 2; ++i) {
    prof.r_values.push_back(i * a + (((n - 1) % 2) ? 0.5 * a : 0.0));
    prof.phi_values.push_back(phi_slice[(n - 1) / 2 + i]);
  }
  return negative_mode(p, prof, n, a, x_center);
}

std::vector<double> bubble_slice(const BounceProfile& bounce, int n_sites, double a,
                                 double x_center) {
  std::vector<double> out(n_sites);
  for (int n = 0; n < n_sites; ++n) {
    double r = std::abs(n * a - x_center);
    out[n] = (r >= bounce.r_values.back()) ? bounce.phi_fv
                                           : interp(bounce.r_values, bounce.phi_values, r);
  }
  return out;
}

std::vector<double> tanh_bubble_slice(double phi_fv, double phi_interior, double r0,
                                      double beta, int n_sites, double a,
                                      double x_center) {
  std::vector<double> out(n_sites);
  double amp = 0.5 * (phi_interior - phi_fv);
  for (int n = 0; n < n_sites; ++n) {
    double x = n * a - x_center;
    out[n] = phi_fv + amp * (std::tanh(beta * (x + r0)) - std::tanh(beta * (x - r0)));
  }
  return out;
}

namespace {

void accel(const std::vector<double>& phi, const Potential& p, double a,
           PdeBoundary bc, const std::vector<double>& pinned, std::vector<double>& out) {
  const int n = static_cast<int>(phi.size());
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    double lap;
    if (i == 0)
      lap = phi[1] - phi[0];
    else if (i == n - 1)
      lap = phi[n - 2] - phi[n - 1];
    else
      lap = phi[i + 1] - 2 * phi[i] + phi[i - 1];
    out[i] = lap / (a * a) - p.d1(phi[i]);
  }
  if (bc == PdeBoundary::Dirichlet) {
    out[0] = 0.0;
    out[n - 1] = 0.0;
    (void)pinned;
  }
}

}  // namespace

PdeResult classical_pde_evolve(const std::vector<double>& phi0,
                               const std::vector<double>& phidot0, const Potential& p,
                               double a, double dt, int steps, PdeBoundary bc,
                               int record_stride) {
  if (phi0.size() != phidot0.size() || phi0.size() < 3)
    throw std::invalid_argument("pde: bad initial data");
  if (dt >= a)
    throw std::invalid_argument("pde: time step must satisfy dt < a");
  if (record_stride < 1) record_stride = 1;

  std::vector<double> phi = phi0, phidot = phidot0, acc, acc2;
  accel(phi, p, a, bc, phi0, acc);
  PdeResult out;
  out.times.push_back(0.0);
  out.field.push_back(phi);
  for (int s = 1; s <= steps; ++s) {
    for (size_t i = 0; i < phi.size(); ++i) {
      phidot[i] += 0.5 * dt * acc[i];
      phi[i] += dt * phidot[i];
    }
    accel(phi, p, a, bc, phi0, acc2);
    for (size_t i = 0; i < phi.size(); ++i) phidot[i] += 0.5 * dt * acc2[i];
    acc.swap(acc2);
    if (s % record_stride == 0 || s == steps) {
      out.times.push_back(s * dt);
      out.field.push_back(phi);
    }
  }
  out.final_velocity = phidot;
  return out;
}

double pde_energy(const std::vector<double>& phi, const std::vector<double>& phidot,
                  const Potential& p, double a) {
  double e = 0.0;
  for (size_t i = 0; i < phi.size(); ++i) {
    e += 0.5 * phidot[i] * phidot[i] + p.value(phi[i]);
    if (i + 1 < phi.size()) {
      double g = (phi[i + 1] - phi[i]) / a;
      e += 0.5 * g * g;
    }
  }
  return e * a;
}

PdeResult euclidean_continuation(const std::vector<double>& phi_slice,
                                 const Potential& p, double a, double dtau, int steps,
                                 int record_stride) {
  if (phi_slice.size() < 3) throw std::invalid_argument("continuation: slice too short");
  if (dtau >= a) throw std::invalid_argument("continuation: dtau must be < a");
  if (record_stride < 1) record_stride = 1;
  double bound = 10.0 * std::max(std::abs(p.true_vacuum()), std::abs(p.false_vacuum()));

  const int n = static_cast<int>(phi_slice.size());
  std::vector<double> phi = phi_slice, phidot(n, 0.0), acc(n), acc2(n);
  auto euc_accel = [&](const std::vector<double>& f, std::vector<double>& out) {
    for (int i = 0; i < n; ++i) {
      double lap;
      if (i == 0)
        lap = f[1] - f[0];
      else if (i == n - 1)
        lap = f[n - 2] - f[n - 1];
      else
        lap = f[i + 1] - 2 * f[i] + f[i - 1];
      out[i] = -lap / (a * a) + p.d1(f[i]);
    }
  };
  euc_accel(phi, acc);
  PdeResult out;
  out.times.push_back(0.0);
  out.field.push_back(phi);
  for (int s = 1; s <= steps; ++s) {
    for (int i = 0; i < n; ++i) {
      phidot[i] += 0.5 * dtau * acc[i];
      phi[i] += dtau * phidot[i];
    }
    euc_accel(phi, acc2);
    for (int i = 0; i < n; ++i) phidot[i] += 0.5 * dtau * acc2[i];
    acc.swap(acc2);
    double m = 0.0;
    for (double v : phi) m = std::max(m, std::abs(v));
    if (m > bound) break;  // growing-mode blow-up; keep what we have
    if (s % record_stride == 0 || s == steps) {
      out.times.push_back(s * dtau);
      out.field.push_back(phi);
    }
  }
  out.final_velocity = phidot;
  return out;
}

WallDiagnostics wall_diagnostics(const std::vector<double>& times,
                                 const std::vector<double>& xs,
                                 const std::vector<std::vector<double>>& field,
                                 double phi_mid, double eps) {
  if (times.size() != field.size() || times.size() < 4)
    throw std::invalid_argument("wall_diagnostics: bad record");
  const int n = static_cast<int>(xs.size());

  WallDiagnostics diag;
  for (size_t t = 0; t < times.size(); ++t) {
    const auto& row = field[t];
    double left = std::numeric_limits<double>::quiet_NaN();
    double right = left;
    for (int i = 0; i + 1 < n; ++i) {
      bool up = row[i] < phi_mid && row[i + 1] >= phi_mid;
      bool dn = row[i] >= phi_mid && row[i + 1] < phi_mid;
      if (!up && !dn) continue;
      double w = (phi_mid - row[i]) / (row[i + 1] - row[i]);
      double x = xs[i] + w * (xs[i + 1] - xs[i]);
      if (std::isnan(left)) left = x;
      right = x;
    }
    if (std::isnan(left)) continue;
    diag.times.push_back(times[t]);
    diag.left_wall.push_back(left);
    diag.right_wall.push_back(right);
  }
  if (diag.times.size() < 4)
    throw NoCrossingError("wall_diagnostics: field never crosses the mid value");

  // Bubble center and signed radius of the right wall.
  double xc = 0.5 * (diag.left_wall.front() + diag.right_wall.front());
  std::vector<double> radius(diag.times.size());
  for (size_t i = 0; i < radius.size(); ++i) radius[i] = diag.right_wall[i] - xc;

  size_t i_max = 0;
  for (size_t i = 1; i < radius.size(); ++i)
    if (radius[i] > radius[i_max]) i_max = i;
  diag.reflection_index = static_cast<int>(i_max);

  // Straight-line fit over the final quarter of the pre-reflection window.
  size_t i0 = i_max - (i_max / 4);
  if (i_max < 3) throw NumericalFailure("wall_diagnostics: wall never advances");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t cnt = 0;
  for (size_t i = i0; i <= i_max; ++i, ++cnt) {
    sx += diag.times[i];
    sy += radius[i];
    sxx += diag.times[i] * diag.times[i];
    sxy += diag.times[i] * radius[i];
  }
  double denom = cnt * sxx - sx * sx;
  if (std::abs(denom) < 1e-300)
    throw NumericalFailure("wall_diagnostics: degenerate velocity fit");
  diag.v_term = (cnt * sxy - sx * sy) / denom;
  diag.superluminal = diag.v_term > 1.0;

  // Penetration depth after the elastic edge reflection, if any.
  if (i_max + 3 < radius.size()) {
    size_t i_turn = i_max;
    for (size_t i = i_max + 1; i < radius.size(); ++i)
      if (radius[i] < radius[i_turn]) i_turn = i;
    if (i_turn > i_max && radius[i_max] - radius[i_turn] > 0) {
      diag.d_bounce = radius[i_max] - radius[i_turn];
      if (diag.v_term > 0)
        diag.m_wall_estimate = 2.0 * eps * (*diag.d_bounce) / (diag.v_term * diag.v_term);
    }
  }
  return diag;
}

HyperbolaFit fit_hyperbola(const std::vector<double>& t, const std::vector<double>& x) {
  if (t.size() != x.size() || t.size() < 3)
    throw std::invalid_argument("fit_hyperbola: bad trajectory");
  auto sse = [&](double r0) {
    double acc = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
      double m = std::sqrt(r0 * r0 + t[i] * t[i]);
      acc += (x[i] - m) * (x[i] - m);
    }
    return acc;
  };
  double lo = 1e-6, hi = *std::max_element(x.begin(), x.end()) + 1.0;
  const double gr = 0.6180339887498949;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = sse(x1), f2 = sse(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - gr * (hi - lo); f1 = sse(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + gr * (hi - lo); f2 = sse(x2);
    }
  }
  HyperbolaFit fit;
  fit.r0 = 0.5 * (lo + hi);
  fit.rms = std::sqrt(sse(fit.r0) / t.size());
  return fit;
}

}  // namespace qulat
