#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qulat/semiclassical.hpp"
#include "qulat/vacuum.hpp"

using namespace qulat;
using qulat::testing::DenseSim;
using qulat::testing::free_ground_covariance;

TEST_CASE("product vacua") {
  Potential p = Potential::quartic(0.5, 2.0, 0.1);
  QumodeGrid g = build_grid(64, 6.0);
  SUBCASE("gaussian product sits at the false vacuum") {
    MPSState s = product_vacuum(g, p, 5, ProductMethod::SHOGaussian);
    MatrixXcd q = position_operator(g).matrix;
    auto means = s.site_expectations(q);
    for (const auto& m : means) CHECK(m.real() == doctest::Approx(-2.0).epsilon(2e-3));
  }
  SUBCASE("ramped product shifts right for the steep quartic") {
    Potential steep = Potential::quartic(1.0, 2.0, 0.1);
    ProductVacuumOptions opts;
    opts.lift = {LiftKind::Gaussian, 4.0};
    opts.m_adiabatic = 2000;
    opts.dt_adiabatic = 0.1;
    MPSState adiab = product_vacuum(g, steep, 3, ProductMethod::Adiabatic, opts);
    MPSState naive = product_vacuum(g, steep, 3, ProductMethod::SHOGaussian);
    MatrixXcd q = position_operator(g).matrix;
    CHECK(adiab.expectation(1, q).real() > naive.expectation(1, q).real());
  }
  SUBCASE("single site equals the local state") {
    MPSState s = product_vacuum(g, p, 1, ProductMethod::SHOGaussian);
    LocalWavefunction ref = sho_ground_state(g, std::sqrt(p.curvature_fv()), -2.0);
    VectorXcd dense = qulat::testing::mps_to_dense(s);
    CHECK((dense - ref.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("fluctuation sampling statistics") {
  const int n = 16;
  const double omega = 1.0, a = 1.0;

  SUBCASE("bit-reproducible from seed and index") {
    FluctuationSample f1 = sample_fluctuations(omega, n, a, 42, 7);
    FluctuationSample f2 = sample_fluctuations(omega, n, a, 42, 7);
    for (int i = 0; i < n; ++i) {
      CHECK(f1.dq[i] == f2.dq[i]);
      CHECK(f1.dp[i] == f2.dp[i]);
    }
    FluctuationSample f3 = sample_fluctuations(omega, n, a, 42, 8);
    bool all_same = true;
    for (int i = 0; i < n; ++i) all_same = all_same && f1.dq[i] == f3.dq[i];
    CHECK(!all_same);
  }
  SUBCASE("site variance matches the closed form") {
    const int samples = 10000;
    std::vector<double> var_q(n, 0.0), var_p(n, 0.0);
    for (int s = 0; s < samples; ++s) {
      FluctuationSample f = sample_fluctuations(omega, n, a, 99, s);
      for (int i = 0; i < n; ++i) {
        var_q[i] += f.dq[i] * f.dq[i];
        var_p[i] += f.dp[i] * f.dp[i];
      }
    }
    double tol = 5.0 / std::sqrt(double(samples));
    for (int i : {0, 3, 8}) {
      // One normal per cosine mode with doubled interior amplitude (the
      // reality pairing), so the mode sum runs to N/2.
      double expect_q = 0.0, expect_p = 0.0;
      for (int alpha = 0; alpha <= n / 2; ++alpha) {
        double wa = dispersion(omega, a, n, alpha);
        double c = std::cos(2.0 * M_PI * i * alpha / n);
        double pair = (alpha == 0 || 2 * alpha == n) ? 1.0 : 2.0;
        expect_q += pair * pair * (1.0 / omega - 1.0 / wa) * c * c / (2.0 * n);
        expect_p += pair * pair * (wa - omega) * c * c / (2.0 * n);
      }
      CHECK(std::abs(var_q[i] / samples - expect_q) < tol * expect_q);
      CHECK(std::abs(var_p[i] / samples - expect_p) < tol * expect_p);
    }
  }
  CHECK_THROWS_AS(sample_fluctuations(0.0, n, a, 1, 0), std::invalid_argument);
}

TEST_CASE("applying fluctuations moves the quadratures") {
  QumodeGrid g = build_grid(128, 4.0);
  const double omega = 1.0;
  SUBCASE("zero sample leaves the product state") {
    MPSState s = product_vacuum(g, Potential::sho(omega, 0.0), 3, ProductMethod::SHOGaussian);
    MPSState before = s;
    FluctuationSample zero;
    zero.dq.assign(3, 0.0);
    zero.dp.assign(3, 0.0);
    apply_fluctuations(s, g, zero, omega, 0.0);
    CHECK(std::abs(std::abs(s.inner(before)) - 1.0) < 1e-12);
  }
  SUBCASE("displacements shift <q> and <p>") {
    MPSState s = product_vacuum(g, Potential::sho(omega, 0.0), 2, ProductMethod::SHOGaussian);
    FluctuationSample f;
    f.dq = {0.3, -0.2};
    f.dp = {0.15, 0.0};
    apply_fluctuations(s, g, f, omega, 0.0);
    MatrixXcd q = position_operator(g).matrix;
    MatrixXcd pop = momentum_operator(g).matrix;
    CHECK(s.expectation(0, q).real() == doctest::Approx(0.3).epsilon(2e-3));
    CHECK(s.expectation(1, q).real() == doctest::Approx(-0.2).epsilon(2e-3));
    CHECK(s.expectation(0, pop).real() == doctest::Approx(0.15).epsilon(1e-2));
  }
}

TEST_CASE("covariance matrix") {
  QumodeGrid g = build_grid(5, 2.5);
  SUBCASE("product states have diagonal covariance") {
    MPSState s = product_vacuum(g, Potential::sho(1.0, 0.0), 4, ProductMethod::SHOGaussian);
    MatrixXd c = covariance_matrix(s, g);
    for (int i = 0; i < 4; ++i) {
      CHECK(c(i, i) >= 0.0);
      for (int j = i + 1; j < 4; ++j) CHECK(std::abs(c(i, j)) < 1e-12);
    }
  }
  SUBCASE("entangled states agree with the dense oracle") {
    auto locals = std::vector<LocalWavefunction>(4, sho_ground_state(g, 1.0, 0.3));
    MPSState s(locals);
    DenseSim dense(locals);
    std::mt19937_64 rng(13);
    std::normal_distribution<double> nd;
    for (int b = 0; b < 3; ++b) {
      MatrixXcd m(25, 25);
      for (int i = 0; i < 25; ++i)
        for (int j = 0; j < 25; ++j) m(i, j) = Complex(nd(rng), nd(rng));
      Eigen::HouseholderQR<MatrixXcd> qr(m);
      MatrixXcd u = qr.householderQ() * MatrixXcd::Identity(25, 25);
      s.apply_two_site(b, u, TruncationPolicy{0, 0.0});
      dense.apply_two(b, u);
    }
    MatrixXd c = covariance_matrix(s, g);
    MatrixXcd q = position_operator(g).matrix;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        double expect = dense.correlation(i, j, q, q).real() -
                        dense.expectation(i, q).real() * dense.expectation(j, q).real();
        CHECK(std::abs(c(i, j) - expect) < 1e-10);
      }
  }
}

TEST_CASE("momentum spectrum") {
  SUBCASE("identity covariance is flat") {
    MatrixXd c = 0.37 * MatrixXd::Identity(8, 8);
    VectorXd spec = momentum_spectrum(c);
    for (int k = 0; k < 8; ++k) CHECK(spec[k] == doctest::Approx(0.37).epsilon(1e-12));
  }
  SUBCASE("matches the complex congruence and is real") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    const int n = 12;
    MatrixXd c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) c(i, j) = c(j, i) = nd(rng);
    VectorXd spec = momentum_spectrum(c);
    for (int alpha = 0; alpha < n; ++alpha) {
      Complex acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          acc += c(i, j) *
                 std::exp(Complex(0.0, 2.0 * M_PI * alpha * double(i - j) / n)) /
                 double(n);
      CHECK(std::abs(acc.imag()) < 1e-10);
      CHECK(spec[alpha] == doctest::Approx(acc.real()).epsilon(1e-10));
    }
    // Cosine symmetry alpha <-> N - alpha.
    for (int alpha = 1; alpha < n; ++alpha)
      CHECK(spec[alpha] == doctest::Approx(spec[n - alpha]).epsilon(1e-10));
  }
  SUBCASE("asymmetric input is rejected") {
    MatrixXd c = MatrixXd::Zero(4, 4);
    c(0, 1) = 1.0;
    CHECK_THROWS_AS(momentum_spectrum(c), std::invalid_argument);
  }
  SUBCASE("free ground state gives 1/(2 w_k) up to open-chain edge effects") {
    const int n = 32;
    MatrixXd c = free_ground_covariance(1.0, 1.0, n);
    VectorXd spec = momentum_spectrum(c);
    double worst = 0.0;
    for (int alpha = 0; alpha < n; ++alpha) {
      double ideal = 0.5 / dispersion(1.0, 1.0, n, alpha);
      worst = std::max(worst, std::abs(spec[alpha] - ideal) / ideal);
    }
    CHECK(worst < 0.15);
    CovarianceFit fit = fit_dispersion(spec, 1.0, n);
    CHECK(fit.m == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("dispersion fit") {
  const int n = 32;
  const double a = 1.0;
  SUBCASE("round-trips a synthetic spectrum") {
    VectorXd spec(n);
    for (int alpha = 0; alpha < n; ++alpha)
      spec[alpha] = 0.5 / dispersion(1.0, a, n, alpha) - 0.016;
    CovarianceFit fit = fit_dispersion(spec, a, n);
    CHECK(fit.converged);
    CHECK(fit.m == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit.c0 == doctest::Approx(-0.016).epsilon(1e-6));
    CHECK(fit.residual < 1e-9);
  }
  SUBCASE("mass is identifiable") {
    VectorXd spec(n);
    for (int alpha = 0; alpha < n; ++alpha)
      spec[alpha] = 0.5 / dispersion(0.8, a, n, alpha) + 0.004;
    auto sse_at = [&](double m) {
      VectorXd model(n);
      for (int alpha = 0; alpha < n; ++alpha)
        model[alpha] = 0.5 / dispersion(m, a, n, alpha);
      double c0 = (spec - model).mean();
      return (spec - model - c0 * VectorXd::Ones(n)).squaredNorm();
    };
    CHECK(sse_at(0.8) < sse_at(0.88));
    CHECK(sse_at(0.8) < sse_at(0.72));
    CovarianceFit fit = fit_dispersion(spec, a, n);
    CHECK(fit.m == doctest::Approx(0.8).epsilon(1e-4));
  }
}

TEST_CASE("sampled ensemble rebuilds the vacuum spectrum") {
  // Full-form samples generate every vacuum fluctuation classically; their
  // ensemble covariance converges to 1/(2 w_k).
  const int n = 16;
  const double omega = 1.0, a = 1.0;
  const int samples = 4000;
  MatrixXd c = MatrixXd::Zero(n, n);
  for (int s = 0; s < samples; ++s) {
    FluctuationSample f =
        sample_fluctuations(omega, n, a, 7, s, FluctuationForm::Full);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j) += f.dq[i] * f.dq[j];
  }
  c /= samples;
  VectorXd spec = momentum_spectrum(c);
  double rms = 0.0;
  for (int alpha = 0; alpha < n; ++alpha) {
    double ideal = 0.5 / dispersion(omega, a, n, alpha);
    rms += std::pow(spec[alpha] / ideal - 1.0, 2);
  }
  rms = std::sqrt(rms / n);
  CHECK(rms < 0.05);
}

TEST_CASE("discretized potential curvature") {
  QumodeGrid g = build_grid(20, 4.0);
  CHECK(discretized_potential_mass(g, Potential::sho(1.0, 0.0), 0.0, 2.5) ==
        doctest::Approx(1.0).epsilon(1e-6));
  Potential pt = Potential::poschl_teller(1.0, 0.6180339887, -2.0, 2.0, 0.5)
                     .with_lift({LiftKind::DropTrueWell, 0.0});
  QumodeGrid g2 = build_grid(20, 4.0);
  double m = discretized_potential_mass(g2, pt, -2.0, 2.0);
  CHECK(m < 1.0);
  CHECK(m > 0.6);
}
