#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qulat/tebd.hpp"
#include "qulat/vacuum.hpp"

using namespace qulat;
using qulat::testing::DenseSim;
using qulat::testing::free_ground_energy;

namespace {

std::vector<LocalWavefunction> gaussians(const QumodeGrid& g, int n, double center,
                                         double omega = 1.0) {
  return std::vector<LocalWavefunction>(n, sho_ground_state(g, omega, center));
}

}  // namespace

TEST_CASE("gate construction") {
  QumodeGrid g = build_grid(6, 3.0);
  Potential p = Potential::sho(1.0, 0.0);

  SUBCASE("small steps approach the identity") {
    double dt = 1e-5;
    GateSet gates = build_gates(g, p, 1.0, dt, EvolutionMode::Real,
                                GateOrdering::OddEven, false);
    MatrixXcd h = 0.5 * momentum_squared_operator(g).matrix;
    for (int j = 0; j < g.d; ++j)
      h(j, j) += g.points[j] * g.points[j] + p.value(g.points[j]);
    double hnorm = h.operatorNorm();
    CHECK((gates.site_half_bulk - MatrixXcd::Identity(g.d, g.d)).operatorNorm() <
          2.0 * hnorm * dt);
    CHECK((gates.hop_full_dense() - MatrixXcd::Identity(36, 36)).operatorNorm() <
          2.0 * 9.0 * dt);
  }
  SUBCASE("real-mode gates are unitary") {
    GateSet gates = build_gates(g, p, 1.0, 0.07, EvolutionMode::Real,
                                GateOrdering::OddEven, true);
    for (const MatrixXcd* u : {&gates.site_half_bulk, &gates.site_half_edge}) {
      MatrixXcd gram = u->adjoint() * (*u);
      CHECK((gram - MatrixXcd::Identity(g.d, g.d)).cwiseAbs().maxCoeff() < 1e-12);
    }
    for (int k = 0; k < 36; ++k) CHECK(std::abs(std::abs(gates.hop_full[k]) - 1.0) < 1e-12);
  }
  SUBCASE("hop gate equals the exponential of the position product") {
    double dt = 0.11, a = 2.0;
    GateSet gates = build_gates(build_grid(4, 2.0), p, a, dt, EvolutionMode::Real,
                                GateOrdering::OddEven, false);
    QumodeGrid g4 = build_grid(4, 2.0);
    MatrixXcd dense = gates.hop_full_dense();
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) {
        Complex expect = std::exp(Complex(0.0, g4.points[i] * g4.points[j] * dt / a));
        CHECK(std::abs(dense(i + 4 * j, i + 4 * j) - expect) < 1e-12);
      }
  }
  SUBCASE("imaginary-mode gates are positive") {
    GateSet gates = build_gates(g, p, 1.0, 0.05, EvolutionMode::Imaginary,
                                GateOrdering::OddEven, false);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gates.site_half_bulk);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK((gates.site_half_bulk - gates.site_half_bulk.adjoint()).cwiseAbs().maxCoeff() <
          1e-12);
    for (int k = 0; k < 36; ++k) CHECK(gates.hop_full[k].real() > 0.0);
  }
  CHECK_THROWS_AS(build_gates(g, p, 1.0, 0.0, EvolutionMode::Real,
                              GateOrdering::OddEven, false),
                  std::invalid_argument);
}

TEST_CASE("steps match the dense statevector gate for gate") {
  QumodeGrid g = build_grid(6, 3.0);
  const int n = 4;
  for (auto* p : {new Potential(Potential::sho(1.0, 0.0)),
                  new Potential(Potential::quartic(0.5, 2.0, 0.1))}) {
    auto locals = gaussians(g, n, p->false_vacuum(), 1.0);
    MPSState s(locals);
    DenseSim dense(locals);
    GateSet gates = build_gates(g, *p, 1.0, 0.02, EvolutionMode::Real,
                                GateOrdering::OddEven, false);
    TruncationPolicy exact{0, 0.0};
    for (int k = 0; k < 100; ++k) {
      step(s, gates, exact);
      dense.step_odd_even(gates);
    }
    MatrixXcd q = position_operator(g).matrix;
    double worst = 0.0;
    for (int site = 0; site < n; ++site)
      worst = std::max(worst,
                       std::abs(s.expectation(site, q) - dense.expectation(site, q)));
    CHECK(worst < 1e-8);
    delete p;
  }
}

TEST_CASE("orderings apply the same step operator") {
  // Hop gates commute (all diagonal in the position basis), so the two
  // orderings differ only by truncation order; with no truncation they agree
  // to roundoff.
  QumodeGrid g = build_grid(5, 2.5);
  Potential p = Potential::quartic(0.5, 2.0, 0.1);
  auto locals = gaussians(g, 4, -2.0);
  TruncationPolicy exact{0, 0.0};
  MPSState s1(locals), s2(locals);
  GateSet g1 = build_gates(g, p, 1.0, 0.01, EvolutionMode::Real,
                           GateOrdering::OddEven, false);
  GateSet g2 = build_gates(g, p, 1.0, 0.01, EvolutionMode::Real,
                           GateOrdering::Sweep, false);
  for (int k = 0; k < 40; ++k) {
    step(s1, g1, exact);
    step(s2, g2, exact);
  }
  MatrixXcd q = position_operator(g).matrix;
  for (int site = 0; site < 4; ++site)
    CHECK(std::abs(s1.expectation(site, q) - s2.expectation(site, q)) < 1e-9);
}

TEST_CASE("decoupled chain reduces to independent local evolution") {
  QumodeGrid g = build_grid(8, 3.0);
  Potential p = Potential::quartic(1.0, 2.0, 0.1);
  GateSet gates = build_gates(g, p, 1.0, 0.05, EvolutionMode::Real,
                              GateOrdering::OddEven, false);
  gates.hop_full = VectorXcd::Ones(64);  // sever the bonds
  gates.hop_half = VectorXcd::Ones(64);

  auto locals = gaussians(g, 3, -2.0);
  MPSState s(locals);
  // Tiny cutoff so the numerically-null Schmidt values of the severed bonds
  // collapse back to bond dimension 1.
  TruncationPolicy tiny{0, 1e-12};
  const int steps = 60;
  for (int k = 0; k < steps; ++k) step(s, gates, tiny);

  // Exact single-site reference: the severed step applies exp(-i H_loc dt).
  MatrixXd h_loc = MatrixXd::Zero(g.d, g.d);
  double w = 0.5 / (g.dq * g.dq);
  for (int j = 0; j < g.d; ++j) {
    h_loc(j, j) = 2 * w + g.points[j] * g.points[j] + p.value(g.points[j]);
    if (j + 1 < g.d) h_loc(j, j + 1) = h_loc(j + 1, j) = -w;
  }
  MatrixXcd u = hermitian_exp(h_loc, Complex(0, -0.05 * steps));
  VectorXcd ref = u * locals[0].amplitudes;
  MatrixXcd q = position_operator(g).matrix;
  double ref_q = (ref.dot(q * ref)).real() / ref.squaredNorm();
  for (int site = 0; site < 3; ++site)
    CHECK(s.expectation(site, q).real() == doctest::Approx(ref_q).epsilon(1e-9));
  for (int b : s.bond_dims()) CHECK(b == 1);
}

TEST_CASE("self-convergence is second order at fixed time") {
  QumodeGrid g = build_grid(5, 2.5);
  Potential p = Potential::quartic(0.5, 2.0, 0.1);
  auto locals = gaussians(g, 3, -2.0);
  TruncationPolicy exact{0, 0.0};
  MatrixXcd q = position_operator(g).matrix;

  auto q_at = [&](double dt) {
    MPSState s(locals);
    GateSet gates = build_gates(g, p, 1.0, dt, EvolutionMode::Real,
                                GateOrdering::OddEven, false);
    int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < steps; ++k) step(s, gates, exact);
    std::vector<double> out;
    for (int site = 0; site < 3; ++site) out.push_back(s.expectation(site, q).real());
    return out;
  };
  auto ref = q_at(0.001);
  auto err = [&](double dt) {
    auto v = q_at(dt);
    double worst = 0.0;
    for (size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(v[i] - ref[i]));
    return worst;
  };
  double ratio = err(0.04) / err(0.02);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("real-time record keeping") {
  QumodeGrid g = build_grid(6, 3.0);
  Potential p = Potential::sho(1.0, 0.0);
  GateSet gates = build_gates(g, p, 1.0, 0.05, EvolutionMode::Real,
                              GateOrdering::OddEven, false);
  MPSState s(gaussians(g, 4, 0.5));
  TruncationPolicy pol{16, 1e-12};

  SUBCASE("zero total time records only the initial snapshot") {
    EvolutionRecord rec = evolve_real(s, gates, pol, 0.0, 3);
    CHECK(rec.times.size() == 1);
    CHECK(rec.field_expectations.size() == 1);
    CHECK(rec.entropies[0].size() == 3);
  }
  SUBCASE("strided recording and norm stability") {
    EvolutionRecord rec = evolve_real(s, gates, pol, 1.0, 5);
    CHECK(rec.times.size() == 1 + 4);
    CHECK(std::abs(s.norm() - 1.0) < 1e-6);
    for (size_t i = 1; i < rec.times.size(); ++i) CHECK(rec.times[i] > rec.times[i - 1]);
  }
  SUBCASE("mode mismatch is rejected") {
    GateSet imag = build_gates(g, p, 1.0, 0.05, EvolutionMode::Imaginary,
                               GateOrdering::OddEven, false);
    CHECK_THROWS_AS(evolve_real(s, imag, pol, 1.0, 1), std::invalid_argument);
  }
}

TEST_CASE("imaginary-time projection finds the free vacuum") {
  // The oracle has continuum local kinetic terms, so the grid must resolve
  // them: the stencil bias is O(dq^2 w_k^2).
  QumodeGrid g = build_grid(20, 3.0);
  const int n = 4;
  const double omega = 1.0;
  Potential p = Potential::sho(omega, 0.0);
  MPSState s(gaussians(g, n, 0.0, 2.3));  // deliberately wrong width
  GateSet gates = build_gates(g, p, 1.0, 0.05, EvolutionMode::Imaginary,
                              GateOrdering::OddEven, false);
  TruncationPolicy pol{24, 1e-12};
  ImaginaryOptions opts;
  opts.max_steps = 800;
  opts.energy_tol = 1e-9;
  ImaginaryResult res = evolve_imaginary(s, gates, pol, opts);

  double exact = free_ground_energy(omega, 1.0, n);
  CHECK(res.converged);
  CHECK(std::abs(res.final_energy - exact) / exact < 0.01);

  SUBCASE("energy history is non-increasing after the transient") {
    for (size_t k = 6; k < res.record.energy_history.size(); ++k)
      CHECK(res.record.energy_history[k] <=
            res.record.energy_history[k - 1] + opts.energy_tol);
  }
  SUBCASE("projection is idempotent") {
    ImaginaryOptions again = opts;
    again.max_steps = 100;
    ImaginaryResult res2 = evolve_imaginary(s, gates, pol, again);
    CHECK(std::abs(res2.final_energy - res.final_energy) < 10 * opts.energy_tol);
  }
}

TEST_CASE("momentum kick") {
  QumodeGrid g = build_grid(96, 4.0);
  MPSState s(gaussians(g, 3, 0.0));
  SUBCASE("zero profile is the identity") {
    MPSState before = s;
    momentum_kick(s, g, {0.0, 0.0, 0.0});
    CHECK(std::abs(std::abs(s.inner(before)) - 1.0) < 1e-13);
  }
  SUBCASE("kick shifts the symmetric-difference momentum") {
    MatrixXcd pop = momentum_operator(g).matrix;
    double before = s.expectation(1, pop).real();
    momentum_kick(s, g, {0.0, 0.25, 0.0});
    CHECK(s.expectation(1, pop).real() - before == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(s.expectation(0, pop).real() == doctest::Approx(0.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(momentum_kick(s, g, {0.0}), std::invalid_argument);
}
