#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qulat/mps.hpp"

using namespace qulat;
using qulat::testing::DenseSim;
using qulat::testing::mps_to_dense;

namespace {

std::vector<LocalWavefunction> gaussians(const QumodeGrid& g, int n, double center,
                                         double omega = 1.0) {
  return std::vector<LocalWavefunction>(n, sho_ground_state(g, omega, center));
}

MatrixXcd random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  MatrixXcd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  Eigen::HouseholderQR<MatrixXcd> qr(a);
  return qr.householderQ() * MatrixXcd::Identity(d, d);
}

VectorXcd hop_phase(const QumodeGrid& g, double scale) {
  VectorXcd v(g.d * g.d);
  for (int j = 0; j < g.d; ++j)
    for (int i = 0; i < g.d; ++i)
      v[i + g.d * j] = std::exp(Complex(0.0, scale * g.points[i] * g.points[j]));
  return v;
}

}  // namespace

TEST_CASE("product state basics") {
  QumodeGrid g = build_grid(8, 3.0);
  SUBCASE("single site equals the local amplitudes") {
    auto locals = gaussians(g, 1, 0.5);
    MPSState s(locals);
    VectorXcd dense = mps_to_dense(s);
    CHECK((dense - locals[0].amplitudes).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("identical locals give identical site means and zero entropy") {
    MPSState s(gaussians(g, 3, -1.0));
    MatrixXcd q = position_operator(g).matrix;
    auto means = s.site_expectations(q);
    for (int n = 1; n < 3; ++n)
      CHECK(means[n].real() == doctest::Approx(means[0].real()).epsilon(1e-12));
    for (int b = 0; b < 2; ++b) CHECK(s.entanglement_entropy(b) == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(MPSState(std::vector<LocalWavefunction>{}), std::invalid_argument);
}

TEST_CASE("single-site gates") {
  QumodeGrid g = build_grid(40, 4.0);
  MPSState s(gaussians(g, 3, -2.0));
  std::mt19937_64 rng(7);

  SUBCASE("identity leaves the state alone") {
    MPSState before = s;
    s.apply_single_site(1, MatrixXcd::Identity(g.d, g.d));
    CHECK(std::abs(std::abs(s.inner(before)) - 1.0) < 1e-13);
  }
  SUBCASE("position-diagonal phases keep <q> fixed and shift <p>") {
    // Fine grid: the symmetric-difference momentum reads a kick k as
    // k - dq^2/6 (k^3 + 3 k <p^2>) + ...
    QumodeGrid gf = build_grid(128, 4.0);
    MPSState sf(gaussians(gf, 3, 0.0));
    MatrixXcd q = position_operator(gf).matrix;
    MatrixXcd pop = momentum_operator(gf).matrix;
    double q_before = sf.expectation(1, q).real();
    double p_before = sf.expectation(1, pop).real();
    MatrixXcd gate = MatrixXcd::Zero(gf.d, gf.d);
    double kick = 0.4;
    for (int j = 0; j < gf.d; ++j) gate(j, j) = std::exp(Complex(0, kick * gf.points[j]));
    sf.apply_single_site(1, gate);
    CHECK(sf.expectation(1, q).real() == doctest::Approx(q_before).epsilon(1e-12));
    CHECK(sf.expectation(1, pop).real() - p_before == doctest::Approx(kick).epsilon(1e-3));
  }
  SUBCASE("unitaries preserve the norm") {
    s.apply_single_site(0, random_unitary(g.d, rng));
    s.apply_single_site(2, random_unitary(g.d, rng));
    CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(s.apply_single_site(5, MatrixXcd::Identity(g.d, g.d)), std::out_of_range);
}

TEST_CASE("two-site gates against the dense simulator") {
  QumodeGrid g = build_grid(6, 3.0);
  auto locals = gaussians(g, 2, -1.0);
  TruncationPolicy exact{0, 0.0};

  SUBCASE("identity gate discards nothing") {
    MPSState s(locals);
    MPSState before = s;
    double w = s.apply_two_site(0, MatrixXcd::Identity(36, 36), exact);
    CHECK(w == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(std::abs(std::abs(s.inner(before)) - 1.0) < 1e-12);
  }
  SUBCASE("entangling phase matches dense evolution") {
    MPSState s(locals);
    DenseSim dense(locals);
    VectorXcd gd = hop_phase(g, 0.1);
    s.apply_two_site_diag(0, gd, exact);
    dense.apply_two_diag(0, gd);
    CHECK(s.bond_dims()[0] > 1);
    VectorXcd v = mps_to_dense(s);
    Complex phase = dense.state().dot(v) / std::abs(dense.state().dot(v));
    CHECK((v - phase * dense.state()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("dense gate path agrees with the diagonal fast path") {
    MPSState s1(locals), s2(locals);
    VectorXcd gd = hop_phase(g, 0.17);
    MatrixXcd gm = MatrixXcd::Zero(36, 36);
    for (int k = 0; k < 36; ++k) gm(k, k) = gd[k];
    s1.apply_two_site_diag(0, gd, exact);
    s2.apply_two_site(0, gm, exact);
    CHECK(std::abs(std::abs(s1.inner(s2)) - 1.0) < 1e-12);
  }
  SUBCASE("rank-1 cap forces truncation") {
    MPSState s(locals);
    TruncationPolicy cap{1, 0.0};
    double w = s.apply_two_site_diag(0, hop_phase(g, 0.3), cap);
    CHECK(w > 0.0);
    CHECK(s.bond_dims()[0] == 1);
    CHECK(s.cumulative_truncation() == doctest::Approx(w));
  }
}

TEST_CASE("measurements against the dense simulator") {
  QumodeGrid g = build_grid(5, 2.5);
  const int n = 4;
  auto locals = gaussians(g, n, 0.5, 1.3);
  MPSState s(locals);
  DenseSim dense(locals);
  std::mt19937_64 rng(11);
  TruncationPolicy exact{0, 0.0};

  // Entangle with a few random two-site unitaries.
  for (int pass = 0; pass < 2; ++pass)
    for (int b = 0; b + 1 < n; ++b) {
      MatrixXcd u = random_unitary(g.d * g.d, rng);
      s.apply_two_site(b, u, exact);
      dense.apply_two(b, u);
    }

  MatrixXcd q = position_operator(g).matrix;
  SUBCASE("site expectations") {
    for (int site = 0; site < n; ++site)
      CHECK(std::abs(s.expectation(site, q) - dense.expectation(site, q)) < 1e-10);
    CHECK(s.expectation(2, MatrixXcd::Identity(g.d, g.d)).real() ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("two-point functions") {
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        CHECK(std::abs(s.correlation(a, b, q, q) - dense.correlation(a, b, q, q)) < 1e-10);
    auto row = s.correlation_row(1, q, q);
    for (int b = 1; b < n; ++b)
      CHECK(std::abs(row[b - 1] - dense.correlation(1, b, q, q)) < 1e-10);
  }
  SUBCASE("variance is nonnegative and products factorize") {
    MPSState prod(gaussians(g, 3, -1.0));
    Complex qq = prod.correlation(0, 2, q, q);
    Complex mean = prod.expectation(0, q);
    CHECK(std::abs(qq - mean * mean) < 1e-12);
    Complex var = prod.correlation(1, 1, q, q) - mean * mean;
    CHECK(var.real() >= -1e-12);
  }
  CHECK_THROWS_AS(s.correlation(2, 1, q, q), std::invalid_argument);
}

TEST_CASE("gate locality") {
  QumodeGrid g = build_grid(5, 2.5);
  MPSState s(gaussians(g, 6, -0.5));
  std::mt19937_64 rng(3);
  TruncationPolicy exact{0, 0.0};
  // Pre-entangle everywhere.
  for (int b = 0; b < 5; ++b) s.apply_two_site(b, random_unitary(25, rng), exact);
  MatrixXcd q = position_operator(g).matrix;
  auto before = s.site_expectations(q);
  s.apply_two_site(2, random_unitary(25, rng), exact);
  auto after = s.site_expectations(q);
  for (int site : {0, 1, 4, 5})
    CHECK(std::abs(before[site] - after[site]) < 1e-12);
}

TEST_CASE("entanglement entropy") {
  SUBCASE("bell pair reaches log 2") {
    QumodeGrid g = build_grid(2, 1.0);
    LocalWavefunction up{g, VectorXcd::Zero(2)};
    up.amplitudes[0] = 1.0;
    MPSState s(std::vector<LocalWavefunction>{up, up});
    // H on site 0 then CNOT:
    MatrixXcd had(2, 2);
    had << 1, 1, 1, -1;
    had /= std::sqrt(2.0);
    s.apply_single_site(0, had);
    MatrixXcd cnot = MatrixXcd::Zero(4, 4);
    // pair index i + 2j, control = site 0 (i), target = site 1 (j)
    cnot(0 + 2 * 0, 0) = 1;
    cnot(1 + 2 * 1, 1) = 1;
    cnot(0 + 2 * 1, 2) = 1;
    cnot(1 + 2 * 0, 3) = 1;
    s.apply_two_site(0, cnot, TruncationPolicy{0, 0.0});
    CHECK(s.entanglement_entropy(0) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  }
  SUBCASE("entropy is bounded by log chi") {
    QumodeGrid g = build_grid(4, 2.0);
    MPSState s(gaussians(g, 4, 0.0));
    std::mt19937_64 rng(5);
    for (int b = 0; b < 3; ++b)
      s.apply_two_site(b, random_unitary(16, rng), TruncationPolicy{0, 0.0});
    auto dims = s.bond_dims();
    for (int b = 0; b < 3; ++b)
      CHECK(s.entanglement_entropy(b) <= std::log(double(dims[b])) + 1e-12);
  }
}

TEST_CASE("truncation bookkeeping decreases with looser caps") {
  QumodeGrid g = build_grid(5, 2.5);
  std::mt19937_64 rng(17);
  std::vector<MatrixXcd> gates;
  for (int k = 0; k < 6; ++k) gates.push_back(random_unitary(25, rng));
  double prev = -1.0;
  for (int chi : {2, 4, 8}) {
    MPSState s(gaussians(g, 4, 0.3));
    TruncationPolicy pol{chi, 0.0};
    int k = 0;
    for (int pass = 0; pass < 2; ++pass)
      for (int b = 0; b < 3; ++b) s.apply_two_site(b, gates[k++ % 6], pol);
    if (prev >= 0) CHECK(s.cumulative_truncation() <= prev + 1e-15);
    prev = s.cumulative_truncation();
  }
}

TEST_CASE("assembled energy matches the dense hamiltonian") {
  QumodeGrid g = build_grid(5, 2.5);
  const int n = 4;
  const double a = 1.0;
  Potential p = Potential::sho(1.2, 0.0);
  auto locals = gaussians(g, n, 0.4, 1.1);
  MPSState s(locals);
  std::mt19937_64 rng(23);
  TruncationPolicy exact{0, 0.0};
  for (int b = 0; b + 1 < n; ++b) s.apply_two_site(b, random_unitary(25, rng), exact);

  for (bool corrected : {false, true}) {
    MatrixXcd h = qulat::testing::dense_lattice_hamiltonian(g, p, a, n, corrected);
    VectorXcd v = mps_to_dense(s);
    double dense_e = (v.dot(h * v)).real() / v.squaredNorm();
    CHECK(lattice_energy(s, g, p, a, corrected) == doctest::Approx(dense_e).epsilon(1e-10));
  }
}

TEST_CASE("local ground-state product has purely local energy") {
  // Each qumode in the exact ground state of its local hamiltonian, centered
  // so the hop terms have zero expectation.
  QumodeGrid g = build_grid(40, 6.0);
  const double a = 1.0;
  const int n = 3;
  Potential p = Potential::sho(1.0, 0.0);
  MatrixXcd h_loc = 0.5 * a * momentum_squared_operator(g).matrix;
  for (int j = 0; j < g.d; ++j)
    h_loc(j, j) += g.points[j] * g.points[j] / a + a * p.value(g.points[j]);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h_loc);
  LocalWavefunction ground{g, es.eigenvectors().col(0)};
  ground.normalize();
  double e_local = es.eigenvalues()[0];

  MPSState s(std::vector<LocalWavefunction>(n, ground));
  double e = lattice_energy(s, g, p, a, false);
  MatrixXcd q = position_operator(g).matrix;
  double mean = s.expectation(0, q).real();
  double hop = (n - 1) * mean * mean / a;
  CHECK(e + hop == doctest::Approx(n * e_local).epsilon(1e-9));
  // Extensivity across sizes.
  MPSState s6(std::vector<LocalWavefunction>(6, ground));
  double e6 = lattice_energy(s6, g, p, a, false);
  CHECK(e6 + 5 * mean * mean / a == doctest::Approx(6 * e_local).epsilon(1e-9));
}

TEST_CASE("checkpoint round trip") {
  QumodeGrid g = build_grid(6, 3.0);
  MPSState s(gaussians(g, 4, -1.0));
  std::mt19937_64 rng(29);
  for (int b = 0; b < 3; ++b)
    s.apply_two_site(b, random_unitary(36, rng), TruncationPolicy{4, 1e-12});

  std::ostringstream buf1;
  s.save(buf1, g.L);
  std::istringstream in1(buf1.str());
  double half = 0.0;
  MPSState t = MPSState::load(in1, &half);
  CHECK(half == doctest::Approx(g.L));
  std::ostringstream buf2;
  t.save(buf2, half);
  CHECK(buf1.str() == buf2.str());
  CHECK(std::abs(std::abs(t.inner(s)) / (s.norm() * t.norm()) - 1.0) < 1e-12);

  SUBCASE("corruption is detected") {
    std::string bytes = buf1.str();
    bytes[bytes.size() / 2] ^= 0x40;
    std::istringstream bad(bytes);
    CHECK_THROWS_WITH_AS(MPSState::load(bad), doctest::Contains("checksum"),
                         std::runtime_error);
  }
}

TEST_CASE("canonical form invariants") {
  QumodeGrid g = build_grid(5, 2.5);
  MPSState s(gaussians(g, 5, 0.2));
  std::mt19937_64 rng(31);
  for (int b = 0; b < 4; ++b)
    s.apply_two_site(b, random_unitary(25, rng), TruncationPolicy{0, 0.0});
  s.canonicalize(2);
  // Left of center: left isometries; right of center: right isometries.
  for (int site = 0; site < 2; ++site) {
    const MatrixXcd& t = s.tensor(site);
    MatrixXcd gram = t.adjoint() * t;
    CHECK((gram - MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <
          1e-10);
  }
  for (int site = 3; site < 5; ++site) {
    const MatrixXcd& t = s.tensor(site);
    int chi_l = s.left_dim(site);
    Eigen::Map<const MatrixXcd> wide(t.data(), chi_l, t.size() / chi_l);
    MatrixXcd gram = wide * wide.adjoint();
    CHECK((gram - MatrixXcd::Identity(chi_l, chi_l)).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-10));
}
