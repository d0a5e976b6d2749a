#include <cmath>

#include <Eigen/SVD>
#include <doctest.h>

#include "hybrid/gaussian.hpp"
#include "hybrid/pipeline.hpp"
#include "support.hpp"

using namespace hybrid;

namespace {

BogoliubovDecomposition identity_decomposition(std::vector<double> energies) {
  const int M = static_cast<int>(energies.size());
  BogoliubovDecomposition d;
  d.partition = {0, M};
  d.energies = Eigen::Map<RVector>(energies.data(), M);
  d.A = CMatrix::Identity(M, M);
  d.B = CMatrix::Zero(M, M);
  return d;
}

}  // namespace

TEST_CASE("covariance: thermal occupation") {
  const GaussianState g = covariance(identity_decomposition({1.0}), 1.0 / std::log(2.0));
  CHECK(g.G(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(g.G(0, 1)) < 1e-15);
  CHECK(mean_occupations(g)(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.log_norm == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("covariance: zero temperature vacuum") {
  const GaussianState g = covariance(identity_decomposition({1.0, 3.0}), 0.0);
  CHECK(g.G.isZero(0.0));
  CHECK(g.C.isZero(0.0));
  CHECK(g.log_norm == 0.0);
  CHECK(mean_occupations(g).isZero(0.0));
}

TEST_CASE("covariance: squeezed vacuum moments") {
  const double r = 0.5;
  BogoliubovDecomposition d = identity_decomposition({1.0});
  d.A(0, 0) = std::cosh(r);
  d.B(0, 0) = -std::sinh(r);
  const GaussianState g = covariance(d, 0.0);
  CHECK(g.G(0, 0).real() == doctest::Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-14));
  CHECK(std::abs(g.G(1, 0)) == doctest::Approx(std::cosh(r) * std::sinh(r)).epsilon(1e-14));
}

TEST_CASE("covariance: large arguments use the asymptotic factor") {
  CHECK(thermal_factor(1.0, 0.0) == 1.0);
  CHECK(thermal_factor(1e6, 1e-3) == 1.0);
  CHECK(thermal_factor(1.0, 1.0) == doctest::Approx(1.0 / std::tanh(0.5)));
  const GaussianState g = covariance(identity_decomposition({1e4}), 1e-3);
  CHECK(g.G.isZero(0.0));
}

TEST_CASE("base matrix") {
  SUBCASE("thermal mode") {
    const double n = 0.7;
    CMatrix G = CMatrix::Zero(2, 2);
    G(0, 0) = G(1, 1) = n;
    const BaseMatrix b = base_matrix(G);
    const double q = n / (1.0 + n);
    CHECK(std::abs(b.C(0, 0)) < 1e-16);
    CHECK(b.C(0, 1).real() == doctest::Approx(q).epsilon(1e-14));
    CHECK(b.C(1, 0).real() == doctest::Approx(q).epsilon(1e-14));
  }
  SUBCASE("zero covariance") { CHECK(base_matrix(CMatrix::Zero(4, 4)).C.isZero(0.0)); }
  SUBCASE("asymmetric input is rejected") {
    CMatrix G = CMatrix::Zero(2, 2);
    G(0, 0) = 0.5;
    G(1, 1) = 0.1;
    CHECK_THROWS_AS(base_matrix(G), AsymmetryError);
  }
}

TEST_CASE("covariance: random instances") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const int Ma = trial % 3;
    const int Mph = 1 + trial % 2;
    const QuadraticHamiltonian h = assemble_hamiltonian(testing::random_stable_blocks(rng, Ma, Mph, 0.5));
    const BogoliubovDecomposition d = bogoliubov_diagonalize(h);
    const double T = 0.3 * (trial % 4);
    const GaussianState g = covariance(d, T);
    const int M = d.modes();
    CAPTURE(trial);
    CHECK(max_abs(g.G - testing::correlator_oracle(d, T)) < 1e-10);
    CHECK(max_abs(g.G - correlators_from_occupations(d, T)) < 1e-10);
    CHECK(g.c_asymmetry < 1e-9);
    const CMatrix normal = g.G.topLeftCorner(M, M);
    CHECK(max_abs(normal - normal.adjoint()) < 1e-10);
    CHECK(Eigen::SelfAdjointEigenSolver<CMatrix>(normal).eigenvalues()(0) > -1e-10);
    const CMatrix ratio = g.G * (CMatrix::Identity(2 * M, 2 * M) + g.G).inverse();
    const RVector sv = Eigen::JacobiSVD<CMatrix>(ratio).singularValues();
    CHECK(sv(0) < 1.0);
    CHECK(sv(sv.size() - 1) >= 0.0);
    CHECK(std::isfinite(g.log_norm));
  }
}

TEST_CASE("mean occupations are monotone in temperature") {
  std::mt19937_64 rng(37);
  const BogoliubovDecomposition d =
      bogoliubov_diagonalize(assemble_hamiltonian(testing::random_stable_blocks(rng, 2, 1, 0.5)));
  RVector previous = mean_occupations(covariance(d, 0.0));
  for (double T = 0.1; T < 3.0; T += 0.1) {
    const RVector n = mean_occupations(covariance(d, T));
    CHECK(((n - previous).array() >= -1e-14).all());
    previous = n;
  }
}

TEST_CASE("extend_matrix") {
  CMatrix C(2, 2);
  C << cplx(1, 1), cplx(2, 0), cplx(2, 0), cplx(4, -1);

  CHECK(extend_matrix(C, {0}).size() == 0);

  CMatrix expected(4, 4);
  expected << C(0, 0), C(0, 0), C(0, 1), C(0, 1),
              C(0, 0), C(0, 0), C(0, 1), C(0, 1),
              C(1, 0), C(1, 0), C(1, 1), C(1, 1),
              C(1, 0), C(1, 0), C(1, 1), C(1, 1);
  CHECK(max_abs(extend_matrix(C, {2}) - expected) == 0.0);

  // Index oracle for M = 2, counts (1, 2): idx = [0, 1, 1, 2, 3, 3].
  std::mt19937_64 rng(3);
  const CMatrix C4 = testing::random_symmetric(rng, 4);
  const int idx[] = {0, 1, 1, 2, 3, 3};
  const CMatrix X = extend_matrix(C4, {1, 2});
  REQUIRE(X.rows() == 6);
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) CHECK(X(a, b) == C4(idx[a], idx[b]));
  }
  CHECK_THROWS_AS(extend_matrix(C4, {1}), DimensionError);
  CHECK_THROWS_AS(extend_matrix(C4, {1, -1}), DimensionError);
}

TEST_CASE("photon-only pipeline runs unchanged") {
  SystemConfig cfg;
  cfg.mode = BlockSource::Geometry1D;
  cfg.M_a = 0;
  cfg.M_ph = 2;
  cfg.g_a_N0 = 0.5;
  cfg.delta_a = -10.0;
  cfg.delta_nu = {5.0, 5.0};
  cfg.omega_nu = {1.0, 1.5};
  cfg.rabi_drive_amp = 1.0;
  cfg.rabi_mode_amp = {2.0, 2.0};
  cfg.temperature = 0.5;
  cfg.grid = {8.0, 2048};
  const Pipeline p = run_pipeline(cfg, Stage::State);
  REQUIRE(p.state.has_value());
  CHECK(p.state->modes() == 2);
  CHECK((mean_occupations(*p.state).array() > 0.0).all());
}
