#include <cmath>

#include <Eigen/SVD>
#include <doctest.h>

#include "hybrid/blochmessiah.hpp"
#include "support.hpp"

using namespace hybrid;

namespace {

BogoliubovDecomposition single_mode(double r) {
  BogoliubovDecomposition d;
  d.partition = {1, 0};
  d.energies = RVector::Ones(1);
  d.A = CMatrix::Constant(1, 1, std::cosh(r));
  d.B = CMatrix::Constant(1, 1, -std::sinh(r));
  return d;
}

CouplingBlocks squeezed_atom(double e, double t) {
  CouplingBlocks b;
  b.eps_a = CMatrix::Constant(1, 1, e);
  b.chit_aa = CMatrix::Constant(1, 1, t);
  b.eps_ph = CMatrix::Zero(0, 0);
  b.chi_phph = CMatrix::Zero(0, 0);
  b.chi_pha = CMatrix::Zero(0, 1);
  b.chit_pha = CMatrix::Zero(0, 1);
  return b;
}

SystemConfig geometry(int Ma, int Mph) {
  SystemConfig cfg;
  cfg.mode = BlockSource::Geometry1D;
  cfg.M_a = Ma;
  cfg.M_ph = Mph;
  cfg.g_a_N0 = 0.8;
  cfg.delta_a = -10.0;
  cfg.delta_nu.assign(static_cast<std::size_t>(Mph), 5.0);
  cfg.omega_nu.assign(static_cast<std::size_t>(Mph), 2.0);
  for (int k = 0; k < Mph; ++k) cfg.omega_nu[static_cast<std::size_t>(k)] += 0.3 * k;
  cfg.rabi_drive_amp = 2.0;
  cfg.rabi_mode_amp.assign(static_cast<std::size_t>(Mph), 2.0);
  cfg.mu = 0.5;
  cfg.grid = {8.0, 4096};
  return cfg;
}

}  // namespace

TEST_CASE("bloch-messiah: identity transform") {
  BogoliubovDecomposition d;
  d.partition = {2, 1};
  d.energies = RVector::LinSpaced(3, 1.0, 2.0);
  d.A = CMatrix::Identity(3, 3);
  d.B = CMatrix::Zero(3, 3);
  const BlochMessiahFactors f = bloch_messiah(d);
  CHECK(max_abs(f.V - CMatrix::Identity(3, 3)) == 0.0);
  CHECK(max_abs(f.W - CMatrix::Identity(3, 3)) == 0.0);
  CHECK(f.r.isZero(0.0));
  CHECK(squeeze_spectrum(f).isZero(0.0));
}

TEST_CASE("bloch-messiah: single mode already canonical") {
  const BlochMessiahFactors f = bloch_messiah(single_mode(0.7));
  CHECK(f.r(0) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(std::abs(f.V(0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(f.W(0, 0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.W(0, 0).real() > 0.0);
}

TEST_CASE("bloch-messiah: closed-form squeeze of e = 1, t = 0.6") {
  const BogoliubovDecomposition d = bogoliubov_diagonalize(assemble_hamiltonian(squeezed_atom(1.0, 0.6)));
  const RVector r = squeeze_spectrum(bloch_messiah(d));
  CHECK(std::abs(r(0) - 0.25 * std::log(4.0)) < 1e-12);
}

TEST_CASE("bloch-messiah: squeeze grows with pairing") {
  double previous = -1.0;
  for (double t = 0.0; t < 0.95; t += 0.05) {
    const BogoliubovDecomposition d = bogoliubov_diagonalize(assemble_hamiltonian(squeezed_atom(1.0, t)));
    const double r = bloch_messiah(d).r(0);
    CHECK(r > previous);
    previous = r;
  }
}

TEST_CASE("bloch-messiah: random instances against the SVD of B") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int Ma = 1 + trial % 3;
    const int Mph = trial % 3;
    const QuadraticHamiltonian h = assemble_hamiltonian(testing::random_stable_blocks(rng, Ma, Mph, 0.5));
    const BogoliubovDecomposition d = bogoliubov_diagonalize(h);
    const BlochMessiahFactors f = bloch_messiah(d);
    const int M = d.modes();
    CAPTURE(trial);
    CHECK(reconstruction_residual(f, d) < 1e-9);
    CHECK(max_abs(f.V.adjoint() * f.V - CMatrix::Identity(M, M)) < 1e-10);
    CHECK(max_abs(f.W.adjoint() * f.W - CMatrix::Identity(M, M)) < 1e-10);
    for (int j = 0; j < M; ++j) {
      CHECK(f.r(j) >= 0.0);
      if (j > 0) CHECK(f.r(j) <= f.r(j - 1));
    }
    const RVector sb = Eigen::JacobiSVD<CMatrix>(d.B).singularValues();
    const RVector sa = Eigen::JacobiSVD<CMatrix>(d.A).singularValues();
    for (int j = 0; j < M; ++j) {
      CHECK(std::abs(std::sinh(f.r(j)) - sb(j)) < 1e-9);
      CHECK(std::abs(std::cosh(f.r(j)) - sa(j)) < 1e-9);
    }
  }
}

TEST_CASE("bloch-messiah: degenerate squeezing is reconstructed") {
  CouplingBlocks b;
  b.eps_a = CMatrix::Identity(2, 2);
  b.chit_aa = 0.4 * CMatrix::Identity(2, 2);
  b.eps_ph = CMatrix::Zero(0, 0);
  b.chi_phph = CMatrix::Zero(0, 0);
  b.chi_pha = CMatrix::Zero(0, 2);
  b.chit_pha = CMatrix::Zero(0, 2);
  const BogoliubovDecomposition d = bogoliubov_diagonalize(assemble_hamiltonian(b));
  const BlochMessiahFactors f = bloch_messiah(d);
  CHECK(f.r(0) == doctest::Approx(f.r(1)).epsilon(1e-12));
  CHECK(reconstruction_residual(f, d) < 1e-12);
}

TEST_CASE("bloch-messiah: non-symplectic input is rejected") {
  BogoliubovDecomposition d = single_mode(0.5);
  d.B(0, 0) *= 1.5;
  CHECK_THROWS_AS(bloch_messiah(d), ReconstructionError);
}

TEST_CASE("bloch-messiah: photon-only rotations are nontrivial") {
  const SystemConfig cfg = geometry(0, 3);
  const BogoliubovDecomposition d = bogoliubov_diagonalize(assemble_hamiltonian(coupling_blocks_for(cfg)));
  const BlochMessiahFactors f = bloch_messiah(d);
  CHECK(f.V.rows() == 3);
  CHECK(max_abs(f.V - CMatrix::Identity(3, 3)) > 0.01);
}

TEST_CASE("mode functions") {
  const SystemConfig cfg = geometry(2, 2);
  const ModeBasis basis = build_mode_basis(cfg);
  const BogoliubovDecomposition d =
      bogoliubov_diagonalize(assemble_hamiltonian(compute_coupling_blocks(basis, cfg)));
  const BlochMessiahFactors f = bloch_messiah(d);
  const ModeFunctions mf = mode_functions(f, basis, d);

  SUBCASE("bosonic normalization") {
    CHECK((mf.bosonic_norms().array() - 1.0).abs().maxCoeff() < 1e-8);
  }
  SUBCASE("agree with the Bogoliubov blocks") {
    // u_k = sum_j A*_kj phi_j and v_k* = sum_j B_kj phi_j over bare modes.
    const CMatrix phi = basis.phi.cast<cplx>();
    const int Ma = cfg.M_a;
    for (int k = 0; k < d.modes(); ++k) {
      CVector u = CVector::Zero(basis.points());
      CVector v_conj = CVector::Zero(basis.points());
      for (int j = 0; j < Ma; ++j) {
        u += std::conj(d.A(k, j)) * phi.col(j);
        v_conj += d.B(k, j) * phi.col(j);
      }
      CHECK((u - mf.u_atom.col(k)).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((v_conj - mf.v_atom.col(k).conjugate()).cwiseAbs().maxCoeff() < 1e-10);
      for (int nu = 0; nu < cfg.M_ph; ++nu) {
        CHECK(std::abs(std::conj(d.A(k, Ma + nu)) - mf.u_photon(nu, k)) < 1e-12);
      }
    }
  }
  SUBCASE("identity factors") {
    BlochMessiahFactors id;
    id.V = CMatrix::Identity(4, 4);
    id.W = CMatrix::Identity(4, 4);
    id.r = RVector::Zero(4);
    const ModeFunctions plain = mode_functions(id, basis, d);
    CHECK((plain.eigen_squeeze_atom - basis.phi.cast<cplx>()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((plain.u_atom - basis.phi.cast<cplx>()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(plain.v_atom.isZero(0.0));
    CHECK(plain.v_photon.isZero(0.0));
  }
  SUBCASE("unavailable without a grid") {
    CHECK_THROWS_AS(mode_functions(f, std::nullopt, d), ConfigError);
  }
}
