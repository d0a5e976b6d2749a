#pragma once

#include <cmath>
#include <random>
#include <vector>
#include <string>

#include "hybrid/bdg.hpp"
#include "hybrid/model.hpp"

namespace testing {

using hybrid::cplx;
using hybrid::CMatrix;

inline std::string config_path(const std::string& name) { return std::string(HYBRID_TEST_CONFIG_DIR) + "/" + name; }

inline cplx random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng), n(rng)};
}

inline CMatrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = random_complex(rng);
  }
  return m;
}

inline CMatrix random_symmetric(std::mt19937_64& rng, int n) {
  const CMatrix m = random_matrix(rng, n, n);
  return 0.5 * (m + m.transpose());
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int n) {
  const CMatrix m = random_matrix(rng, n, n);
  return 0.5 * (m + m.adjoint());
}

/// Random coupling blocks whose Hamiltonian is stable: diagonal energies in
/// [1, 3] and couplings of size `coupling`, rescaled until stable.
inline hybrid::CouplingBlocks random_stable_blocks(std::mt19937_64& rng, int Ma, int Mph, double coupling) {
  std::uniform_real_distribution<double> energy(1.0, 3.0);
  hybrid::CouplingBlocks b;
  b.eps_a = 0.3 * coupling * random_hermitian(rng, Ma);
  for (int i = 0; i < Ma; ++i) b.eps_a(i, i) += energy(rng);
  b.eps_ph = CMatrix::Zero(Mph, Mph);
  for (int i = 0; i < Mph; ++i) b.eps_ph(i, i) = energy(rng);
  b.chi_phph = 0.3 * coupling * random_hermitian(rng, Mph);
  b.chi_pha = 0.3 * coupling * random_matrix(rng, Mph, Ma);
  b.chit_aa = coupling * random_symmetric(rng, Ma);
  b.chit_pha = coupling * random_matrix(rng, Mph, Ma);
  b.symmetrize();
  for (int attempt = 0; attempt < 60; ++attempt) {
    if (hybrid::check_stability(hybrid::assemble_hamiltonian(b)).stable) return b;
    b.chi_phph *= 0.8;
    b.chi_pha *= 0.8;
    b.chit_aa *= 0.8;
    b.chit_pha *= 0.8;
    if (Ma > 0) {
      const CMatrix off = b.eps_a - CMatrix(b.eps_a.diagonal().asDiagonal());
      b.eps_a -= 0.2 * off;
    }
  }
  return b;
}

// Correlators from quasiparticle occupations, element by element:
// c_j = sum_k conj(A_kj) c~_k + B_kj c~_k^dagger.
inline CMatrix correlator_oracle(const hybrid::BogoliubovDecomposition& d, double T) {
  const int M = d.modes();
  std::vector<double> n(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) n[static_cast<std::size_t>(k)] = T > 0 ? 1.0 / (std::exp(d.energies(k) / T) - 1.0) : 0.0;
  CMatrix G = CMatrix::Zero(2 * M, 2 * M);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      cplx normal = 0.0, pair = 0.0;
      for (int k = 0; k < M; ++k) {
        const double nk = n[static_cast<std::size_t>(k)];
        normal += d.A(k, i) * std::conj(d.A(k, j)) * nk + std::conj(d.B(k, i)) * d.B(k, j) * (nk + 1.0);
        pair += std::conj(d.A(k, i)) * d.B(k, j) * (nk + 1.0) + d.B(k, i) * std::conj(d.A(k, j)) * nk;
      }
      G(i, j) = normal;         // <c_i^dagger c_j>
      G(M + j, M + i) = normal;  // <c_i^dagger c_j> at (j, i) of the lower block
      G(M + i, j) = pair;       // <c_i c_j>
      G(i, M + j) = std::conj(pair);
    }
  }
  return G;
}

}  // namespace testing
