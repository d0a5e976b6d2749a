#pragma once

#include <vector>

#include "hybrid/model.hpp"
#include "hybrid/tolerances.hpp"
#include "hybrid/types.hpp"

namespace hybrid {

/// H_eff = 1/2 (c^dagger; c)^T H (c^dagger; c) with
/// H = [[chit, eps + chi], [(eps + chi)*, chit*]].
///
/// The same quadratic form written over the Nambu vector (c; c^dagger) has the
/// Hermitian matrix H_bdg = H P = [[eps + chi, chit], [chit*, (eps + chi)*]],
/// where P swaps the two halves. The matrix H itself is Hermitian exactly when
/// chit is real.
struct QuadraticHamiltonian {
  CMatrix H;
  Partition partition;

  int modes() const { return partition.modes(); }

  /// Hermitian Bogoliubov-de Gennes matrix over (c; c^dagger).
  CMatrix bdg() const;

  double hermiticity_residual() const { return max_abs(H - H.adjoint()); }
  double bdg_hermiticity_residual() const;
};

QuadraticHamiltonian assemble_hamiltonian(const CouplingBlocks& blocks);

struct StabilityReport {
  bool positive_definite = false;  // of H in the (c^dagger, c) layout
  double min_eigenvalue = 0.0;
  bool bdg_positive_definite = false;
  double bdg_min_eigenvalue = 0.0;
  std::vector<cplx> symplectic_eigenvalues;  // eigenvalues of J H_bdg, sorted by (re, im)
  double max_imaginary = 0.0;
  double min_quasiparticle_energy = 0.0;  // smallest positive-branch energy when all are real
  bool stable = false;                    // every quasiparticle energy real and positive
};

StabilityReport check_stability(const QuadraticHamiltonian& h, const Tolerances& tol = {});

/// Quasiparticle operators (c~^dagger; c~) = R~ (c^dagger; c) with
/// R~ = [[A*, -B*], [-B, A]], i.e. c~ = A c - B c^dagger.
struct BogoliubovDecomposition {
  RVector energies;  // ascending, all > 0
  CMatrix A;
  CMatrix B;
  Partition partition;

  int modes() const { return static_cast<int>(A.rows()); }

  CMatrix transform() const;          // R~
  CMatrix inverse_transform() const;  // R = R~^{-1} = [[A^T, B^dagger], [B^T, A^dagger]]

  /// Splits a 2M x 2M transform into A and B; throws DimensionError if the
  /// upper blocks are not the conjugates of the lower ones.
  static BogoliubovDecomposition from_transform(const CMatrix& transform, const RVector& energies,
                                                Partition partition);
};

/// J = diag(I_M, -I_M).
CMatrix symplectic_form(int modes);

/// max |R~ J R~^dagger - J|.
double symplectic_residual(const BogoliubovDecomposition& dec);

/// max |R^dagger H_bdg' R - diag(E, E)| where the congruence is written in the
/// Nambu ordering; zero for an exact diagonalization.
double diagonalization_residual(const QuadraticHamiltonian& h, const BogoliubovDecomposition& dec);

enum class DiagonalizationRoute {
  Automatic,  // Cholesky, falling back to the eigenvector route when it fails
  Cholesky,
  Eigenvector,
};

BogoliubovDecomposition bogoliubov_diagonalize(const QuadraticHamiltonian& h, const Tolerances& tol = {},
                                               DiagonalizationRoute route = DiagonalizationRoute::Automatic);

}  // namespace hybrid
