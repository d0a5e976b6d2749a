#pragma once

#include "hybrid/bdg.hpp"
#include "hybrid/tolerances.hpp"
#include "hybrid/types.hpp"

namespace hybrid {

/// Zero-mean Gaussian state of the sampled modes.
///
/// G is laid out over (c^dagger; c): the upper-left block holds <c_i^dagger c_j>,
/// the upper-right <c_i^dagger c_j^dagger>, the lower-left <c_i c_j> and the
/// lower-right <c_j^dagger c_i>.
struct GaussianState {
  CMatrix G;
  double temperature = 0.0;
  CMatrix C;                  // P G (1 + G)^{-1}, symmetrized
  double c_asymmetry = 0.0;   // max |C - C^T| before symmetrization
  double log_norm = 0.0;      // log sqrt(det(1 + G))
  Partition partition;

  int modes() const { return partition.modes(); }
};

/// coth(E / 2T), with the T = 0 and large-argument limits taken as 1.
double thermal_factor(double energy, double temperature);

/// Bose-Einstein occupation 1 / (exp(E/T) - 1); zero at T = 0.
double bose_occupation(double energy, double temperature);

/// G = 1/2 R diag(Q, Q) R^dagger - 1/2 with R the inverse of the Bogoliubov
/// transform and Q = coth(E / 2T). Also fills C and log_norm.
GaussianState covariance(const BogoliubovDecomposition& dec, double temperature, const Tolerances& tol = {});

/// Builds a state from an explicit covariance matrix.
GaussianState state_from_covariance(const CMatrix& G, double temperature, Partition partition,
                                    const Tolerances& tol = {});

struct BaseMatrix {
  CMatrix C;
  double asymmetry = 0.0;
};

/// C = P G (1 + G)^{-1} with P the block swap. Throws AsymmetryError when
/// max |C - C^T| exceeds tol.c_symmetry; otherwise returns the symmetric part.
BaseMatrix base_matrix(const CMatrix& G, const Tolerances& tol = {});

/// C restricted and replicated by the counts: row/column j repeated m_j times,
/// then row/column M + j repeated m_j times.
CMatrix extend_matrix(const CMatrix& C, const CountsVector& counts);

/// Same, writing into `out` (resized as needed) to avoid allocation in loops.
void extend_matrix_into(const CMatrix& C, const CountsVector& counts, CMatrix& out);

/// Covariance assembled from quasiparticle occupations n_k = 1/(exp(E_k/T) - 1)
/// and the Bogoliubov blocks, without the closed-form R Q R^dagger product.
CMatrix correlators_from_occupations(const BogoliubovDecomposition& dec, double temperature);

/// Real diagonal of the normal-correlator block.
RVector mean_occupations(const GaussianState& g);

}  // namespace hybrid
