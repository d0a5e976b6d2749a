#pragma once

namespace hybrid {

// Numerical thresholds used across the pipeline. Every field is exposed on
// the command line as --tol-<name> with these values as defaults.
struct Tolerances {
  double hermiticity = 1e-12;     // block Hermiticity after symmetrization
  double orthonormality = 1e-6;   // raw grid Gram residual before the grid is rejected
  double stability = 1e-10;       // |Im| of symplectic eigenvalues, relative to max|H|
  double degeneracy = 1e-12;      // energy clustering, relative to max(1, max|H|)
  double symplectic = 1e-10;      // max|R J R^dagger - J|
  double reconstruction = 1e-9;   // Bloch-Messiah block reconstruction
  double squeeze_clamp = 1e-12;   // r_j below this is set to exactly zero
  double c_symmetry = 1e-8;       // max|C - C^T| accepted before symmetrizing
  double imaginary = 1e-9;        // relative imaginary residual of a probability
  double negative_clamp = 1e-12;  // probabilities in [-tol, 0) are clamped to zero
  double correlator = 1e-10;      // covariance formula vs direct correlators
  double moments = 1e-6;          // enumerated means vs mean occupations
};

}  // namespace hybrid
