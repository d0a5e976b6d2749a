#pragma once

#include <optional>

#include "hybrid/bdg.hpp"
#include "hybrid/model.hpp"

namespace hybrid {

/// A = W cosh(r) V and B = -W sinh(r) V*, with r descending.
struct BlochMessiahFactors {
  CMatrix V;  // bare -> eigen-squeeze modes
  CMatrix W;  // eigen-squeeze -> quasiparticle modes
  RVector r;  // squeeze parameters, >= 0, descending
  double reconstruction_residual = 0.0;

  int modes() const { return static_cast<int>(r.size()); }
};

/// Irreducible Bloch-Messiah reduction of a Bogoliubov transform.
///
/// W comes from a Takagi factorization of the symmetric matrix
/// -B A^T = W sinh(r) cosh(r) W^T, computed as the positive spectrum of its
/// real symmetric embedding [[Re, Im], [Im, -Re]]. V = cosh(r)^{-1} W^dagger A.
/// Columns with r > 0 are fixed up to sign by B = -W sinh(r) V*; the sign
/// makes the largest-magnitude entry's real part positive. Columns with r = 0
/// span the complement and follow the same convention as the Bogoliubov
/// routine: deterministic basis, largest entry real positive.
BlochMessiahFactors bloch_messiah(const BogoliubovDecomposition& dec, const Tolerances& tol = {});

/// Reconstruction residual max(|A - W cosh V|, |B + W sinh V*|).
double reconstruction_residual(const BlochMessiahFactors& f, const BogoliubovDecomposition& dec);

RVector squeeze_spectrum(const BlochMessiahFactors& f);

/// Grid-sampled eigen-squeeze and quasiparticle mode functions. Atom
/// components are grid functions; photon components are coefficient vectors
/// over the cavity modes. Column j of each matrix belongs to mode j.
struct ModeFunctions {
  RVector x;
  RVector weights;
  CMatrix eigen_squeeze_atom;    // N_grid x M
  CMatrix eigen_squeeze_photon;  // M_ph x M
  CMatrix u_atom, u_photon;
  CMatrix v_atom, v_photon;

  /// Int |u_j|^2 - |v_j|^2 over both components.
  RVector bosonic_norms() const;
};

ModeFunctions mode_functions(const BlochMessiahFactors& f, const std::optional<ModeBasis>& basis,
                             const BogoliubovDecomposition& dec);

}  // namespace hybrid
