#include "hybrid/blochmessiah.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace hybrid {

namespace {

Eigen::Index largest_entry(const CVector& column) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    const double a = std::abs(column(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

// Squeezed columns only admit a sign flip.
void fix_column_sign(Eigen::Ref<CVector> column) {
  const cplx lead = column(largest_entry(column));
  const bool flip = std::abs(lead.real()) > 1e-3 * std::abs(lead) ? lead.real() < 0.0 : lead.imag() < 0.0;
  if (flip) column = -column;
}

void fix_column_phase(Eigen::Ref<CVector> column) {
  const cplx lead = column(largest_entry(column));
  if (std::abs(lead) > 0.0) column *= std::conj(lead) / std::abs(lead);
}

// Completes the first `filled` orthonormal columns of W to a unitary, visiting
// unit vectors in order.
void complete_basis(CMatrix& W, Eigen::Index filled) {
  const Eigen::Index n = W.rows();
  const double threshold = 1.0 / (4.0 * static_cast<double>(n));
  Eigen::Index chosen = filled;
  for (Eigen::Index i = 0; i < n && chosen < n; ++i) {
    CVector c = CVector::Unit(n, i);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < chosen; ++j) c -= W.col(j) * W.col(j).dot(c);
    }
    if (c.squaredNorm() >= threshold) {
      W.col(chosen) = c.normalized();
      fix_column_phase(W.col(chosen));
      ++chosen;
    }
  }
}

}  // namespace

double reconstruction_residual(const BlochMessiahFactors& f, const BogoliubovDecomposition& dec) {
  const RVector c = f.r.array().cosh();
  const RVector s = f.r.array().sinh();
  const CMatrix A = f.W * c.asDiagonal() * f.V;
  const CMatrix B = -f.W * s.asDiagonal() * f.V.conjugate();
  return std::max(max_abs(A - dec.A), max_abs(B - dec.B));
}

BlochMessiahFactors bloch_messiah(const BogoliubovDecomposition& dec, const Tolerances& tol) {
  const Eigen::Index M = dec.modes();
  CMatrix Z = -dec.B * dec.A.transpose();
  Z = (0.5 * (Z + Z.transpose())).eval();

  // Takagi factorization Z = W diag(sigma) W^T from the real embedding.
  RMatrix embedding(2 * M, 2 * M);
  embedding.topLeftCorner(M, M) = Z.real();
  embedding.topRightCorner(M, M) = Z.imag();
  embedding.bottomLeftCorner(M, M) = Z.imag();
  embedding.bottomRightCorner(M, M) = -Z.real();
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(embedding);

  BlochMessiahFactors f;
  f.W = CMatrix::Zero(M, M);
  f.r = RVector::Zero(M);
  Eigen::Index squeezed = 0;
  for (Eigen::Index k = 0; k < M; ++k) {
    const Eigen::Index idx = 2 * M - 1 - k;
    const double sigma = eig.eigenvalues()(idx);
    const double r = 0.5 * std::asinh(2.0 * std::max(sigma, 0.0));
    if (r < tol.squeeze_clamp) break;
    const auto vec = eig.eigenvectors().col(idx);
    f.W.col(squeezed) = (vec.head(M).cast<cplx>() + cplx(0.0, 1.0) * vec.tail(M).cast<cplx>()).normalized();
    fix_column_sign(f.W.col(squeezed));
    f.r(squeezed) = r;
    ++squeezed;
  }
  complete_basis(f.W, squeezed);

  const RVector inv_cosh = f.r.array().cosh().inverse();
  f.V = inv_cosh.asDiagonal() * f.W.adjoint() * dec.A;
  f.reconstruction_residual = reconstruction_residual(f, dec);
  if (!(f.reconstruction_residual <= tol.reconstruction)) {
    throw ReconstructionError("Bloch-Messiah reconstruction residual " + std::to_string(f.reconstruction_residual) +
                                  " exceeds tolerance; the transform is not symplectic",
                              f.reconstruction_residual);
  }
  return f;
}

RVector squeeze_spectrum(const BlochMessiahFactors& f) { return f.r; }

RVector ModeFunctions::bosonic_norms() const {
  const Eigen::Index M = u_photon.cols();
  RVector norms(M);
  for (Eigen::Index j = 0; j < M; ++j) {
    const double atom = weights.dot(u_atom.col(j).cwiseAbs2()) - weights.dot(v_atom.col(j).cwiseAbs2());
    const double photon = u_photon.col(j).squaredNorm() - v_photon.col(j).squaredNorm();
    norms(j) = atom + photon;
  }
  return norms;
}

ModeFunctions mode_functions(const BlochMessiahFactors& f, const std::optional<ModeBasis>& basis,
                             const BogoliubovDecomposition& dec) {
  if (!basis) throw ConfigError("mode", "mode functions need a grid basis (Geometry1D mode)");
  const Partition p = dec.partition;
  if (basis->phi.cols() != p.atoms) throw DimensionError("mode basis does not match the decomposition");

  ModeFunctions out;
  out.x = basis->x;
  out.weights = basis->weights;
  const CMatrix phi = basis->phi.cast<cplx>();
  out.eigen_squeeze_atom = phi * f.V.leftCols(p.atoms).adjoint();
  out.eigen_squeeze_photon = f.V.rightCols(p.photons).adjoint();

  const RVector c = f.r.array().cosh();
  const RVector s = f.r.array().sinh();
  const CMatrix u_mix = c.asDiagonal() * f.W.adjoint();
  const CMatrix v_mix = -(s.asDiagonal() * f.W.transpose());
  out.u_atom = out.eigen_squeeze_atom * u_mix;
  out.u_photon = out.eigen_squeeze_photon * u_mix;
  out.v_atom = (out.eigen_squeeze_atom * v_mix).conjugate();
  out.v_photon = (out.eigen_squeeze_photon * v_mix).conjugate();
  return out;
}

}  // namespace hybrid
