#include "hybrid/gaussian.hpp"

#include <cmath>
#include <numeric>

namespace hybrid {

double thermal_factor(double energy, double temperature) {
  if (temperature <= 0.0) return 1.0;
  const double x = energy / (2.0 * temperature);
  if (x > 350.0) return 1.0;
  return 1.0 / std::tanh(x);
}

double bose_occupation(double energy, double temperature) {
  if (temperature <= 0.0) return 0.0;
  const double x = energy / temperature;
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

BaseMatrix base_matrix(const CMatrix& G, const Tolerances& tol) {
  const Eigen::Index n = G.rows();
  const Eigen::Index M = n / 2;
  const CMatrix one_plus = CMatrix::Identity(n, n) + G;
  // G (1 + G)^{-1} = ((1 + G)^{-T} G^T)^T
  const CMatrix ratio = Eigen::PartialPivLU<CMatrix>(one_plus.transpose()).solve(G.transpose()).transpose();
  CMatrix C(n, n);
  C.topRows(M) = ratio.bottomRows(M);
  C.bottomRows(M) = ratio.topRows(M);

  BaseMatrix out;
  out.asymmetry = max_abs(C - C.transpose());
  if (!(out.asymmetry <= tol.c_symmetry)) {
    throw AsymmetryError("base matrix C is not symmetric: residual " + std::to_string(out.asymmetry));
  }
  out.C = 0.5 * (C + C.transpose());
  return out;
}

GaussianState state_from_covariance(const CMatrix& G, double temperature, Partition partition,
                                    const Tolerances& tol) {
  if (G.rows() != 2 * partition.modes() || G.cols() != G.rows()) {
    throw DimensionError("covariance matrix must be 2M x 2M");
  }
  GaussianState state;
  state.G = G;
  state.temperature = temperature;
  state.partition = partition;
  BaseMatrix base = base_matrix(G, tol);
  state.C = std::move(base.C);
  state.c_asymmetry = base.asymmetry;

  const Eigen::PartialPivLU<CMatrix> lu(CMatrix::Identity(G.rows(), G.cols()) + G);
  const CMatrix& lu_matrix = lu.matrixLU();
  double log_abs = 0.0;
  for (Eigen::Index i = 0; i < lu_matrix.rows(); ++i) log_abs += std::log(std::abs(lu_matrix(i, i)));
  state.log_norm = 0.5 * log_abs;
  return state;
}

GaussianState covariance(const BogoliubovDecomposition& dec, double temperature, const Tolerances& tol) {
  const int M = dec.modes();
  RVector q(2 * M);
  for (int j = 0; j < M; ++j) {
    q(j) = q(M + j) = thermal_factor(dec.energies(j), temperature);
  }
  const CMatrix R = dec.transform().partialPivLu().inverse();
  CMatrix G = 0.5 * R * q.asDiagonal() * R.adjoint();
  G.diagonal().array() -= 0.5;
  return state_from_covariance(G, temperature, dec.partition, tol);
}

void extend_matrix_into(const CMatrix& C, const CountsVector& counts, CMatrix& out) {
  const Eigen::Index M = C.rows() / 2;
  if (static_cast<Eigen::Index>(counts.size()) != M) {
    throw DimensionError("counts vector has " + std::to_string(counts.size()) + " entries, expected " +
                         std::to_string(M));
  }
  for (int m : counts) {
    if (m < 0) throw DimensionError("counts must be nonnegative");
  }
  const int n = std::accumulate(counts.begin(), counts.end(), 0);
  thread_local std::vector<Eigen::Index> idx;
  idx.clear();
  for (Eigen::Index j = 0; j < M; ++j) idx.insert(idx.end(), static_cast<std::size_t>(counts[j]), j);
  for (Eigen::Index j = 0; j < M; ++j) idx.insert(idx.end(), static_cast<std::size_t>(counts[j]), M + j);
  out.resize(2 * n, 2 * n);
  for (Eigen::Index b = 0; b < 2 * n; ++b) {
    for (Eigen::Index a = 0; a < 2 * n; ++a) out(a, b) = C(idx[a], idx[b]);
  }
}

CMatrix extend_matrix(const CMatrix& C, const CountsVector& counts) {
  CMatrix out;
  extend_matrix_into(C, counts, out);
  return out;
}

CMatrix correlators_from_occupations(const BogoliubovDecomposition& dec, double temperature) {
  const int M = dec.modes();
  RVector n(M), n1(M);
  for (int k = 0; k < M; ++k) {
    n(k) = bose_occupation(dec.energies(k), temperature);
    n1(k) = n(k) + 1.0;
  }
  const CMatrix& A = dec.A;
  const CMatrix& B = dec.B;
  const CMatrix normal = A.transpose() * n.asDiagonal() * A.conjugate() + B.adjoint() * n1.asDiagonal() * B;
  const CMatrix anomalous = A.adjoint() * n1.asDiagonal() * B + B.transpose() * n.asDiagonal() * A.conjugate();
  CMatrix G(2 * M, 2 * M);
  G.topLeftCorner(M, M) = normal;
  G.topRightCorner(M, M) = anomalous.conjugate();
  G.bottomLeftCorner(M, M) = anomalous;
  G.bottomRightCorner(M, M) = normal.transpose();
  return G;
}

RVector mean_occupations(const GaussianState& g) {
  const int M = g.modes();
  return g.G.topLeftCorner(M, M).diagonal().real();
}

}  // namespace hybrid
