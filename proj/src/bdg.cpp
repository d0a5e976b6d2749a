#include "hybrid/bdg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/Eigenvalues>

namespace hybrid {

namespace {

CMatrix swap_halves_columns(const CMatrix& m, int M) {
  CMatrix out(m.rows(), m.cols());
  out.leftCols(M) = m.rightCols(M);
  out.rightCols(M) = m.leftCols(M);
  return out;
}

// Deterministic basis change inside a degenerate cluster. Row i of `rows`
// (conjugated) is the coefficient vector of the unit vector e_i in the
// cluster's orthonormal coordinates. Rows are visited in order; the first row
// whose residual still carries at least 1/(4n) of weight contributes the next
// direction. Returns the k x k unitary coefficient matrix.
CMatrix canonical_coefficients(const CMatrix& rows) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index k = rows.cols();
  const double threshold = 1.0 / (4.0 * static_cast<double>(n));
  CMatrix coeffs(k, k);
  Eigen::Index chosen = 0;
  for (Eigen::Index row = 0; row < n && chosen < k; ++row) {
    CVector c = rows.row(row).adjoint();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < chosen; ++j) c -= coeffs.col(j) * coeffs.col(j).dot(c);
    }
    if (c.squaredNorm() >= threshold) coeffs.col(chosen++) = c.normalized();
  }
  // Unreachable for a full-rank cluster: some row always keeps enough weight.
  if (chosen < k) return CMatrix::Identity(k, k);
  return coeffs;
}

// Largest-magnitude entry (first on ties) rotated onto the positive real axis.
void fix_column_phase(Eigen::Ref<CVector> column) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < column.size(); ++i) {
    const double a = std::abs(column(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) column *= std::conj(column(best)) / best_abs;
}

// Index ranges [first, last) of clustered ascending energies.
std::vector<std::pair<int, int>> clusters(const RVector& sorted, double gap) {
  std::vector<std::pair<int, int>> out;
  int start = 0;
  for (int i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() || sorted(i) - sorted(i - 1) > gap) {
      out.emplace_back(start, i);
      start = i;
    }
  }
  return out;
}

BogoliubovDecomposition assemble_from_columns(CMatrix columns, const RVector& energies, Partition p) {
  const int M = p.modes();
  for (int j = 0; j < M; ++j) fix_column_phase(columns.col(j));
  BogoliubovDecomposition dec;
  dec.energies = energies;
  dec.partition = p;
  dec.A = columns.topRows(M).adjoint();
  dec.B = columns.bottomRows(M).adjoint();
  return dec;
}

// Colpa: H_bdg = K^dagger K, diagonalize K J K^dagger, rescale.
std::optional<BogoliubovDecomposition> colpa(const CMatrix& hb, Partition p, double degeneracy_gap) {
  const int M = p.modes();
  Eigen::LLT<CMatrix> llt(hb);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const CMatrix L = llt.matrixL();
  const CMatrix J = symplectic_form(M);
  CMatrix kjk = L.adjoint() * J * L;
  kjk = (0.5 * (kjk + kjk.adjoint())).eval();

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(kjk);
  if (eig.info() != Eigen::Success) return std::nullopt;
  const RVector values = eig.eigenvalues();
  if (!(values(M) > 0.0) || !(values(M - 1) < 0.0)) return std::nullopt;

  RVector energies = values.tail(M);
  CMatrix positive = eig.eigenvectors().rightCols(M);
  for (const auto& [first, last] : clusters(energies, degeneracy_gap)) {
    if (last - first > 1) {
      const CMatrix block = positive.middleCols(first, last - first);
      positive.middleCols(first, last - first) = block * canonical_coefficients(block);
    }
  }

  CMatrix columns(2 * M, M);
  const auto upper = L.adjoint().triangularView<Eigen::Upper>();
  for (int j = 0; j < M; ++j) {
    columns.col(j) = upper.solve(positive.col(j)) * std::sqrt(energies(j));
  }
  return assemble_from_columns(std::move(columns), energies, p);
}

// Eigenvectors of J H_bdg with positive symplectic norm, J-orthonormalized.
BogoliubovDecomposition eigenvector_route(const CMatrix& hb, Partition p, double threshold,
                                          double degeneracy_gap) {
  const int M = p.modes();
  const CMatrix J = symplectic_form(M);
  Eigen::ComplexEigenSolver<CMatrix> ces(J * hb);
  if (ces.info() != Eigen::Success) {
    throw InstabilityError("eigen-decomposition of J H did not converge", cplx{});
  }

  std::vector<int> positive;
  for (int i = 0; i < 2 * M; ++i) {
    const CVector v = ces.eigenvectors().col(i);
    const double norm = (v.adjoint() * J * v)(0, 0).real();
    if (norm > 0.0) positive.push_back(i);
  }
  if (static_cast<int>(positive.size()) != M) {
    cplx worst = ces.eigenvalues()(0);
    for (int i = 0; i < 2 * M; ++i) {
      if (std::abs(ces.eigenvalues()(i)) < std::abs(worst)) worst = ces.eigenvalues()(i);
    }
    throw InstabilityError("symplectic spectrum does not split into M positive-norm modes", worst);
  }
  for (int i : positive) {
    const cplx lambda = ces.eigenvalues()(i);
    if (lambda.real() <= threshold) {
      throw InstabilityError("quasiparticle energy is not positive", lambda);
    }
  }
  std::stable_sort(positive.begin(), positive.end(), [&](int a, int b) {
    return ces.eigenvalues()(a).real() < ces.eigenvalues()(b).real();
  });

  RVector energies(M);
  CMatrix columns(2 * M, M);
  for (int j = 0; j < M; ++j) {
    energies(j) = ces.eigenvalues()(positive[static_cast<std::size_t>(j)]).real();
    columns.col(j) = ces.eigenvectors().col(positive[static_cast<std::size_t>(j)]);
  }

  for (const auto& [first, last] : clusters(energies, degeneracy_gap)) {
    // J-Gram-Schmidt inside the cluster, then the same canonical choice of
    // basis as the Cholesky route (in J-orthonormal coefficients).
    for (int k = first; k < last; ++k) {
      for (int pass = 0; pass < 2; ++pass) {
        for (int j = first; j < k; ++j) {
          const cplx overlap = (columns.col(j).adjoint() * J * columns.col(k))(0, 0);
          columns.col(k) -= overlap * columns.col(j);
        }
      }
      const double norm = (columns.col(k).adjoint() * J * columns.col(k))(0, 0).real();
      if (!(norm > 0.0)) throw InstabilityError("degenerate mode lost positive norm", energies(k));
      columns.col(k) /= std::sqrt(norm);
    }
    if (last - first > 1) {
      // Coefficients of e_i in J-orthonormal coordinates are block^dagger J e_i.
      const CMatrix block = columns.middleCols(first, last - first);
      columns.middleCols(first, last - first) = block * canonical_coefficients(J * block);
    }
  }
  return assemble_from_columns(std::move(columns), energies, p);
}

}  // namespace

CMatrix QuadraticHamiltonian::bdg() const { return swap_halves_columns(H, modes()); }

double QuadraticHamiltonian::bdg_hermiticity_residual() const {
  const CMatrix hb = bdg();
  return max_abs(hb - hb.adjoint());
}

QuadraticHamiltonian assemble_hamiltonian(const CouplingBlocks& blocks) {
  blocks.check_dimensions();
  const Partition p = blocks.partition();
  const int Ma = p.atoms;
  const int M = p.modes();

  CMatrix eps = CMatrix::Zero(M, M);
  eps.topLeftCorner(Ma, Ma) = blocks.eps_a;
  eps.bottomRightCorner(p.photons, p.photons) = blocks.eps_ph;

  CMatrix chi = CMatrix::Zero(M, M);
  chi.topRightCorner(Ma, p.photons) = blocks.chi_aph();
  chi.bottomLeftCorner(p.photons, Ma) = blocks.chi_pha;
  chi.bottomRightCorner(p.photons, p.photons) = blocks.chi_phph;

  CMatrix chit = CMatrix::Zero(M, M);
  chit.topLeftCorner(Ma, Ma) = blocks.chit_aa;
  chit.topRightCorner(Ma, p.photons) = blocks.chit_aph();
  chit.bottomLeftCorner(p.photons, Ma) = blocks.chit_pha;

  CMatrix normal = eps + chi;
  normal = (0.5 * (normal + normal.adjoint())).eval();
  chit = (0.5 * (chit + chit.transpose())).eval();

  QuadraticHamiltonian h;
  h.partition = p;
  h.H.resize(2 * M, 2 * M);
  h.H.topLeftCorner(M, M) = chit;
  h.H.topRightCorner(M, M) = normal;
  h.H.bottomLeftCorner(M, M) = normal.conjugate();
  h.H.bottomRightCorner(M, M) = chit.conjugate();
  return h;
}

CMatrix symplectic_form(int modes) {
  CMatrix J = CMatrix::Identity(2 * modes, 2 * modes);
  J.bottomRightCorner(modes, modes) *= -1.0;
  return J;
}

StabilityReport check_stability(const QuadraticHamiltonian& h, const Tolerances& tol) {
  const int M = h.modes();
  StabilityReport report;

  const CMatrix hs = 0.5 * (h.H + h.H.adjoint());
  report.min_eigenvalue = Eigen::SelfAdjointEigenSolver<CMatrix>(hs, Eigen::EigenvaluesOnly).eigenvalues()(0);

  CMatrix hb = h.bdg();
  hb = (0.5 * (hb + hb.adjoint())).eval();
  const double scale = max_abs(hb);
  const double threshold = tol.stability * scale;
  report.positive_definite = report.min_eigenvalue > threshold && scale > 0.0;
  report.bdg_min_eigenvalue =
      Eigen::SelfAdjointEigenSolver<CMatrix>(hb, Eigen::EigenvaluesOnly).eigenvalues()(0);
  report.bdg_positive_definite = report.bdg_min_eigenvalue > threshold && scale > 0.0;

  Eigen::ComplexEigenSolver<CMatrix> ces(symplectic_form(M) * hb, false);
  for (Eigen::Index i = 0; i < ces.eigenvalues().size(); ++i) {
    report.symplectic_eigenvalues.push_back(ces.eigenvalues()(i));
  }
  std::sort(report.symplectic_eigenvalues.begin(), report.symplectic_eigenvalues.end(),
            [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  double min_positive = std::numeric_limits<double>::infinity();
  for (cplx z : report.symplectic_eigenvalues) {
    report.max_imaginary = std::max(report.max_imaginary, std::abs(z.imag()));
    if (z.real() >= 0.0) min_positive = std::min(min_positive, z.real());
  }
  report.min_quasiparticle_energy = std::isfinite(min_positive) ? min_positive : 0.0;
  report.stable = report.bdg_positive_definite && report.max_imaginary <= threshold;
  return report;
}

CMatrix BogoliubovDecomposition::transform() const {
  const int M = modes();
  CMatrix R(2 * M, 2 * M);
  R.topLeftCorner(M, M) = A.conjugate();
  R.topRightCorner(M, M) = -B.conjugate();
  R.bottomLeftCorner(M, M) = -B;
  R.bottomRightCorner(M, M) = A;
  return R;
}

CMatrix BogoliubovDecomposition::inverse_transform() const {
  const int M = modes();
  CMatrix R(2 * M, 2 * M);
  R.topLeftCorner(M, M) = A.transpose();
  R.topRightCorner(M, M) = B.adjoint();
  R.bottomLeftCorner(M, M) = B.transpose();
  R.bottomRightCorner(M, M) = A.adjoint();
  return R;
}

BogoliubovDecomposition BogoliubovDecomposition::from_transform(const CMatrix& transform,
                                                                const RVector& energies, Partition partition) {
  const int M = partition.modes();
  if (transform.rows() != 2 * M || transform.cols() != 2 * M) {
    throw DimensionError("transform must be 2M x 2M");
  }
  BogoliubovDecomposition dec;
  dec.partition = partition;
  dec.energies = energies;
  dec.A = transform.bottomRightCorner(M, M);
  dec.B = -transform.bottomLeftCorner(M, M);
  const double scale = std::max(1.0, max_abs(transform));
  if (max_abs(transform.topLeftCorner(M, M) - dec.A.conjugate()) > 1e-12 * scale ||
      max_abs(transform.topRightCorner(M, M) + dec.B.conjugate()) > 1e-12 * scale) {
    throw DimensionError("transform does not have the [[A*, -B*], [-B, A]] block structure");
  }
  return dec;
}

double symplectic_residual(const BogoliubovDecomposition& dec) {
  const CMatrix R = dec.transform();
  const CMatrix J = symplectic_form(dec.modes());
  return max_abs(R * J * R.adjoint() - J);
}

double diagonalization_residual(const QuadraticHamiltonian& h, const BogoliubovDecomposition& dec) {
  const int M = dec.modes();
  // Nambu-ordered inverse transform: (c; c^dagger) = T (c~; c~^dagger).
  CMatrix T(2 * M, 2 * M);
  T.topLeftCorner(M, M) = dec.A.adjoint();
  T.topRightCorner(M, M) = dec.B.transpose();
  T.bottomLeftCorner(M, M) = dec.B.adjoint();
  T.bottomRightCorner(M, M) = dec.A.transpose();
  CMatrix target = CMatrix::Zero(2 * M, 2 * M);
  for (int j = 0; j < M; ++j) {
    target(j, j) = dec.energies(j);
    target(M + j, M + j) = dec.energies(j);
  }
  return max_abs(T.adjoint() * h.bdg() * T - target);
}

BogoliubovDecomposition bogoliubov_diagonalize(const QuadraticHamiltonian& h, const Tolerances& tol,
                                               DiagonalizationRoute route) {
  const int M = h.modes();
  if (M < 1) throw DimensionError("Hamiltonian has no modes");
  CMatrix hb = h.bdg();
  hb = (0.5 * (hb + hb.adjoint())).eval();
  const double scale = max_abs(hb);
  const double threshold = tol.stability * scale;
  if (scale == 0.0) throw InstabilityError("zero Hamiltonian: all quasiparticle energies vanish", cplx{});

  Eigen::ComplexEigenSolver<CMatrix> spectrum(symplectic_form(M) * hb, false);
  for (Eigen::Index i = 0; i < spectrum.eigenvalues().size(); ++i) {
    const cplx z = spectrum.eigenvalues()(i);
    if (std::abs(z.imag()) > threshold) throw InstabilityError("complex symplectic eigenvalue", z);
    if (std::abs(z.real()) <= threshold) throw InstabilityError("zero symplectic eigenvalue", z);
  }

  const double gap = tol.degeneracy * std::max(1.0, scale);
  if (route != DiagonalizationRoute::Eigenvector) {
    if (auto dec = colpa(hb, h.partition, gap)) {
      if (dec->energies(0) <= threshold) {
        throw InstabilityError("quasiparticle energy is not positive", dec->energies(0));
      }
      return *dec;
    }
    if (route == DiagonalizationRoute::Cholesky) {
      throw InstabilityError("Hamiltonian is not positive definite (Cholesky failed)",
                             spectrum.eigenvalues()(0));
    }
  }
  return eigenvector_route(hb, h.partition, threshold, gap);
}

}  // namespace hybrid
