#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hybrid {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Detector counts: atom counts N_1..N_Ma followed by photon counts q_1..q_Mph.
using CountsVector = std::vector<int>;

/// Split of the sampled modes into bare-atom excited states and cavity modes.
/// Atom modes always come first in every vector and matrix.
struct Partition {
  int atoms = 0;
  int photons = 0;

  int modes() const { return atoms + photons; }
  bool operator==(const Partition&) const = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Schema or invariant violation in a configuration document.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

/// Raised when the quadratic Hamiltonian has no thermal state: a symplectic
/// eigenvalue is complex or a quasiparticle energy is not positive.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& message, cplx eigenvalue)
      : Error(message), eigenvalue_(eigenvalue) {}

  cplx eigenvalue() const { return eigenvalue_; }

 private:
  cplx eigenvalue_;
};

class ReconstructionError : public Error {
 public:
  ReconstructionError(const std::string& message, double residual)
      : Error(message), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

class AsymmetryError : public Error {
 public:
  using Error::Error;
};

class ImaginaryResidualError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

class NegativeProbabilityError : public Error {
 public:
  using Error::Error;
};

class StatisticsError : public Error {
 public:
  using Error::Error;
};

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace hybrid
