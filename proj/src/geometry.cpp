#include <cmath>
#include <numbers>

#include "hybrid/model.hpp"

namespace hybrid {

namespace {

// Eigenfunctions 0..count-1 of the unit-frequency harmonic trap, by the
// three-term recurrence for Hermite functions.
RMatrix hermite_functions(const RVector& x, int count) {
  RMatrix psi(x.size(), count);
  if (count == 0) return psi;
  const double norm0 = std::pow(std::numbers::pi, -0.25);
  psi.col(0) = (norm0 * (-0.5 * x.array().square()).exp()).matrix();
  if (count > 1) psi.col(1) = (std::sqrt(2.0) * x.array() * psi.col(0).array()).matrix();
  for (int n = 1; n + 1 < count; ++n) {
    const double a = std::sqrt(2.0 / (n + 1));
    const double b = std::sqrt(static_cast<double>(n) / (n + 1));
    psi.col(n + 1) = (a * x.array() * psi.col(n).array() - b * psi.col(n - 1).array()).matrix();
  }
  return psi;
}

// Second-order central difference of f with f = 0 beyond both ends.
RVector laplacian(const RVector& f, double h) {
  const Eigen::Index n = f.size();
  RVector out(n);
  const double inv_h2 = 1.0 / (h * h);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = i > 0 ? f(i - 1) : 0.0;
    const double right = i + 1 < n ? f(i + 1) : 0.0;
    out(i) = (left - 2.0 * f(i) + right) * inv_h2;
  }
  return out;
}

}  // namespace

double ModeBasis::orthonormality_residual() const {
  RMatrix all(x.size(), phi.cols() + 1);
  all.col(0) = phi0;
  all.rightCols(phi.cols()) = phi;
  const RMatrix gram = all.transpose() * weights.asDiagonal() * all;
  return (gram - RMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

ModeBasis build_mode_basis(const SystemConfig& cfg, const Tolerances& tol) {
  if (cfg.mode != BlockSource::Geometry1D) {
    throw ConfigError("mode", "a grid basis exists only in Geometry1D mode");
  }
  const int n = cfg.grid.points;
  const double L = cfg.grid.half_length;
  // Interior points of [-L, L]; the endpoints carry the zero boundary values.
  const double h = 2.0 * L / (n + 1);

  ModeBasis basis;
  basis.spacing = h;
  basis.x = RVector::LinSpaced(n, -L + h, L - h);
  basis.weights = RVector::Constant(n, h);

  RMatrix states = hermite_functions(basis.x, cfg.M_a + 1);
  {
    const RMatrix gram = states.transpose() * basis.weights.asDiagonal() * states;
    basis.raw_orthonormality_residual =
        (gram - RMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  }
  if (basis.raw_orthonormality_residual > tol.orthonormality) {
    throw GridError("grid too coarse: orthonormality residual " +
                    std::to_string(basis.raw_orthonormality_residual) + " exceeds " +
                    std::to_string(tol.orthonormality) + "; increase grid.points or grid.half_length");
  }

  // Modified Gram-Schmidt in the quadrature metric, two passes.
  for (Eigen::Index k = 0; k < states.cols(); ++k) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const double overlap = basis.weights.dot(states.col(j).cwiseProduct(states.col(k)));
        states.col(k) -= overlap * states.col(j);
      }
    }
    const double norm = std::sqrt(basis.weights.dot(states.col(k).cwiseAbs2()));
    states.col(k) /= norm;
  }
  basis.phi0 = states.col(0);
  basis.phi = states.rightCols(cfg.M_a);

  const double width2 = 2.0 * kDriveWidth * kDriveWidth;
  basis.omega0_profile =
      (cfg.rabi_drive_amp * (-(basis.x.array() - kDriveCentre).square() / width2).exp()).matrix();

  basis.omega_nu_profiles.resize(n, cfg.M_ph);
  for (int k = 0; k < cfg.M_ph; ++k) {
    const int nu = k + 1;
    const double wavenumber = (nu + 1) * std::numbers::pi / L;
    basis.omega_nu_profiles.col(k) =
        (cfg.rabi_mode_amp[static_cast<std::size_t>(k)] * (wavenumber * basis.x.array()).cos()).matrix();
  }
  return basis;
}

CouplingBlocks compute_coupling_blocks(const ModeBasis& basis, const SystemConfig& cfg) {
  const int Ma = cfg.M_a;
  const int Mph = cfg.M_ph;
  if (basis.phi.cols() != Ma || basis.omega_nu_profiles.cols() != Mph) {
    throw DimensionError("mode basis does not match M_a / M_ph of the configuration");
  }
  const double inv_delta = 1.0 / cfg.delta_a.value();
  const RVector& w = basis.weights;
  const RVector condensate_density = basis.phi0.cwiseAbs2();

  // Diagonal potential of the single-atom operator, including the
  // Bogoliubov-Popov mean-field shift; n_ex is per condensate atom.
  const RVector potential =
      (0.5 * basis.x.array().square() + basis.omega0_profile.array().square() * inv_delta - cfg.mu +
       2.0 * cfg.g_a_N0 * (condensate_density.array() + cfg.n_ex))
          .matrix();

  RMatrix eps_a(Ma, Ma), chit_aa(Ma, Ma);
  for (int lp = 0; lp < Ma; ++lp) {
    const RVector phi_lp = basis.phi.col(lp);
    const RVector applied = -0.5 * laplacian(phi_lp, basis.spacing) + potential.cwiseProduct(phi_lp);
    const RVector pair = phi_lp.cwiseProduct(condensate_density);
    for (int l = 0; l < Ma; ++l) {
      eps_a(l, lp) = w.dot(basis.phi.col(l).cwiseProduct(applied));
      chit_aa(l, lp) = cfg.g_a_N0 * w.dot(basis.phi.col(l).cwiseProduct(pair));
    }
  }

  RMatrix chi_phph(Mph, Mph);
  for (int nu = 0; nu < Mph; ++nu) {
    for (int nup = 0; nup < Mph; ++nup) {
      chi_phph(nu, nup) = inv_delta * w.dot(basis.omega_nu_profiles.col(nu)
                                                 .cwiseProduct(basis.omega_nu_profiles.col(nup))
                                                 .cwiseProduct(condensate_density));
    }
  }

  // For real profiles the co- and counter-rotating photon-atom integrals
  // coincide: Omega_nu* Omega_0 phi_l phi_0* and Omega_nu* Omega_0 phi_l* phi_0.
  RMatrix chi_pha(Mph, Ma), chit_pha(Mph, Ma);
  const RVector drive_condensate = basis.omega0_profile.cwiseProduct(basis.phi0);
  for (int nu = 0; nu < Mph; ++nu) {
    const RVector mode_drive = basis.omega_nu_profiles.col(nu).cwiseProduct(drive_condensate);
    for (int l = 0; l < Ma; ++l) {
      const double value = inv_delta * w.dot(mode_drive.cwiseProduct(basis.phi.col(l)));
      chi_pha(nu, l) = value;
      chit_pha(nu, l) = value;
    }
  }

  CouplingBlocks blocks;
  blocks.eps_a = eps_a.cast<cplx>();
  blocks.eps_ph = CMatrix::Zero(Mph, Mph);
  for (int nu = 0; nu < Mph; ++nu) blocks.eps_ph(nu, nu) = cfg.omega_nu[static_cast<std::size_t>(nu)];
  blocks.chi_phph = chi_phph.cast<cplx>();
  blocks.chi_pha = chi_pha.cast<cplx>();
  blocks.chit_aa = chit_aa.cast<cplx>();
  blocks.chit_pha = chit_pha.cast<cplx>();
  blocks.symmetrize();
  return blocks;
}

CouplingBlocks coupling_blocks_for(const SystemConfig& cfg, const Tolerances& tol) {
  if (cfg.mode == BlockSource::DirectBlocks) {
    CouplingBlocks blocks = cfg.direct_blocks.value();
    blocks.check_dimensions();
    blocks.symmetrize();
    return blocks;
  }
  return compute_coupling_blocks(build_mode_basis(cfg, tol), cfg);
}

double estimate_scattering_time(const SystemConfig& cfg) {
  auto first = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) throw ConfigError(name, "required for the scattering-time estimate (mode 1)");
    return v.front();
  };
  auto scalar = [](const std::optional<double>& v, const char* name) {
    if (!v) throw ConfigError(name, "required for the scattering-time estimate");
    return *v;
  };
  const double N = scalar(cfg.N_atoms, "N_atoms");
  const double kappa = first(cfg.kappa_nu, "kappa_nu");
  const double delta_a = scalar(cfg.delta_a, "delta_a");
  const double delta_nu = first(cfg.delta_nu, "delta_nu");
  const double omega0 = cfg.rabi_drive_amp;
  const double omega_nu = first(cfg.rabi_mode_amp, "rabi_mode_amp");
  const double omega_r = scalar(cfg.omega_r, "omega_r");

  if (delta_nu == 0.0) throw ConfigError("delta_nu", "zero in the scattering-time denominator");
  if (omega0 == 0.0) throw ConfigError("rabi_drive_amp", "zero in the scattering-time denominator");
  if (omega_nu == 0.0) throw ConfigError("rabi_mode_amp", "zero in the scattering-time denominator");
  if (omega_r == 0.0) throw ConfigError("omega_r", "zero in the scattering-time denominator");

  const double numerator = N * (kappa * kappa * kappa) * (delta_a * delta_a);
  const double denominator = delta_nu * (omega0 * omega0) * (omega_nu * omega_nu) * omega_r;
  return numerator / denominator;
}

}  // namespace hybrid
