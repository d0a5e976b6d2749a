#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybrid/tolerances.hpp"
#include "hybrid/types.hpp"

namespace hybrid {

enum class BlockSource { Geometry1D, DirectBlocks };

std::string_view to_string(BlockSource source);

struct GridSpec {
  double half_length = 8.0;
  int points = 32768;
};

/// The matrices entering the effective quadratic Hamiltonian. Only the
/// independent blocks are stored; the atom-photon blocks are derived.
struct CouplingBlocks {
  CMatrix eps_a;     // M_a x M_a, Hermitian
  CMatrix eps_ph;    // M_ph x M_ph, diagonal photon energies
  CMatrix chi_phph;  // M_ph x M_ph, Hermitian
  CMatrix chi_pha;   // M_ph x M_a, co-rotating photon-atom
  CMatrix chit_aa;   // M_a x M_a, symmetric counter-rotating atom-atom
  CMatrix chit_pha;  // M_ph x M_a, counter-rotating photon-atom

  /// Co-rotating atom-photon block, the Hermitian conjugate of chi_pha.
  CMatrix chi_aph() const { return chi_pha.adjoint(); }
  /// Counter-rotating atom-photon block. Pair-creation terms only see the
  /// symmetric part of the full counter-rotating matrix, so this is the
  /// transpose of chit_pha (identical to the conjugate transpose for real
  /// profiles).
  CMatrix chit_aph() const { return chit_pha.transpose(); }

  Partition partition() const {
    return {static_cast<int>(eps_a.rows()), static_cast<int>(eps_ph.rows())};
  }

  /// Throws DimensionError when block shapes disagree with each other.
  void check_dimensions() const;

  /// Replaces the Hermitian and symmetric blocks by their exact
  /// (X + X^dagger)/2 and (X + X^T)/2 parts.
  void symmetrize();
};

struct SystemConfig {
  BlockSource mode = BlockSource::Geometry1D;
  int M_a = 0;
  int M_ph = 0;
  double g_a_N0 = 0.0;
  std::optional<double> delta_a;
  std::vector<double> delta_nu;
  std::vector<double> omega_nu;
  double rabi_drive_amp = 0.0;
  std::vector<double> rabi_mode_amp;
  double mu = 0.0;
  double n_ex = 0.0;
  double temperature = 0.0;
  std::vector<double> kappa_nu;
  std::optional<double> omega_r;
  std::optional<double> N_atoms;
  GridSpec grid;
  std::optional<CouplingBlocks> direct_blocks;

  Partition partition() const { return {M_a, M_ph}; }
  int modes() const { return M_a + M_ph; }

  /// Checks every invariant; throws ConfigError naming the first offending field.
  void validate() const;
};

/// Parses and validates a JSON configuration document. Parse errors carry the
/// line and column; schema errors name the field.
SystemConfig load_config(std::string_view text);
SystemConfig load_config_file(const std::string& path);

/// Grid-sampled single-particle functions of the 1-D toy geometry.
struct ModeBasis {
  RVector x;
  RVector weights;
  double spacing = 0.0;
  RVector phi0;             // condensate wavefunction
  RMatrix phi;              // N_grid x M_a excited atomic states
  RVector omega0_profile;   // drive Rabi profile
  RMatrix omega_nu_profiles;  // N_grid x M_ph cavity-mode Rabi profiles
  double raw_orthonormality_residual = 0.0;

  int points() const { return static_cast<int>(x.size()); }

  /// Quadrature inner product of two real grid functions.
  double integrate(const RVector& f) const { return weights.dot(f); }

  /// max |Gram - I| over {phi0, phi_1 .. phi_Ma}.
  double orthonormality_residual() const;
};

/// Width and centre of the Gaussian drive profile, in trap units.
inline constexpr double kDriveWidth = 2.0;
inline constexpr double kDriveCentre = 0.5;

ModeBasis build_mode_basis(const SystemConfig& cfg, const Tolerances& tol = {});

CouplingBlocks compute_coupling_blocks(const ModeBasis& basis, const SystemConfig& cfg);

/// Blocks for either mode: quadrature in Geometry1D, the symmetrized raw
/// blocks in DirectBlocks.
CouplingBlocks coupling_blocks_for(const SystemConfig& cfg, const Tolerances& tol = {});

/// tau_s ~ N kappa^3 Delta_a^2 / (Delta_nu Omega_0^2 Omega_nu^2 omega_r),
/// evaluated with the first cavity mode.
double estimate_scattering_time(const SystemConfig& cfg);

}  // namespace hybrid
