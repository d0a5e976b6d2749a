#include "hybrid/pipeline.hpp"

namespace hybrid {

Pipeline run_pipeline(const SystemConfig& cfg, Stage last, const Tolerances& tol) {
  Pipeline p;
  p.config = cfg;
  p.tol = tol;
  if (cfg.mode == BlockSource::Geometry1D) {
    p.basis = build_mode_basis(cfg, tol);
    p.blocks = compute_coupling_blocks(*p.basis, cfg);
  } else {
    p.blocks = coupling_blocks_for(cfg, tol);
  }
  if (last == Stage::Blocks) return p;

  p.hamiltonian = assemble_hamiltonian(p.blocks);
  p.stability = check_stability(*p.hamiltonian, tol);
  if (last == Stage::Hamiltonian) return p;

  p.decomposition = bogoliubov_diagonalize(*p.hamiltonian, tol);
  if (last == Stage::Decomposition) return p;

  p.factors = bloch_messiah(*p.decomposition, tol);
  if (last == Stage::Factors) return p;

  p.state = covariance(*p.decomposition, cfg.temperature, tol);
  return p;
}

}  // namespace hybrid
