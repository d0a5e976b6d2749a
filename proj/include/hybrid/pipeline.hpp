#pragma once

#include <optional>

#include "hybrid/bdg.hpp"
#include "hybrid/blochmessiah.hpp"
#include "hybrid/gaussian.hpp"
#include "hybrid/model.hpp"

namespace hybrid {

enum class Stage { Blocks, Hamiltonian, Decomposition, Factors, State };

/// Every product computed for one configuration, up to the requested stage.
struct Pipeline {
  SystemConfig config;
  Tolerances tol;
  std::optional<ModeBasis> basis;  // Geometry1D only
  CouplingBlocks blocks;
  std::optional<QuadraticHamiltonian> hamiltonian;
  std::optional<StabilityReport> stability;
  std::optional<BogoliubovDecomposition> decomposition;
  std::optional<BlochMessiahFactors> factors;
  std::optional<GaussianState> state;
};

/// Runs the stages in order up to `last`. Throws InstabilityError when the
/// decomposition is requested for an unstable Hamiltonian.
Pipeline run_pipeline(const SystemConfig& cfg, Stage last, const Tolerances& tol = {});

}  // namespace hybrid
