#pragma once

#include <cstdint>
#include <vector>

#include "kzqfi/mps.hpp"
#include "kzqfi/tfim.hpp"

namespace kzqfi::dmrg {

struct DMRGConfig {
  std::size_t chi_max = 100;
  double svd_eps = 1e-12;
  std::size_t max_sweeps = 20;
  double energy_tol = 1e-10;
  double local_solver_tol = 1e-12;
  std::uint64_t seed = 7;  // initial random MPS; fixed for reproducibility
};

struct DMRGResult {
  mps::MPSState psi;
  double energy = 0.0;
  std::vector<double> energy_per_sweep;
  std::size_t sweeps = 0;
};

/// Two-site DMRG ground state of H(g) on params.n_sites sites. Converges when
/// the sweep-to-sweep energy change drops below energy_tol; throws
/// ConvergenceError carrying the energy trace after max_sweeps without
/// convergence. The returned state is normalized with the center at site 0.
DMRGResult ground_state(const tfim::ModelParams& params, double g,
                        const DMRGConfig& cfg);

}  // namespace kzqfi::dmrg
