#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kzqfi/mps.hpp"
#include "kzqfi/tfim.hpp"

namespace kzqfi::tebd {

struct TEBDConfig {
  double dt = 0.02;
  std::size_t chi_max = 100;
  double svd_eps = 1e-11;
  double truncation_budget = 1e-3;
  std::size_t checkpoint_every = 0;  // steps; 0 = never
  std::string checkpoint_path;
  std::size_t record_every = 0;  // trace rows every k steps; 0 = end only
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> g_values;
  std::vector<double> cumulative_truncation;
  std::vector<std::size_t> max_bond_dim;
  /// Largest per-step deviation of the pre-renormalization norm from 1,
  /// with the truncation loss factored out.
  double max_step_norm_drift = 0.0;
};

struct EvolveResult {
  mps::MPSState psi;
  EvolutionTrace trace;
};

/// Invoked at every recorded step (and at the end) with the step index, the
/// step's end time, and the current state.
using RecordCallback =
    std::function<void(std::size_t, double, const mps::MPSState&)>;

/// Evolves psi through the schedule with second-order Trotter steps of cfg.dt
/// (field sampled at step midpoints). Throws BudgetExceededError when the
/// accumulated truncation passes cfg.truncation_budget and NumericalError on
/// non-finite amplitudes.
EvolveResult evolve(mps::MPSState psi, const tfim::QuenchSchedule& schedule,
                    const tfim::ModelParams& params, const TEBDConfig& cfg,
                    const RecordCallback& on_record = nullptr);

}  // namespace kzqfi::tebd
