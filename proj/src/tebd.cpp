#include "kzqfi/tebd.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "kzqfi/errors.hpp"

namespace kzqfi::tebd {

EvolveResult evolve(mps::MPSState psi, const tfim::QuenchSchedule& schedule,
                    const tfim::ModelParams& params, const TEBDConfig& cfg,
                    const RecordCallback& on_record) {
  if (!(cfg.dt > 0.0)) throw InvalidArgumentError("tebd: dt must be positive");
  if (cfg.chi_max < 2) throw InvalidArgumentError("tebd: chi_max must be >= 2");
  if (!(cfg.svd_eps >= 0.0))
    throw InvalidArgumentError("tebd: svd_eps must be non-negative");
  if (psi.n_sites() != params.n_sites)
    throw InvalidArgumentError("tebd: state size does not match params");
  for (std::size_t i = 0; i < psi.n_sites(); ++i)
    if (!psi.tensor(i).all_finite())
      throw NumericalError("tebd: non-finite amplitudes");
  if (std::abs(psi.norm() - 1.0) > 1e-8)
    throw InvalidArgumentError("tebd: initial state must be normalized");

  std::vector<tfim::StepPlan> plan = tfim::plan_steps(schedule, cfg.dt);
  EvolveResult out;
  out.psi = std::move(psi);
  EvolutionTrace& trace = out.trace;

  auto record_row = [&](const tfim::StepPlan& step) {
    trace.times.push_back(step.t1);
    trace.g_values.push_back(step.g_mid);
    trace.cumulative_truncation.push_back(
        out.psi.cumulative_truncation_error());
    trace.max_bond_dim.push_back(out.psi.max_bond_dim());
  };

  for (std::size_t s = 0; s < plan.size(); ++s) {
    const tfim::StepPlan& step = plan[s];
    double h = step.t1 - step.t0;
    double log_before = out.psi.cumulative_renorm_log();
    std::vector<tfim::TrotterGate> gates =
        tfim::trotter_step_gates(params, step.g_mid, h);
    for (const tfim::TrotterGate& g : gates)
      out.psi.apply_two_site_gate(g.gate, g.bond, cfg.chi_max, cfg.svd_eps);

    double drift =
        std::abs(std::expm1(out.psi.cumulative_renorm_log() - log_before));
    trace.max_step_norm_drift = std::max(trace.max_step_norm_drift, drift);

    if (out.psi.cumulative_truncation_error() > cfg.truncation_budget)
      throw BudgetExceededError(
          "tebd: cumulative truncation exceeded the budget; raise chi_max or "
          "lower svd_eps");
    if (!std::isfinite(out.psi.norm()))
      throw NumericalError("tebd: non-finite state norm");

    bool last = s + 1 == plan.size();
    bool record = last || (cfg.record_every > 0 && (s + 1) % cfg.record_every == 0);
    if (record) {
      record_row(step);
      for (std::size_t i = 0; i < out.psi.n_sites(); ++i)
        if (!out.psi.tensor(i).all_finite())
          throw NumericalError("tebd: non-finite amplitudes");
      if (on_record) on_record(s, step.t1, out.psi);
    }
    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() &&
        ((s + 1) % cfg.checkpoint_every == 0 || last)) {
      std::string tmp = cfg.checkpoint_path + ".tmp";
      mps::save_checkpoint(out.psi, tmp);
      std::filesystem::rename(tmp, cfg.checkpoint_path);
    }
  }
  out.psi.normalize();
  return out;
}

}  // namespace kzqfi::tebd
