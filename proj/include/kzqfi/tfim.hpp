#pragma once

#include <cstddef>
#include <vector>

#include "kzqfi/linalg.hpp"

namespace kzqfi::tfim {

/// H = -J sum_n sz_n sz_{n+1} - g(t) sum_n sx_n, with J = hbar = 1 in every
/// shipped configuration (kept as named fields, not literals).
struct ModelParams {
  std::size_t n_sites = 0;
  double j_coupling = 1.0;
  double hbar = 1.0;
};

enum class ScheduleShape { kLinear, kPower, kConstant };

/// Quench protocol g(t). Linear: g = 1 - t/tau_Q. Power: g = 1 - sgn(t)|t/tau_Q|^alpha.
/// Both cross g_c = 1 exactly at t = 0; the window [t_start, t_end] is derived
/// from (g_start, g_end). Constant holds g fixed on [0, duration] (stationary
/// evolution for tests; not a quench).
struct QuenchSchedule {
  ScheduleShape shape = ScheduleShape::kLinear;
  double tau_q = 1.0;
  double alpha = 1.0;
  double g_start = 5.0;
  double g_end = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;

  static QuenchSchedule linear(double tau_q, double g_start = 5.0,
                               double g_end = 0.0);
  static QuenchSchedule power(double alpha, double tau_q, double g_start = 5.0,
                              double g_end = 0.0);
  static QuenchSchedule constant(double g, double duration);

  double duration() const { return t_end - t_start; }
};

/// g(t); t must lie in [t_start, t_end] (1e-9 slack for rounding at the edges).
double field_at(const QuenchSchedule& schedule, double t);

/// Positive branch of eps_k = sqrt((g - cos k)^2 + sin^2 k).
double spectrum_epsilon_k(double g, double k);

/// Positive half of the antiperiodic grid k_m = pi(2m-1)/N, m = 1..N/2,
/// ascending. N must be even.
std::vector<double> antiperiodic_momenta(std::size_t n_sites);

/// Two-site term on (bond, bond+1): -J sz sz - g (wL sx x 1 + wR 1 x sx).
/// Interior sites split their field across both adjacent bonds; edge sites
/// put the full weight on their only bond, so the bond terms sum to H.
linalg::DenseTensor bond_hamiltonian(const ModelParams& params, double g,
                                     std::size_t bond);

struct TrotterGate {
  std::size_t bond;
  linalg::DenseTensor gate;  // 4x4 unitary
};

/// Gate sequence for one second-order step exp(-i dt H(g)/hbar): half-step on
/// even bonds (ascending), full step on odd bonds (descending), half-step on
/// even bonds again. Ordering within a parity class is free (disjoint bonds);
/// the chosen zigzag minimizes canonical-center movement.
std::vector<TrotterGate> trotter_step_gates(const ModelParams& params, double g,
                                            double dt);

/// One time-slice of a discretized schedule: the step covers [t0, t1] and the
/// field is sampled once at the midpoint.
struct StepPlan {
  double t0;
  double t1;
  double g_mid;
};

/// Splits the schedule window into ceil(duration/dt) steps of length dt (the
/// last one may be shorter). Both evolution engines consume this plan, which
/// guarantees identical gate sequences.
std::vector<StepPlan> plan_steps(const QuenchSchedule& schedule, double dt);

}  // namespace kzqfi::tfim
