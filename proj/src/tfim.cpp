#include "kzqfi/tfim.hpp"

#include <cmath>

#include "kzqfi/errors.hpp"

namespace kzqfi::tfim {

using linalg::Complex;
using linalg::DenseTensor;

QuenchSchedule QuenchSchedule::linear(double tau_q, double g_start,
                                      double g_end) {
  if (!(tau_q > 0.0)) throw InvalidArgumentError("schedule: tau_q must be positive");
  if (!(g_start > g_end))
    throw InvalidArgumentError("schedule: g must decrease (g_start > g_end)");
  QuenchSchedule s;
  s.shape = ScheduleShape::kLinear;
  s.tau_q = tau_q;
  s.alpha = 1.0;
  s.g_start = g_start;
  s.g_end = g_end;
  s.t_start = -(g_start - 1.0) * tau_q;
  s.t_end = (1.0 - g_end) * tau_q;
  return s;
}

QuenchSchedule QuenchSchedule::power(double alpha, double tau_q, double g_start,
                                     double g_end) {
  if (!(alpha > 0.0)) throw InvalidArgumentError("schedule: alpha must be positive");
  if (!(tau_q > 0.0)) throw InvalidArgumentError("schedule: tau_q must be positive");
  if (!(g_start >= 1.0) || !(g_end <= 1.0) || !(g_start > g_end))
    throw InvalidArgumentError(
        "schedule: power shape needs g_start >= 1 >= g_end with g_start > g_end");
  QuenchSchedule s;
  s.shape = ScheduleShape::kPower;
  s.tau_q = tau_q;
  s.alpha = alpha;
  s.g_start = g_start;
  s.g_end = g_end;
  s.t_start = g_start > 1.0 ? -std::pow(g_start - 1.0, 1.0 / alpha) * tau_q : 0.0;
  s.t_end = g_end < 1.0 ? std::pow(1.0 - g_end, 1.0 / alpha) * tau_q : 0.0;
  return s;
}

QuenchSchedule QuenchSchedule::constant(double g, double duration) {
  if (!(duration > 0.0))
    throw InvalidArgumentError("schedule: duration must be positive");
  if (!std::isfinite(g)) throw InvalidArgumentError("schedule: g must be finite");
  QuenchSchedule s;
  s.shape = ScheduleShape::kConstant;
  s.tau_q = 1.0;
  s.alpha = 1.0;
  s.g_start = g;
  s.g_end = g;
  s.t_start = 0.0;
  s.t_end = duration;
  return s;
}

double field_at(const QuenchSchedule& schedule, double t) {
  if (t < schedule.t_start - 1e-9 || t > schedule.t_end + 1e-9)
    throw InvalidArgumentError("field_at: t outside the schedule window");
  t = std::min(std::max(t, schedule.t_start), schedule.t_end);
  switch (schedule.shape) {
    case ScheduleShape::kLinear:
      return -t / schedule.tau_q + 1.0;
    case ScheduleShape::kPower: {
      double x = std::abs(t / schedule.tau_q);
      double s = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
      return -s * std::pow(x, schedule.alpha) + 1.0;
    }
    case ScheduleShape::kConstant:
      return schedule.g_start;
  }
  throw InvalidArgumentError("field_at: unknown schedule shape");
}

double spectrum_epsilon_k(double g, double k) {
  double a = g - std::cos(k);
  double b = std::sin(k);
  return std::sqrt(a * a + b * b);
}

std::vector<double> antiperiodic_momenta(std::size_t n_sites) {
  if (n_sites < 2 || n_sites % 2 != 0)
    throw InvalidArgumentError("antiperiodic_momenta: N must be even and >= 2");
  std::vector<double> ks(n_sites / 2);
  const double pi = std::acos(-1.0);
  for (std::size_t m = 1; m <= n_sites / 2; ++m)
    ks[m - 1] = pi * (2.0 * static_cast<double>(m) - 1.0) /
                static_cast<double>(n_sites);
  return ks;
}

DenseTensor bond_hamiltonian(const ModelParams& params, double g,
                             std::size_t bond) {
  if (params.n_sites < 2)
    throw InvalidArgumentError("bond_hamiltonian: need at least 2 sites");
  if (bond + 1 >= params.n_sites)
    throw InvalidArgumentError("bond_hamiltonian: bond out of range");
  double w_left = bond == 0 ? 1.0 : 0.5;
  double w_right = bond == params.n_sites - 2 ? 1.0 : 0.5;

  DenseTensor sz = linalg::pauli_z();
  DenseTensor sx = linalg::pauli_x();
  DenseTensor id = linalg::identity2();
  DenseTensor h = linalg::kron(sz, sz);
  DenseTensor xl = linalg::kron(sx, id);
  DenseTensor xr = linalg::kron(id, sx);
  for (std::size_t i = 0; i < 16; ++i)
    h.data()[i] = -params.j_coupling * h.data()[i] -
                  g * (w_left * xl.data()[i] + w_right * xr.data()[i]);
  return h;
}

std::vector<TrotterGate> trotter_step_gates(const ModelParams& params, double g,
                                            double dt) {
  if (!(dt > 0.0)) throw InvalidArgumentError("trotter_step_gates: dt must be positive");
  if (params.n_sites < 2)
    throw InvalidArgumentError("trotter_step_gates: need at least 2 sites");

  std::vector<std::size_t> even, odd;
  for (std::size_t b = 0; b + 1 < params.n_sites; b += 2) even.push_back(b);
  for (std::size_t b = 1; b + 1 < params.n_sites; b += 2) odd.push_back(b);

  std::vector<TrotterGate> gates;
  gates.reserve(2 * even.size() + odd.size());
  auto emit = [&](std::size_t bond, double step) {
    DenseTensor h = bond_hamiltonian(params, g, bond);
    gates.push_back(
        {bond, linalg::hermitian_expm(h, Complex(0.0, -step / params.hbar))});
  };
  for (std::size_t b : even) emit(b, dt / 2.0);
  for (auto it = odd.rbegin(); it != odd.rend(); ++it) emit(*it, dt);
  for (std::size_t b : even) emit(b, dt / 2.0);
  return gates;
}

std::vector<StepPlan> plan_steps(const QuenchSchedule& schedule, double dt) {
  if (!(dt > 0.0)) throw InvalidArgumentError("plan_steps: dt must be positive");
  double span = schedule.duration();
  if (!(span > 0.0)) throw InvalidArgumentError("plan_steps: empty schedule window");
  auto n_steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-12));
  if (n_steps == 0) n_steps = 1;
  std::vector<StepPlan> plan;
  plan.reserve(n_steps);
  for (std::size_t i = 0; i < n_steps; ++i) {
    double t0 = schedule.t_start + static_cast<double>(i) * dt;
    double t1 = i + 1 == n_steps ? schedule.t_end
                                 : schedule.t_start + static_cast<double>(i + 1) * dt;
    plan.push_back({t0, t1, field_at(schedule, 0.5 * (t0 + t1))});
  }
  return plan;
}

}  // namespace kzqfi::tfim
