#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "kzqfi/linalg.hpp"
#include "kzqfi/mps.hpp"
#include "kzqfi/tfim.hpp"

namespace kzqfi::oracles {

using linalg::Complex;

// ---------------------------------------------------------------------------
// Free-fermion engine: each antiperiodic momentum mode is an independent 2x2
// problem. The static eigenbasis is that of M_k(g) = (g - cos k) sz + sin k sx;
// the dynamical generator is H_k(g) = 2 M_k(g), the energy scale under which
// the closed-form p_k = exp(-2 pi tau_Q k^2) holds with hbar = 1 (the
// acceptance tests measure this coefficient rather than assuming it).
// ---------------------------------------------------------------------------

struct BdGModeState {
  double k = 0.0;
  Complex u{1.0, 0.0};
  Complex v{0.0, 0.0};

  double norm2() const { return std::norm(u) + std::norm(v); }
};

/// Positive-energy eigenvector of M_k(g): the mode's ground-state pairing
/// amplitudes (u -> 1, v -> 0 as g -> infinity).
BdGModeState bdg_initial_mode(double k, double g);

/// Integrates i d/dt (u,v) = H_k(g(t)) (u,v) across the schedule window with
/// a 4th-order commutator-free Magnus integrator (exact 2x2 exponentials per
/// substep, so the norm is conserved to rounding) under step-doubling local
/// error control at ode_tol. Throws NumericalError on step-size underflow.
BdGModeState bdg_evolve_mode(double k, const tfim::QuenchSchedule& schedule,
                             double ode_tol = 1e-10);

/// |<negative-energy eigenvector of M_k(g_end) | (u,v)>|^2: the probability
/// of having left the adiabatically tracked branch.
double excitation_probability(const BdGModeState& mode, double g_end);

/// Closed-form Landau-Zener result exp(-2 pi tau_Q k^2), hbar = 1.
double lz_probability(double k, double tau_q);

/// Defect density from the antiperiodic momentum sum,
/// (1/N) sum_k p_k = (2/N) sum_{k>0} p_k. Linear or power schedules.
double defect_density_ff(const tfim::QuenchSchedule& schedule,
                         std::size_t n_sites, double ode_tol = 1e-10);

/// Thermodynamic-limit closed form (1/2pi) sqrt(1/(2 tau_Q)) for the linear
/// quench.
double defect_density_ff_thermodynamic(double tau_q);

// ---------------------------------------------------------------------------
// Dense state-vector oracle (N <= 12): exact arithmetic on 2^N amplitudes,
// site 0 carried by the most significant bit (matching MPSState densification).
// ---------------------------------------------------------------------------

struct DenseState {
  std::size_t n_sites = 0;
  std::vector<Complex> amp;

  double norm() const;
  void normalize();
};

constexpr std::size_t kDenseMaxSites = 12;

DenseState dense_product_state(std::size_t n_sites, std::array<Complex, 2> local);
DenseState dense_from_mps(const mps::MPSState& psi);

/// Applies a 4x4 gate to sites (bond, bond+1).
void dense_apply_gate(DenseState& state, const linalg::DenseTensor& gate,
                      std::size_t bond);
void dense_apply_gates(DenseState& state,
                       const std::vector<tfim::TrotterGate>& gates);

/// Runs the identical Trotter stepping as the MPS engine (same plan_steps,
/// same gate sequence) on the dense vector.
DenseState dense_evolve(DenseState state, const tfim::QuenchSchedule& schedule,
                        const tfim::ModelParams& params, double dt);

/// y += H(g) x for the open-boundary Hamiltonian of the model.
void dense_apply_hamiltonian(const tfim::ModelParams& params, double g,
                             const Complex* x, Complex* y);

/// Lowest eigenpair via Lanczos on the matrix-free Hamiltonian.
std::pair<DenseState, double> dense_ground_state(const tfim::ModelParams& params,
                                                 double g);

/// exp(-i dt H(g)) x, dense eigendecomposition; N <= 10 (memory guard).
DenseState dense_exact_propagate(const DenseState& state,
                                 const tfim::ModelParams& params, double g,
                                 double dt);

double dense_expectation_z(const DenseState& state, std::size_t site);
double dense_correlation_zz(const DenseState& state, std::size_t m,
                            std::size_t n);
double dense_expectation_x(const DenseState& state, std::size_t site);
double dense_qfi_density(const DenseState& state);
double dense_defect_density(const DenseState& state);
double fidelity(const DenseState& a, const DenseState& b);

}  // namespace kzqfi::oracles
