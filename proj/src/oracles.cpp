#include "kzqfi/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kzqfi/errors.hpp"
#include "kzqfi/lanczos.hpp"
#include "eigen_util.hpp"

namespace kzqfi::oracles {

using linalg::EMatrix;
using linalg::EVector;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt3Over6 = 0.28867513459481287;  // sqrt(3)/6

struct TwoVec {
  Complex u, v;
};

// exp(-i (cz sz + cx sx)) applied exactly; unitary to rounding.
TwoVec rotate(TwoVec psi, double cz, double cx) {
  double rho = std::hypot(cz, cx);
  if (rho == 0.0) return psi;
  double c = std::cos(rho), s = std::sin(rho);
  double az = cz / rho, ax = cx / rho;
  Complex u = (Complex(c, -s * az)) * psi.u + Complex(0.0, -s * ax) * psi.v;
  Complex v = Complex(0.0, -s * ax) * psi.u + Complex(c, s * az) * psi.v;
  return {u, v};
}

// One 4th-order commutator-free Magnus step over [t, t+h].
TwoVec cf4_step(TwoVec psi, double k, const tfim::QuenchSchedule& schedule,
                double t, double h) {
  double g1 = tfim::field_at(schedule, t + (0.5 - kSqrt3Over6) * h);
  double g2 = tfim::field_at(schedule, t + (0.5 + kSqrt3Over6) * h);
  double a1 = 2.0 * (g1 - std::cos(k)), a2 = 2.0 * (g2 - std::cos(k));
  double b = 2.0 * std::sin(k);
  const double f1 = 0.25 + kSqrt3Over6, f2 = 0.25 - kSqrt3Over6;
  psi = rotate(psi, h * (f1 * a1 + f2 * a2), h * (f1 + f2) * b);
  psi = rotate(psi, h * (f2 * a1 + f1 * a2), h * (f2 + f1) * b);
  return psi;
}

std::pair<double, double> positive_eigenvector(double a, double b) {
  double eps = std::hypot(a, b);
  if (eps < 1e-300) return {1.0, 0.0};
  double u, v;
  if (a >= 0.0) {
    u = eps + a;
    v = b;
  } else {
    u = b;
    v = eps - a;
  }
  double n = std::hypot(u, v);
  return {u / n, v / n};
}

}  // namespace

BdGModeState bdg_initial_mode(double k, double g) {
  auto [u, v] = positive_eigenvector(g - std::cos(k), std::sin(k));
  BdGModeState m;
  m.k = k;
  m.u = u;
  m.v = v;
  return m;
}

BdGModeState bdg_evolve_mode(double k, const tfim::QuenchSchedule& schedule,
                             double ode_tol) {
  if (!(ode_tol > 0.0))
    throw InvalidArgumentError("bdg_evolve_mode: ode_tol must be positive");
  const double t_end = schedule.t_end;
  const double span = schedule.duration();
  if (!(span > 0.0))
    throw InvalidArgumentError("bdg_evolve_mode: empty schedule window");

  BdGModeState mode = bdg_initial_mode(k, schedule.g_start);
  TwoVec psi{mode.u, mode.v};
  double t = schedule.t_start;
  double h = span / 100.0;

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < 1e-13 * std::max(1.0, span))
      throw NumericalError("bdg_evolve_mode: step-size underflow");
    TwoVec full = cf4_step(psi, k, schedule, t, h);
    TwoVec half = cf4_step(psi, k, schedule, t, 0.5 * h);
    half = cf4_step(half, k, schedule, t + 0.5 * h, 0.5 * h);
    double du = std::abs(half.u - full.u), dv = std::abs(half.v - full.v);
    double est = std::sqrt(du * du + dv * dv) / 15.0;
    if (est <= ode_tol) {
      psi = half;
      t += h;
    }
    double grow =
        0.9 * std::pow(ode_tol / std::max(est, 1e-300), 0.2);
    h *= std::clamp(grow, 0.2, 4.0);
  }
  mode.u = psi.u;
  mode.v = psi.v;
  return mode;
}

double excitation_probability(const BdGModeState& mode, double g_end) {
  auto [up, vp] = positive_eigenvector(g_end - std::cos(mode.k),
                                       std::sin(mode.k));
  // Negative-energy eigenvector, orthogonal to the positive one.
  double un = -vp, vn = up;
  Complex overlap = un * mode.u + vn * mode.v;
  return std::norm(overlap) / mode.norm2();
}

double lz_probability(double k, double tau_q) {
  if (!(tau_q > 0.0))
    throw InvalidArgumentError("lz_probability: tau_q must be positive");
  return std::exp(-2.0 * kPi * tau_q * k * k);
}

double defect_density_ff(const tfim::QuenchSchedule& schedule,
                         std::size_t n_sites, double ode_tol) {
  if (schedule.shape == tfim::ScheduleShape::kConstant)
    throw InvalidArgumentError("defect_density_ff: needs a quench schedule");
  std::vector<double> ks = tfim::antiperiodic_momenta(n_sites);
  double sum = 0.0;
  for (double k : ks) {
    BdGModeState mode = bdg_evolve_mode(k, schedule, ode_tol);
    sum += excitation_probability(mode, schedule.g_end);
  }
  return 2.0 * sum / static_cast<double>(n_sites);
}

double defect_density_ff_thermodynamic(double tau_q) {
  if (!(tau_q > 0.0))
    throw InvalidArgumentError("defect_density_ff_thermodynamic: tau_q > 0");
  return std::sqrt(1.0 / (2.0 * tau_q)) / (2.0 * kPi);
}

// ---------------------------------------------------------------------------

double DenseState::norm() const {
  double s = 0.0;
  for (const Complex& a : amp) s += std::norm(a);
  return std::sqrt(s);
}

void DenseState::normalize() {
  double n = norm();
  if (n < 1e-300) throw NumericalError("dense state: zero norm");
  for (Complex& a : amp) a /= n;
}

namespace {

void check_dense_sites(std::size_t n, const char* what) {
  if (n == 0) throw InvalidArgumentError(std::string(what) + ": empty system");
  if (n > kDenseMaxSites)
    throw CapacityError(std::string(what) + ": dense oracle is limited to 12 sites");
}

inline int spin_of(std::size_t x, std::size_t n, std::size_t site) {
  return ((x >> (n - 1 - site)) & 1u) == 0 ? 1 : -1;
}

}  // namespace

DenseState dense_product_state(std::size_t n_sites,
                               std::array<Complex, 2> local) {
  check_dense_sites(n_sites, "dense_product_state");
  double nrm = std::sqrt(std::norm(local[0]) + std::norm(local[1]));
  if (std::abs(nrm - 1.0) > 1e-12)
    throw InvalidArgumentError("dense_product_state: local state not normalized");
  DenseState st;
  st.n_sites = n_sites;
  st.amp.assign(std::size_t{1} << n_sites, Complex(1.0));
  for (std::size_t x = 0; x < st.amp.size(); ++x)
    for (std::size_t i = 0; i < n_sites; ++i)
      st.amp[x] *= local[(x >> (n_sites - 1 - i)) & 1u];
  return st;
}

DenseState dense_from_mps(const mps::MPSState& psi) {
  check_dense_sites(psi.n_sites(), "dense_from_mps");
  DenseState st;
  st.n_sites = psi.n_sites();
  st.amp = psi.to_statevector();
  return st;
}

void dense_apply_gate(DenseState& state, const linalg::DenseTensor& gate,
                      std::size_t bond) {
  if (gate.rank() != 2 || gate.dim(0) != 4 || gate.dim(1) != 4)
    throw InvalidArgumentError("dense_apply_gate: gate must be 4x4");
  const std::size_t n = state.n_sites;
  if (bond + 1 >= n) throw InvalidArgumentError("dense_apply_gate: bond range");
  const std::size_t hi = std::size_t{1} << (n - 1 - bond);
  const std::size_t lo = hi >> 1;
  const Complex* g = gate.data();
  for (std::size_t x = 0; x < state.amp.size(); ++x) {
    if ((x & hi) != 0 || (x & lo) != 0) continue;
    Complex in[4] = {state.amp[x], state.amp[x | lo], state.amp[x | hi],
                     state.amp[x | hi | lo]};
    for (std::size_t r = 0; r < 4; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = 0; c < 4; ++c) acc += g[r * 4 + c] * in[c];
      state.amp[x | ((r >> 1) ? hi : 0) | ((r & 1) ? lo : 0)] = acc;
    }
  }
}

void dense_apply_gates(DenseState& state,
                       const std::vector<tfim::TrotterGate>& gates) {
  for (const tfim::TrotterGate& g : gates) dense_apply_gate(state, g.gate, g.bond);
}

DenseState dense_evolve(DenseState state, const tfim::QuenchSchedule& schedule,
                        const tfim::ModelParams& params, double dt) {
  check_dense_sites(state.n_sites, "dense_evolve");
  if (state.n_sites != params.n_sites)
    throw InvalidArgumentError("dense_evolve: state size does not match params");
  for (const tfim::StepPlan& step : tfim::plan_steps(schedule, dt)) {
    std::vector<tfim::TrotterGate> gates =
        tfim::trotter_step_gates(params, step.g_mid, step.t1 - step.t0);
    dense_apply_gates(state, gates);
  }
  return state;
}

void dense_apply_hamiltonian(const tfim::ModelParams& params, double g,
                             const Complex* x, Complex* y) {
  const std::size_t n = params.n_sites;
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t c = 0; c < dim; ++c) {
    double diag = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      diag += static_cast<double>(spin_of(c, n, i) * spin_of(c, n, i + 1));
    y[c] += -params.j_coupling * diag * x[c];
    for (std::size_t i = 0; i < n; ++i)
      y[c ^ (std::size_t{1} << (n - 1 - i))] += -g * x[c];
  }
}

std::pair<DenseState, double> dense_ground_state(const tfim::ModelParams& params,
                                                 double g) {
  check_dense_sites(params.n_sites, "dense_ground_state");
  const std::size_t dim = std::size_t{1} << params.n_sites;

  std::mt19937_64 gen(12345);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Complex> v0(dim);
  for (Complex& a : v0) a = Complex(nd(gen), nd(gen));

  linalg::MatVec apply = [&](const Complex* in, Complex* out) {
    std::fill(out, out + dim, Complex(0.0));
    dense_apply_hamiltonian(params, g, in, out);
  };
  linalg::LanczosOptions opts;
  opts.max_iterations = 400;
  opts.tolerance = 1e-13;
  linalg::LanczosResult res =
      linalg::lanczos_smallest(apply, dim, v0.data(), opts);

  DenseState st;
  st.n_sites = params.n_sites;
  st.amp = std::move(res.eigenvector);
  st.normalize();
  return {std::move(st), res.eigenvalue};
}

DenseState dense_exact_propagate(const DenseState& state,
                                 const tfim::ModelParams& params, double g,
                                 double dt) {
  if (state.n_sites > 10)
    throw CapacityError("dense_exact_propagate: limited to 10 sites");
  const std::size_t dim = std::size_t{1} << state.n_sites;
  EMatrix h = EMatrix::Zero(static_cast<Eigen::Index>(dim),
                            static_cast<Eigen::Index>(dim));
  std::vector<Complex> col(dim), out(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    std::fill(col.begin(), col.end(), Complex(0.0));
    std::fill(out.begin(), out.end(), Complex(0.0));
    col[c] = 1.0;
    dense_apply_hamiltonian(params, g, col.data(), out.data());
    for (std::size_t r = 0; r < dim; ++r)
      h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = out[r];
  }
  Eigen::SelfAdjointEigenSolver<EMatrix> es(h);
  EVector x(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    x(static_cast<Eigen::Index>(i)) = state.amp[i];
  EVector coeff = es.eigenvectors().adjoint() * x;
  for (Eigen::Index i = 0; i < coeff.size(); ++i)
    coeff(i) *= std::exp(Complex(0.0, -dt * es.eigenvalues()(i)));
  EVector result = es.eigenvectors() * coeff;
  DenseState outst;
  outst.n_sites = state.n_sites;
  outst.amp.assign(result.data(), result.data() + dim);
  return outst;
}

double dense_expectation_z(const DenseState& state, std::size_t site) {
  const std::size_t n = state.n_sites;
  if (site >= n) throw InvalidArgumentError("dense_expectation_z: site range");
  double acc = 0.0, norm2 = 0.0;
  for (std::size_t x = 0; x < state.amp.size(); ++x) {
    double w = std::norm(state.amp[x]);
    norm2 += w;
    acc += w * spin_of(x, n, site);
  }
  return acc / norm2;
}

double dense_correlation_zz(const DenseState& state, std::size_t m,
                            std::size_t n_site) {
  const std::size_t n = state.n_sites;
  if (m >= n || n_site >= n)
    throw InvalidArgumentError("dense_correlation_zz: site range");
  double acc = 0.0, norm2 = 0.0;
  for (std::size_t x = 0; x < state.amp.size(); ++x) {
    double w = std::norm(state.amp[x]);
    norm2 += w;
    acc += w * spin_of(x, n, m) * spin_of(x, n, n_site);
  }
  return acc / norm2;
}

double dense_expectation_x(const DenseState& state, std::size_t site) {
  const std::size_t n = state.n_sites;
  if (site >= n) throw InvalidArgumentError("dense_expectation_x: site range");
  const std::size_t mask = std::size_t{1} << (n - 1 - site);
  Complex acc = 0.0;
  double norm2 = 0.0;
  for (std::size_t x = 0; x < state.amp.size(); ++x) {
    norm2 += std::norm(state.amp[x]);
    acc += std::conj(state.amp[x]) * state.amp[x ^ mask];
  }
  return acc.real() / norm2;
}

double dense_qfi_density(const DenseState& state) {
  const std::size_t n = state.n_sites;
  double m1 = 0.0, m2 = 0.0, norm2 = 0.0;
  for (std::size_t x = 0; x < state.amp.size(); ++x) {
    double w = std::norm(state.amp[x]);
    double o = 0.0;
    for (std::size_t i = 0; i < n; ++i) o += spin_of(x, n, i);
    norm2 += w;
    m1 += w * o;
    m2 += w * o * o;
  }
  m1 /= norm2;
  m2 /= norm2;
  return (m2 - m1 * m1) / static_cast<double>(n);
}

double dense_defect_density(const DenseState& state) {
  const std::size_t n = state.n_sites;
  if (n < 2) throw InvalidArgumentError("dense_defect_density: need N >= 2");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    acc += 0.5 * (1.0 - dense_correlation_zz(state, i, i + 1));
  return acc / static_cast<double>(n - 1);
}

double fidelity(const DenseState& a, const DenseState& b) {
  if (a.amp.size() != b.amp.size())
    throw InvalidArgumentError("fidelity: size mismatch");
  Complex ov = 0.0;
  double na = 0.0, nb = 0.0;
  for (std::size_t x = 0; x < a.amp.size(); ++x) {
    ov += std::conj(a.amp[x]) * b.amp[x];
    na += std::norm(a.amp[x]);
    nb += std::norm(b.amp[x]);
  }
  return std::norm(ov) / (na * nb);
}

}  // namespace kzqfi::oracles
