#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "kzqfi/errors.hpp"
#include "kzqfi/fit.hpp"
#include "kzqfi/linalg.hpp"
#include "kzqfi/oracles.hpp"
#include "kzqfi/tfim.hpp"

using namespace kzqfi;
using linalg::Complex;
using oracles::BdGModeState;
using tfim::QuenchSchedule;

namespace {

tfim::ModelParams params_n(std::size_t n) {
  tfim::ModelParams p;
  p.n_sites = n;
  return p;
}

// Defect density from the closed-form mode probabilities on the finite grid
// (a Riemann sum of the Gaussian integral; no ODE involved).
double defect_density_lz_grid(double tau_q, std::size_t n) {
  double sum = 0.0;
  for (double k : tfim::antiperiodic_momenta(n))
    sum += oracles::lz_probability(k, tau_q);
  return 2.0 * sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("bdg_initial_mode is the positive-energy eigenvector") {
  for (double k : {0.3, 1.2, 2.9}) {
    for (double g : {0.0, 1.0, 5.0}) {
      BdGModeState m = oracles::bdg_initial_mode(k, g);
      CHECK(m.norm2() == doctest::Approx(1.0).epsilon(1e-14));
      // M_k (u,v)^T = +eps_k (u,v)^T with M_k = (g - cos k) sz + sin k sx
      double a = g - std::cos(k), b = std::sin(k);
      double eps = tfim::spectrum_epsilon_k(g, k);
      Complex r1 = a * m.u + b * m.v;
      Complex r2 = b * m.u - a * m.v;
      CHECK(std::abs(r1 - eps * m.u) < 1e-12);
      CHECK(std::abs(r2 - eps * m.v) < 1e-12);
    }
  }
  // deep paramagnet: u -> 1, v -> 0
  BdGModeState deep = oracles::bdg_initial_mode(0.5, 1e6);
  CHECK(std::abs(deep.u) > 1.0 - 1e-6);
  CHECK(std::abs(deep.v) < 1e-6);
}

TEST_CASE("k = pi never crosses: adiabatic to rounding") {
  BdGModeState m = oracles::bdg_evolve_mode(M_PI, QuenchSchedule::linear(5.0));
  CHECK(oracles::excitation_probability(m, 0.0) < 1e-10);
}

TEST_CASE("frozen schedule leaves the eigenstate invariant up to phase") {
  double k = 0.7, g = 2.0;
  BdGModeState init = oracles::bdg_initial_mode(k, g);
  BdGModeState fin = oracles::bdg_evolve_mode(k, QuenchSchedule::constant(g, 5.0));
  Complex ov = std::conj(init.u) * fin.u + std::conj(init.v) * fin.v;
  CHECK(std::norm(ov) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(oracles::excitation_probability(fin, g) < 1e-10);
}

TEST_CASE("small-k mode reproduces the Landau-Zener closed form") {
  BdGModeState m = oracles::bdg_evolve_mode(0.1, QuenchSchedule::linear(5.0));
  double p = oracles::excitation_probability(m, 0.0);
  CHECK(std::abs(p - oracles::lz_probability(0.1, 5.0)) < 2e-3);
}

TEST_CASE("mode norm is conserved through linear and power schedules") {
  for (auto sched : {QuenchSchedule::linear(3.0), QuenchSchedule::power(3.0, 2.0)}) {
    for (double k : {0.05, 0.4, 1.5, 3.0}) {
      BdGModeState m = oracles::bdg_evolve_mode(k, sched);
      CHECK(std::abs(m.norm2() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("unreachable tolerance triggers the step-size underflow error") {
  CHECK_THROWS_AS(oracles::bdg_evolve_mode(0.5, QuenchSchedule::linear(1.0), 1e-300),
                  NumericalError);
  CHECK_THROWS_AS(oracles::bdg_evolve_mode(0.5, QuenchSchedule::linear(1.0), 0.0),
                  InvalidArgumentError);
}

TEST_CASE("lz_probability closed form") {
  CHECK(oracles::lz_probability(0.0, 3.0) == 1.0);
  CHECK(oracles::lz_probability(1.0, 1e6) < 1e-300);
  CHECK(oracles::lz_probability(1.0, 1.0 / (2.0 * M_PI)) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(oracles::lz_probability(1.0, 0.0), InvalidArgumentError);
}

TEST_CASE("excitation_probability: branch projections are complementary") {
  BdGModeState m = oracles::bdg_initial_mode(0.8, 0.0);
  CHECK(oracles::excitation_probability(m, 0.0) < 1e-14);
  std::swap(m.u, m.v);
  m.v = -m.v;  // orthogonal partner
  CHECK(oracles::excitation_probability(m, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("thermodynamic defect density evaluates Eq.-form 1/(2 pi sqrt(2 tau))") {
  CHECK(oracles::defect_density_ff_thermodynamic(1.0) ==
        doctest::Approx(1.0 / (2.0 * M_PI * std::sqrt(2.0))).epsilon(1e-14));
  CHECK(oracles::defect_density_ff_thermodynamic(1.0) ==
        doctest::Approx(0.11254).epsilon(1e-4));
  CHECK(oracles::defect_density_ff_thermodynamic(4.0) /
            oracles::defect_density_ff_thermodynamic(1.0) ==
        doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("finite-size momentum sum at N=512, tau=2") {
  double nd = oracles::defect_density_ff(QuenchSchedule::linear(2.0), 512);
  // pinned against an independent fixed-step RK4 integration of the same
  // modes and an exact dense Trotter evolution of the N=12 periodic chain
  CHECK(nd == doctest::Approx(0.0807766736).epsilon(2e-6));
  // the finite quench window (stopping at g=0) leaves an oscillatory ~1.5%
  // excess over the asymptotic closed form at this rate
  double thermo = oracles::defect_density_ff_thermodynamic(2.0);
  CHECK(std::abs(nd / thermo - 1.0) < 0.02);
}

TEST_CASE("defect_density_ff input validation") {
  CHECK_THROWS_AS(oracles::defect_density_ff(QuenchSchedule::constant(1.0, 2.0), 64),
                  InvalidArgumentError);
  CHECK_THROWS_AS(oracles::defect_density_ff(QuenchSchedule::linear(1.0), 7),
                  InvalidArgumentError);
}

TEST_CASE("LZ agreement on the N=128 grid below |k| = 0.5") {
  auto max_dev = [](double tau) {
    double worst = 0.0;
    for (double k : tfim::antiperiodic_momenta(128)) {
      if (k >= 0.5) break;
      BdGModeState m = oracles::bdg_evolve_mode(k, QuenchSchedule::linear(tau));
      double p = oracles::excitation_probability(m, 0.0);
      worst = std::max(worst, std::abs(p - oracles::lz_probability(k, tau)));
    }
    return worst;
  };
  // the asymptotic closed form is approached once the sweep is slow enough;
  // at tau=2 the finite window (the ramp stops at g=0) still leaves a ~7e-3
  // transient, measured and pinned here
  CHECK(max_dev(2.0) < 8e-3);
  CHECK(max_dev(5.0) < 5e-3);
  CHECK(max_dev(10.0) < 5e-3);
}

TEST_CASE("closed-form momentum sum reproduces the -1/2 scaling law") {
  std::vector<std::pair<double, double>> pts;
  for (double tau : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0})
    pts.emplace_back(tau, defect_density_lz_grid(tau, 1024));
  auto f = fit::power_law_fit(pts);
  CHECK(std::abs(f.exponent + 0.5) < 0.01);

  std::vector<std::pair<double, double>> thermo;
  for (double tau : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0})
    thermo.emplace_back(tau, oracles::defect_density_ff_thermodynamic(tau));
  auto ft = fit::power_law_fit(thermo);
  CHECK(std::abs(ft.exponent + 0.5) < 1e-12);
}

TEST_CASE("nonlinear quenches scale as -alpha/(alpha+1)") {
  // asymptotic exponents need slow ramps; tau in {8..128} is past the
  // transient for both alpha values at this grid resolution
  for (double alpha : {2.0, 3.0}) {
    std::vector<std::pair<double, double>> pts;
    for (double tau : {8.0, 16.0, 32.0, 64.0, 128.0})
      pts.emplace_back(tau,
                       oracles::defect_density_ff(QuenchSchedule::power(alpha, tau), 512));
    auto f = fit::power_law_fit(pts);
    CAPTURE(alpha);
    CHECK(std::abs(f.exponent + alpha / (alpha + 1.0)) < 0.03);
  }
}

TEST_CASE("dense oracle: identity gates do nothing") {
  auto psi = oracles::dense_product_state(4, {Complex(0.6), Complex(0.8)});
  auto before = psi.amp;
  oracles::dense_apply_gate(psi, linalg::DenseTensor::identity(4), 1);
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(std::abs(psi.amp[i] - before[i]) < 1e-15);
}

TEST_CASE("dense oracle: swap gate permutes amplitudes") {
  linalg::DenseTensor swap({4, 4});
  swap({0, 0}) = 1.0;
  swap({1, 2}) = 1.0;
  swap({2, 1}) = 1.0;
  swap({3, 3}) = 1.0;

  oracles::DenseState psi;
  psi.n_sites = 2;
  psi.amp = {Complex(0.1), Complex(0.2), Complex(0.3), Complex(0.4)};
  double n = psi.norm();
  for (auto& a : psi.amp) a /= n;
  auto before = psi.amp;
  oracles::dense_apply_gate(psi, swap, 0);
  CHECK(psi.amp[0] == before[0]);
  CHECK(psi.amp[1] == before[2]);
  CHECK(psi.amp[2] == before[1]);
  CHECK(psi.amp[3] == before[3]);
}

TEST_CASE("dense oracle: pinned reference quench N=8, tau=1") {
  auto params = params_n(8);
  auto [gs, e] = oracles::dense_ground_state(params, 5.0);
  auto fin = oracles::dense_evolve(gs, QuenchSchedule::linear(1.0), params, 0.02);
  CHECK(fin.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(oracles::dense_qfi_density(fin) ==
        doctest::Approx(3.941062739634).epsilon(1e-9));
  CHECK(oracles::dense_defect_density(fin) ==
        doctest::Approx(0.130296034463).epsilon(1e-9));
}

TEST_CASE("dense oracle capacity guard") {
  CHECK_THROWS_AS(oracles::dense_product_state(13, {Complex(1.0), Complex(0.0)}),
                  CapacityError);
  CHECK_THROWS_AS(oracles::dense_ground_state(params_n(13), 1.0), CapacityError);
}

TEST_CASE("dense_ground_state: two-site Ising limit") {
  auto [psi, e] = oracles::dense_ground_state(params_n(2), 0.0);
  CHECK(e == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("dense_ground_state: strong-field limit") {
  double g = 500.0;
  auto [psi, e] = oracles::dense_ground_state(params_n(2), g);
  CHECK(std::abs(e + 2.0 * g) < 1e-3);
  double s = 1.0 / std::sqrt(2.0);
  auto target = oracles::dense_product_state(2, {Complex(s), Complex(s)});
  CHECK(oracles::fidelity(psi, target) > 1.0 - 1e-6);
}

TEST_CASE("dense_ground_state: pinned N=8 critical energy") {
  auto [psi, e] = oracles::dense_ground_state(params_n(8), 1.0);
  CHECK(e == doctest::Approx(-9.837951447459).epsilon(1e-9));
}

TEST_CASE("fidelity is 1 on itself and 0 on orthogonal states") {
  auto a = oracles::dense_product_state(3, {Complex(1.0), Complex(0.0)});
  auto b = oracles::dense_product_state(3, {Complex(0.0), Complex(1.0)});
  CHECK(oracles::fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(oracles::fidelity(a, b) < 1e-14);
}
