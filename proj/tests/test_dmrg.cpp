#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "kzqfi/dmrg.hpp"
#include "kzqfi/errors.hpp"
#include "kzqfi/linalg.hpp"
#include "kzqfi/oracles.hpp"
#include "kzqfi/tfim.hpp"

using namespace kzqfi;
using linalg::Complex;

namespace {

tfim::ModelParams params_n(std::size_t n) {
  tfim::ModelParams p;
  p.n_sites = n;
  return p;
}

}  // namespace

TEST_CASE("ground state at g=5 matches dense diagonalization") {
  auto res = dmrg::ground_state(params_n(8), 5.0, {});
  auto [dense, e_exact] = oracles::dense_ground_state(params_n(8), 5.0);
  CHECK(std::abs(res.energy - e_exact) < 1e-8);
  CHECK(res.energy >= e_exact - 5e-10);  // variational, Lanczos residual slack
}

TEST_CASE("ground state at g=5 is a near-polarized paramagnet") {
  // leading correction to <sx> is -(J/2g)^2 = -0.01 per site
  auto res = dmrg::ground_state(params_n(8), 5.0, {});
  for (std::size_t n = 0; n < 8; ++n) {
    CHECK(res.psi.expectation_one_site(linalg::pauli_x(), n) > 0.985);
    CHECK(std::abs(res.psi.expectation_one_site(linalg::pauli_z(), n)) < 1e-8);
  }
}

TEST_CASE("huge field limit collapses onto the x-polarized product state") {
  auto res = dmrg::ground_state(params_n(8), 500.0, {});
  double s = 1.0 / std::sqrt(2.0);
  auto target = oracles::dense_product_state(8, {Complex(s), Complex(s)});
  auto state = oracles::dense_from_mps(res.psi);
  CHECK(oracles::fidelity(state, target) > 1.0 - 1e-4);
}

TEST_CASE("variational bound against dense diagonalization on a small grid") {
  for (std::size_t n : {8u, 10u}) {
    for (double g : {1.0, 5.0}) {
      auto res = dmrg::ground_state(params_n(n), g, {});
      auto [dense, e_exact] = oracles::dense_ground_state(params_n(n), g);
      CAPTURE(n);
      CAPTURE(g);
      CHECK(res.energy >= e_exact - 5e-10);
      CHECK(std::abs(res.energy - e_exact) < 1e-8);
    }
  }
}

TEST_CASE("the critical point needs and gets bond growth") {
  auto res = dmrg::ground_state(params_n(12), 1.0, {});
  CHECK(res.psi.max_bond_dim() > 2);
  auto [dense, e_exact] = oracles::dense_ground_state(params_n(12), 1.0);
  CHECK(std::abs(res.energy - e_exact) < 1e-8);
}

TEST_CASE("returned state is normalized and canonical") {
  auto res = dmrg::ground_state(params_n(8), 5.0, {});
  CHECK(std::abs(res.psi.norm() - 1.0) < 1e-10);
  CHECK(res.psi.center() == 0);
  CHECK(res.psi.isometry_residual() < 1e-10);
  res.psi.validate_structure();
}

TEST_CASE("sweep energies decrease monotonically") {
  auto res = dmrg::ground_state(params_n(10), 1.0, {});
  REQUIRE(res.energy_per_sweep.size() >= 2);
  for (std::size_t i = 1; i < res.energy_per_sweep.size(); ++i)
    CHECK(res.energy_per_sweep[i] <= res.energy_per_sweep[i - 1] + 1e-12);
  CHECK(res.sweeps == res.energy_per_sweep.size());
}

TEST_CASE("identical seeds reproduce the energy to 1e-12") {
  auto a = dmrg::ground_state(params_n(8), 2.0, {});
  auto b = dmrg::ground_state(params_n(8), 2.0, {});
  CHECK(std::abs(a.energy - b.energy) < 1e-12);
}

TEST_CASE("exhausting max_sweeps raises ConvergenceError with a trace") {
  dmrg::DMRGConfig cfg;
  cfg.max_sweeps = 1;
  cfg.energy_tol = 1e-300;
  try {
    dmrg::ground_state(params_n(8), 1.0, cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(!e.energy_trace.empty());
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(dmrg::ground_state(params_n(2), 5.0, {}), InvalidArgumentError);
  dmrg::DMRGConfig bad;
  bad.chi_max = 1;
  CHECK_THROWS_AS(dmrg::ground_state(params_n(8), 5.0, bad), InvalidArgumentError);
  dmrg::DMRGConfig bad2;
  bad2.energy_tol = 0.0;
  CHECK_THROWS_AS(dmrg::ground_state(params_n(8), 5.0, bad2), InvalidArgumentError);
}
