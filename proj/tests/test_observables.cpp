#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kzqfi/errors.hpp"
#include "kzqfi/linalg.hpp"
#include "kzqfi/mps.hpp"
#include "kzqfi/observables.hpp"

using namespace kzqfi;
using linalg::Complex;
using mps::MPSState;

namespace {

const std::array<Complex, 2> kUp{Complex(1.0), Complex(0.0)};
const std::array<Complex, 2> kPlusX{Complex(1.0 / std::sqrt(2.0)),
                                    Complex(1.0 / std::sqrt(2.0))};

// |up down up down ...> built by flipping every odd site of the ferromagnet.
MPSState neel_state(std::size_t n) {
  MPSState psi = MPSState::product_state(n, kUp);
  auto flip_right = linalg::kron(linalg::identity2(), linalg::pauli_x());
  for (std::size_t site = 1; site < n; site += 2)
    psi.apply_two_site_gate(flip_right, site - 1, 4, 0.0);
  return psi;
}

}  // namespace

TEST_CASE("qfi_density: GHZ saturates N") {
  CHECK(observables::qfi_density(MPSState::ghz_state(10)) ==
        doctest::Approx(10.0).epsilon(1e-11));
}

TEST_CASE("qfi_density: x-polarized product state gives 1") {
  for (std::size_t n : {2u, 5u, 9u})
    CHECK(observables::qfi_density(MPSState::product_state(n, kPlusX)) ==
          doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("qfi_density subtracts the mean term") {
  // ferromagnet: <O^2> = N^2 but Var = 0
  MPSState psi = MPSState::product_state(6, kUp);
  auto table = observables::measure_zz_table(psi);
  auto q = observables::qfi_density_full(table);
  CHECK(q.mean_o == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(q.mean_sq == doctest::Approx(36.0).epsilon(1e-12));
  CHECK(std::abs(q.f_q) < 1e-10);
}

TEST_CASE("qfi_density_factor4 is exactly four times the density") {
  MPSState psi = MPSState::random_state(8, 6, 19);
  CHECK(observables::qfi_density_factor4(psi) ==
        doctest::Approx(4.0 * observables::qfi_density(psi)).epsilon(1e-12));
}

TEST_CASE("consistency: table sweep equals independent pairwise correlators") {
  // random state: nonzero <sz_n>, so the mean subtraction is exercised too
  MPSState psi = MPSState::random_state(9, 8, 37);
  auto table = observables::measure_zz_table(psi);
  auto q = observables::qfi_density_full(table);

  double mean = 0.0, sq = 0.0;
  for (std::size_t m = 0; m < 9; ++m) {
    mean += psi.expectation_one_site(linalg::pauli_z(), m);
    for (std::size_t n = 0; n < 9; ++n)
      sq += psi.correlation_two_site(linalg::pauli_z(), linalg::pauli_z(), m, n);
  }
  double f_ref = (sq - mean * mean) / 9.0;
  CHECK(std::abs(q.f_q - f_ref) < 1e-10);
  CHECK(std::abs(q.mean_o - mean) < 1e-10);
  CHECK(std::abs(q.mean_sq - sq) < 1e-10);
}

TEST_CASE("variance bound: f_Q <= N with equality only on GHZ") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    MPSState psi = MPSState::random_state(7, 6, 1000 + seed);
    double f = observables::qfi_density(psi);
    CHECK(f >= 0.0);
    CHECK(f <= 7.0 + 1e-10);
    CHECK(f < 7.0 - 1e-3);  // random states sit strictly inside the bound
  }
  CHECK(observables::qfi_density(MPSState::ghz_state(7)) ==
        doctest::Approx(7.0).epsilon(1e-11));
}

TEST_CASE("correlation_profile: GHZ is flat at 1, product state flat at 0") {
  auto prof = observables::correlation_profile(MPSState::ghz_state(8));
  REQUIRE(prof.size() == 3);  // r = 1 .. N/2-1
  for (std::size_t i = 0; i < prof.size(); ++i) {
    CHECK(prof[i].first == i + 1);
    CHECK(prof[i].second == doctest::Approx(1.0).epsilon(1e-11));
  }
  for (const auto& [r, c] :
       observables::correlation_profile(MPSState::product_state(8, kPlusX)))
    CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("correlation_profile anchors at the chain center") {
  MPSState psi = MPSState::random_state(8, 6, 91);
  auto table = observables::measure_zz_table(psi);
  auto prof = observables::correlation_profile(table);
  REQUIRE(prof.size() == 3);
  for (const auto& [r, c] : prof)
    CHECK(c == doctest::Approx(table.zz_at(3, 3 + r)).epsilon(1e-13));
}

TEST_CASE("defect_density: trivial states") {
  CHECK(std::abs(observables::defect_density(MPSState::ghz_state(6))) < 1e-11);
  CHECK(std::abs(observables::defect_density(MPSState::product_state(6, kUp))) <
        1e-11);
  CHECK(observables::defect_density(neel_state(6)) ==
        doctest::Approx(1.0).epsilon(1e-11));
  CHECK(observables::defect_density(MPSState::product_state(6, kPlusX)) ==
        doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("entangled_particle_witness boundary convention") {
  CHECK(observables::entangled_particle_witness(1.0) == 1);
  CHECK(observables::entangled_particle_witness(7.6358) == 8);
  CHECK(observables::entangled_particle_witness(0.3) == 1);
  CHECK(observables::entangled_particle_witness(8.0) == 8);
  CHECK(observables::entangled_particle_witness(8.0001) == 9);
  CHECK(observables::entangled_particle_witness(0.0) == 0);
  CHECK_THROWS_AS(observables::entangled_particle_witness(-0.1),
                  InvalidArgumentError);
}

TEST_CASE("measure_observables populates the record coherently") {
  MPSState psi = MPSState::ghz_state(8);
  auto rec = observables::measure_observables(psi);
  CHECK(rec.n_sites == 8);
  CHECK(rec.f_q == doctest::Approx(8.0).epsilon(1e-11));
  CHECK(std::abs(rec.n_d) < 1e-11);
  CHECK(rec.mean_sz < 1e-10);
  REQUIRE(rec.c_z.size() == 3);
  for (const auto& [r, c] : rec.c_z)
    CHECK(c == doctest::Approx(1.0).epsilon(1e-11));
}
