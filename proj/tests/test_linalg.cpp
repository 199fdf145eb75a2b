#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "kzqfi/errors.hpp"
#include "kzqfi/linalg.hpp"
#include "kzqfi/tfim.hpp"
#include "test_util.hpp"

using namespace kzqfi;
using linalg::AxisPair;
using linalg::Complex;
using linalg::DenseTensor;
using testutil::max_abs_diff;

namespace {

constexpr Complex kI{0.0, 1.0};

double isometry_residual_u(const DenseTensor& u) {
  // max |(U^dag U - I)_{ij}|
  std::size_t m = u.dim(0), r = u.dim(1);
  double worst = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      Complex s = 0.0;
      for (std::size_t a = 0; a < m; ++a) s += std::conj(u({a, i})) * u({a, j});
      if (i == j) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

double isometry_residual_vh(const DenseTensor& vh) {
  std::size_t r = vh.dim(0), n = vh.dim(1);
  double worst = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      Complex s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += vh({i, a}) * std::conj(vh({j, a}));
      if (i == j) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  }
  return worst;
}

DenseTensor reconstruct(const linalg::SVDResult& r) {
  std::size_t m = r.U.dim(0), k = r.S.size(), n = r.Vh.dim(1);
  DenseTensor out({m, n});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t a = 0; a < k; ++a)
        s += r.U({i, a}) * r.S[a] * r.Vh({a, j});
      out({i, j}) = s;
    }
  return out;
}

}  // namespace

TEST_CASE("DenseTensor layout is row-major with the last axis fastest") {
  DenseTensor t({2, 3});
  t({1, 2}) = 7.0;
  CHECK(t.data()[1 * 3 + 2] == Complex(7.0));
  // reshape is a pure reinterpretation of the same buffer
  DenseTensor r = t.reshaped({3, 2});
  CHECK(r({2, 1}) == Complex(7.0));
  CHECK_THROWS_AS(t.reshaped({4, 2}), InvalidArgumentError);
}

TEST_CASE("DenseTensor transpose permutes axes") {
  DenseTensor t = testutil::random_tensor({2, 3, 4}, 11);
  DenseTensor p = t.transposed({2, 0, 1});
  REQUIRE(p.shape() == std::vector<std::size_t>{4, 2, 3});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 4; ++k) CHECK(p({k, i, j}) == t({i, j, k}));
}

TEST_CASE("svd_truncated: identity matrix keeps both unit singular values") {
  auto r = linalg::svd_truncated(DenseTensor::identity(2), 2, 0.0);
  REQUIRE(r.S.size() == 2);
  CHECK(r.S[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.S[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.discarded_weight == 0.0);
}

TEST_CASE("svd_truncated: exact rank-1 matrix truncates with zero loss") {
  DenseTensor m({2, 2}, {1.0, 1.0, 1.0, 1.0});
  auto r = linalg::svd_truncated(m, 1, 1e-12);
  REQUIRE(r.S.size() == 1);
  CHECK(r.S[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.discarded_weight <= 1e-24);
}

TEST_CASE("svd_truncated: discarded weight matches a full-rank reference") {
  DenseTensor m = testutil::random_tensor({8, 8}, 42);
  auto r = linalg::svd_truncated(m, 4, 0.0);
  REQUIRE(r.S.size() == 4);

  // independent reference decomposition via Eigen
  Eigen::MatrixXcd em(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) em(i, j) = m({i, j});
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(em);
  Eigen::VectorXd s = svd.singularValues();
  double tail = 0.0, total = 0.0;
  for (int i = 0; i < 8; ++i) {
    total += s(i) * s(i);
    if (i >= 4) tail += s(i) * s(i);
  }
  CHECK(r.discarded_weight == doctest::Approx(tail / total).epsilon(1e-10));
  for (int i = 0; i < 4; ++i)
    CHECK(r.S[i] == doctest::Approx(s(i)).epsilon(1e-12));
}

TEST_CASE("svd_truncated: isometries, ordering, reconstruction bound") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    DenseTensor m = testutil::random_tensor({12, 7}, seed);
    auto r = linalg::svd_truncated(m, 5, 1e-3);
    CHECK(isometry_residual_u(r.U) < 1e-12);
    CHECK(isometry_residual_vh(r.Vh) < 1e-12);
    for (std::size_t i = 0; i + 1 < r.S.size(); ++i) CHECK(r.S[i] >= r.S[i + 1]);
    for (double s : r.S) CHECK(s >= 0.0);

    double num = 0.0, den = 0.0;
    DenseTensor rec = reconstruct(r);
    for (std::size_t i = 0; i < m.size(); ++i) {
      num += std::norm(m.data()[i] - rec.data()[i]);
      den += std::norm(m.data()[i]);
    }
    CHECK(num / den <= r.discarded_weight + 1e-12);
  }
}

TEST_CASE("svd_truncated: eps=0 at full rank reconstructs the input") {
  for (std::size_t n : {4u, 16u, 64u}) {
    DenseTensor m = testutil::random_tensor({n, n}, 100 + n);
    auto r = linalg::svd_truncated(m, n, 0.0);
    DenseTensor rec = reconstruct(r);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      num += std::norm(m.data()[i] - rec.data()[i]);
      den += std::norm(m.data()[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-10);
  }
}

TEST_CASE("svd_truncated: eps budget picks the smallest admissible rank") {
  // diag(1, 0.1): keeping only s=1 discards 0.01/1.01 ~ 9.9e-3
  DenseTensor m({2, 2}, {1.0, 0.0, 0.0, 0.1});
  auto loose = linalg::svd_truncated(m, 2, 0.02);
  CHECK(loose.S.size() == 1);
  auto tight = linalg::svd_truncated(m, 2, 1e-4);
  CHECK(tight.S.size() == 2);
}

TEST_CASE("svd_truncated: error taxonomy") {
  DenseTensor bad({2, 2}, {1.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0});
  CHECK_THROWS_AS(linalg::svd_truncated(bad, 2, 0.0), InvalidInputError);
  CHECK_THROWS_AS(linalg::svd_truncated(DenseTensor::identity(2), 0, 0.0),
                  InvalidArgumentError);
  CHECK_THROWS_AS(linalg::svd_truncated(testutil::random_tensor({2, 2, 2}, 1), 2, 0.0),
                  InvalidArgumentError);
}

TEST_CASE("hermitian_expm: Pauli-z quarter turn") {
  DenseTensor u = linalg::hermitian_expm(linalg::pauli_z(), -kI * (M_PI / 2.0));
  CHECK(std::abs(u({0, 0}) - Complex(0.0, -1.0)) < 1e-14);
  CHECK(std::abs(u({1, 1}) - Complex(0.0, 1.0)) < 1e-14);
  CHECK(std::abs(u({0, 1})) < 1e-14);
  CHECK(std::abs(u({1, 0})) < 1e-14);
}

TEST_CASE("hermitian_expm: zero generator gives the identity") {
  DenseTensor h({3, 3});
  DenseTensor u = linalg::hermitian_expm(h, Complex(0.3, -0.7));
  CHECK(max_abs_diff(u, DenseTensor::identity(3)) < 1e-15);
}

TEST_CASE("hermitian_expm: TFIM bond gate matches a Taylor-series oracle") {
  tfim::ModelParams params;
  params.n_sites = 6;
  DenseTensor h = tfim::bond_hamiltonian(params, 1.0, 2);
  Complex scale = -kI * 0.02;
  DenseTensor u = linalg::hermitian_expm(h, scale);

  // 30-term Taylor series of exp(scale*H)
  DenseTensor taylor = DenseTensor::identity(4);
  DenseTensor term = DenseTensor::identity(4);
  for (int n = 1; n <= 30; ++n) {
    term = linalg::contract(term, h, {AxisPair{1, 0}});
    for (std::size_t i = 0; i < term.size(); ++i)
      term.data()[i] *= scale / static_cast<double>(n);
    for (std::size_t i = 0; i < taylor.size(); ++i)
      taylor.data()[i] += term.data()[i];
  }
  CHECK(max_abs_diff(u, taylor) < 1e-12);

  // unitarity
  DenseTensor udag = u.conjugated().transposed({1, 0});
  DenseTensor prod = linalg::contract(udag, u, {AxisPair{1, 0}});
  CHECK(max_abs_diff(prod, DenseTensor::identity(4)) < 1e-12);
}

TEST_CASE("hermitian_expm: exp(-itH) exp(+itH) = 1") {
  DenseTensor h = testutil::random_hermitian(6, 5);
  DenseTensor a = linalg::hermitian_expm(h, -kI * 0.37);
  DenseTensor b = linalg::hermitian_expm(h, kI * 0.37);
  DenseTensor prod = linalg::contract(a, b, {AxisPair{1, 0}});
  CHECK(max_abs_diff(prod, DenseTensor::identity(6)) < 1e-11);
}

TEST_CASE("hermitian_expm rejects a non-Hermitian generator") {
  DenseTensor h({2, 2}, {0.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(linalg::hermitian_expm(h, -kI), InvalidInputError);
}

TEST_CASE("contract: identity acts trivially on a vector") {
  DenseTensor v({2}, {Complex(0.3, 0.1), Complex(-0.2, 0.9)});
  DenseTensor out = linalg::contract(DenseTensor::identity(2), v, {AxisPair{1, 0}});
  REQUIRE(out.shape() == std::vector<std::size_t>{2});
  CHECK(std::abs(out({0}) - v({0})) < 1e-15);
  CHECK(std::abs(out({1}) - v({1})) < 1e-15);
}

TEST_CASE("contract: matrix product equals the naive triple loop") {
  DenseTensor a = testutil::random_tensor({3, 5}, 7);
  DenseTensor b = testutil::random_tensor({5, 4}, 8);
  DenseTensor c = linalg::contract(a, b, {AxisPair{1, 0}});
  REQUIRE(c.shape() == std::vector<std::size_t>{3, 4});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < 5; ++k) s += a({i, k}) * b({k, j});
      CHECK(std::abs(c({i, j}) - s) < 1e-13);
    }
}

TEST_CASE("contract: full self-contraction gives the squared Frobenius norm") {
  DenseTensor t = testutil::random_tensor({2, 3, 2}, 9);
  DenseTensor tc = t.conjugated();
  DenseTensor s =
      linalg::contract(tc, t, {AxisPair{0, 0}, AxisPair{1, 1}, AxisPair{2, 2}});
  REQUIRE(s.rank() == 0);
  double n = t.frobenius_norm();
  CHECK(s.data()[0].real() == doctest::Approx(n * n).epsilon(1e-12));
  CHECK(std::abs(s.data()[0].imag()) < 1e-12);
}

TEST_CASE("contract: bilinear in the first argument") {
  DenseTensor a = testutil::random_tensor({4, 3}, 10);
  DenseTensor b = testutil::random_tensor({3, 4}, 11);
  Complex alpha(0.7, -1.3);
  DenseTensor sa = a;
  for (std::size_t i = 0; i < sa.size(); ++i) sa.data()[i] *= alpha;
  DenseTensor lhs = linalg::contract(sa, b, {AxisPair{1, 0}});
  DenseTensor rhs = linalg::contract(a, b, {AxisPair{1, 0}});
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs.data()[i] *= alpha;
  CHECK(max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("contract rejects mismatched axis dimensions") {
  DenseTensor a = testutil::random_tensor({3, 5}, 12);
  DenseTensor b = testutil::random_tensor({4, 2}, 13);
  CHECK_THROWS_AS(linalg::contract(a, b, {AxisPair{1, 0}}), InvalidArgumentError);
}

TEST_CASE("kron follows the row-major convention") {
  DenseTensor k = linalg::kron(linalg::pauli_x(), linalg::pauli_z());
  // (sx kron sz)[(i*2+k),(j*2+l)] = sx(i,j) sz(k,l)
  CHECK(std::abs(k({0, 2}) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(k({1, 3}) - Complex(-1.0)) < 1e-15);
  CHECK(std::abs(k({2, 0}) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(k({3, 1}) - Complex(-1.0)) < 1e-15);
  CHECK(std::abs(k({0, 0})) < 1e-15);
}
