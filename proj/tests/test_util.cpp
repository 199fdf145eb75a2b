#include "test_util.hpp"

#include <Eigen/Dense>

namespace testutil {

DenseTensor random_unitary(std::size_t n, std::uint64_t seed) {
  DenseTensor g = random_tensor({n, n}, seed);
  Eigen::MatrixXcd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = g({i, j});
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t j = 0; j < n; ++j) {
    Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  DenseTensor out({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out({i, j}) = q(i, j);
  return out;
}

}  // namespace testutil
