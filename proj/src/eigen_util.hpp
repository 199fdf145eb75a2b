#pragma once

// Internal Eigen interop helpers. Not installed; public headers stay
// Eigen-free so downstream code only sees DenseTensor.

#include <Eigen/Dense>

#include "kzqfi/linalg.hpp"

namespace kzqfi::linalg {

using EMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

inline Eigen::Map<const EMatrix> map_matrix(const DenseTensor& t,
                                            std::size_t rows,
                                            std::size_t cols) {
  return {t.data(), static_cast<Eigen::Index>(rows),
          static_cast<Eigen::Index>(cols)};
}

inline Eigen::Map<EMatrix> map_matrix(DenseTensor& t, std::size_t rows,
                                      std::size_t cols) {
  return {t.data(), static_cast<Eigen::Index>(rows),
          static_cast<Eigen::Index>(cols)};
}

inline DenseTensor from_eigen(const EMatrix& m,
                              std::vector<std::size_t> shape) {
  std::vector<Complex> data(m.data(), m.data() + m.size());
  return DenseTensor(std::move(shape), std::move(data));
}

}  // namespace kzqfi::linalg
