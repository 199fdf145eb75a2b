#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace kzqfi::linalg {

using Complex = std::complex<double>;

/// Dense complex tensor in row-major layout: the last axis varies fastest,
/// so a rank-2 tensor of shape (m, n) stores element (i, j) at data[i*n + j].
/// Reshapes between shapes of equal size are therefore free and deterministic
/// across platforms.
class DenseTensor {
 public:
  DenseTensor() = default;

  /// Zero-initialized tensor of the given shape. Every extent must be >= 1.
  explicit DenseTensor(std::vector<std::size_t> shape);

  /// Adopts existing data; length must equal the product of the extents.
  DenseTensor(std::vector<std::size_t> shape, std::vector<Complex> data);

  std::size_t rank() const { return shape_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }

  /// Element access by multi-index, e.g. t({i, j, k}).
  Complex& operator()(std::initializer_list<std::size_t> idx);
  const Complex& operator()(std::initializer_list<std::size_t> idx) const;

  /// Same data, new shape (sizes must match). O(1) on rvalues.
  DenseTensor reshaped(std::vector<std::size_t> new_shape) const&;
  DenseTensor reshaped(std::vector<std::size_t> new_shape) &&;

  /// Axis permutation: result axis i is input axis perm[i].
  DenseTensor transposed(std::span<const std::size_t> perm) const;
  DenseTensor transposed(std::initializer_list<std::size_t> perm) const;

  DenseTensor conjugated() const;

  double frobenius_norm() const;
  bool all_finite() const;

  static DenseTensor identity(std::size_t n);

 private:
  std::size_t flat_index(std::span<const std::size_t> idx) const;

  std::vector<std::size_t> shape_;
  std::vector<Complex> data_;
};

/// Economy SVD with truncation. S is sorted descending; U has orthonormal
/// columns and Vh orthonormal rows. discarded_weight is the truncated tail
/// weight sum(s_i^2, discarded) / sum(s_i^2, all).
struct SVDResult {
  DenseTensor U;
  std::vector<double> S;
  DenseTensor Vh;
  double discarded_weight = 0.0;
};

/// Truncated SVD of a rank-2 tensor. Keeps the smallest rank r <= chi_max
/// with discarded_weight <= eps; if no rank within chi_max satisfies eps the
/// cap binds and the achieved discarded_weight is reported. Singular values
/// below 1e-14 * S[0] are always dropped.
SVDResult svd_truncated(const DenseTensor& m, std::size_t chi_max, double eps);

/// exp(scale * H) of a Hermitian rank-2 tensor via eigendecomposition.
/// Unitary (to rounding) when scale is purely imaginary.
DenseTensor hermitian_expm(const DenseTensor& h, Complex scale);

using AxisPair = std::pair<std::size_t, std::size_t>;

/// Tensor contraction over the given (A-axis, B-axis) pairs. The output
/// shape is A's uncontracted axes in order, then B's uncontracted axes in
/// order. With no pairs this is the outer product.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const AxisPair> axes);
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::initializer_list<AxisPair> axes);

/// Kronecker product of two rank-2 tensors, row-major convention:
/// out[(i*p + k), (j*q + l)] = a(i,j) * b(k,l).
DenseTensor kron(const DenseTensor& a, const DenseTensor& b);

/// Pauli matrices and the 2x2 identity as rank-2 tensors.
DenseTensor pauli_x();
DenseTensor pauli_y();
DenseTensor pauli_z();
DenseTensor identity2();

}  // namespace kzqfi::linalg
