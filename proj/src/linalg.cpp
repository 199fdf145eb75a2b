#include "kzqfi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <complex>
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "eigen_util.hpp"
#include "kzqfi/errors.hpp"

namespace kzqfi::linalg {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw InvalidArgumentError("tensor extent must be positive");
    n *= d;
  }
  return n;
}

std::vector<std::size_t> row_major_strides(
    const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;)
    strides[i - 1] = strides[i] * shape[i];
  return strides;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_)) {}

DenseTensor::DenseTensor(std::vector<std::size_t> shape,
                         std::vector<Complex> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_product(shape_) != data_.size())
    throw InvalidArgumentError("tensor data length does not match shape");
}

std::size_t DenseTensor::flat_index(std::span<const std::size_t> idx) const {
  if (idx.size() != shape_.size())
    throw InvalidArgumentError("index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= shape_[i]) throw InvalidArgumentError("index out of range");
    flat = flat * shape_[i] + idx[i];
  }
  return flat;
}

Complex& DenseTensor::operator()(std::initializer_list<std::size_t> idx) {
  return data_[flat_index(std::span(idx.begin(), idx.size()))];
}

const Complex& DenseTensor::operator()(
    std::initializer_list<std::size_t> idx) const {
  return data_[flat_index(std::span(idx.begin(), idx.size()))];
}

DenseTensor DenseTensor::reshaped(std::vector<std::size_t> new_shape) const& {
  if (shape_product(new_shape) != data_.size())
    throw InvalidArgumentError("reshape changes tensor size");
  return DenseTensor(std::move(new_shape), data_);
}

DenseTensor DenseTensor::reshaped(std::vector<std::size_t> new_shape) && {
  if (shape_product(new_shape) != data_.size())
    throw InvalidArgumentError("reshape changes tensor size");
  return DenseTensor(std::move(new_shape), std::move(data_));
}

DenseTensor DenseTensor::transposed(std::span<const std::size_t> perm) const {
  const std::size_t r = rank();
  if (perm.size() != r) throw InvalidArgumentError("permutation rank mismatch");
  std::vector<bool> seen(r, false);
  for (std::size_t p : perm) {
    if (p >= r || seen[p]) throw InvalidArgumentError("invalid permutation");
    seen[p] = true;
  }

  std::vector<std::size_t> out_shape(r);
  for (std::size_t i = 0; i < r; ++i) out_shape[i] = shape_[perm[i]];

  const auto in_strides = row_major_strides(shape_);
  std::vector<std::size_t> out_axis_stride(r);  // input stride per output axis
  for (std::size_t i = 0; i < r; ++i) out_axis_stride[i] = in_strides[perm[i]];

  DenseTensor out(out_shape);
  if (r == 0) {
    out.data_[0] = data_[0];
    return out;
  }

  // Odometer walk over the output index; src tracks the input flat offset.
  std::vector<std::size_t> idx(r, 0);
  std::size_t src = 0;
  for (std::size_t dst = 0; dst < out.size(); ++dst) {
    out.data_[dst] = data_[src];
    for (std::size_t axis = r; axis-- > 0;) {
      if (++idx[axis] < out_shape[axis]) {
        src += out_axis_stride[axis];
        break;
      }
      src -= out_axis_stride[axis] * (out_shape[axis] - 1);
      idx[axis] = 0;
    }
  }
  return out;
}

DenseTensor DenseTensor::transposed(
    std::initializer_list<std::size_t> perm) const {
  return transposed(std::span(perm.begin(), perm.size()));
}

DenseTensor DenseTensor::conjugated() const {
  DenseTensor out(shape_, data_);
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

double DenseTensor::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

bool DenseTensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

DenseTensor DenseTensor::identity(std::size_t n) {
  DenseTensor out({n, n});
  for (std::size_t i = 0; i < n; ++i) out.data()[i * n + i] = 1.0;
  return out;
}

// ---------------------------------------------------------------------------
// SVD
// ---------------------------------------------------------------------------

namespace {

// Economy SVD via LAPACK divide-and-conquer, with gesvd and Jacobi fallbacks
// for the rare no-convergence cases.
void full_svd(const DenseTensor& m, std::size_t rows, std::size_t cols,
              std::vector<Complex>& u, std::vector<double>& s,
              std::vector<Complex>& vh) {
  const std::size_t k = std::min(rows, cols);
  u.assign(rows * k, Complex(0));
  s.assign(k, 0.0);
  vh.assign(k * cols, Complex(0));

  std::vector<Complex> work(m.data(), m.data() + m.size());
  lapack_int info = LAPACKE_zgesdd(
      LAPACK_ROW_MAJOR, 'S', static_cast<lapack_int>(rows),
      static_cast<lapack_int>(cols), work.data(), static_cast<lapack_int>(cols),
      s.data(), u.data(), static_cast<lapack_int>(k), vh.data(),
      static_cast<lapack_int>(cols));
  if (info == 0) return;

  work.assign(m.data(), m.data() + m.size());
  std::vector<double> superb(k > 1 ? k - 1 : 1);
  info = LAPACKE_zgesvd(LAPACK_ROW_MAJOR, 'S', 'S',
                        static_cast<lapack_int>(rows),
                        static_cast<lapack_int>(cols), work.data(),
                        static_cast<lapack_int>(cols), s.data(), u.data(),
                        static_cast<lapack_int>(k), vh.data(),
                        static_cast<lapack_int>(cols), superb.data());
  if (info == 0) return;

  Eigen::JacobiSVD<EMatrix> svd(map_matrix(m, rows, cols),
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::Map<EMatrix>(u.data(), rows, k) = svd.matrixU();
  Eigen::Map<EMatrix>(vh.data(), k, cols) = svd.matrixV().adjoint();
  Eigen::Map<Eigen::VectorXd>(s.data(), k) = svd.singularValues();
}

}  // namespace

SVDResult svd_truncated(const DenseTensor& m, std::size_t chi_max,
                        double eps) {
  if (m.rank() != 2)
    throw InvalidArgumentError("svd_truncated expects a rank-2 tensor");
  if (chi_max == 0) throw InvalidArgumentError("chi_max must be positive");
  if (eps < 0.0) throw InvalidArgumentError("eps must be non-negative");
  if (!m.all_finite())
    throw InvalidInputError("svd_truncated: non-finite input");

  const std::size_t rows = m.dim(0), cols = m.dim(1);
  std::vector<Complex> u, vh;
  std::vector<double> s;
  full_svd(m, rows, cols, u, s, vh);

  const std::size_t k = s.size();
  double total = 0.0;
  for (double sv : s) total += sv * sv;

  // Hard floor: values below 1e-14 * S[0] are numerical noise.
  std::size_t max_keep = k;
  const double floor = 1e-14 * s[0];
  while (max_keep > 1 && s[max_keep - 1] < floor) --max_keep;
  max_keep = std::min(max_keep, chi_max);

  // Smallest rank whose discarded tail weight is within eps, capped.
  std::vector<double> tail(k + 1, 0.0);  // tail[r] = sum of s_i^2 for i >= r
  for (std::size_t i = k; i-- > 0;) tail[i] = tail[i + 1] + s[i] * s[i];
  std::size_t keep = max_keep;
  if (total > 0.0) {
    for (std::size_t r = 1; r <= max_keep; ++r) {
      if (tail[r] <= eps * total) {
        keep = r;
        break;
      }
    }
  } else {
    keep = 1;
  }

  SVDResult out;
  out.discarded_weight = total > 0.0 ? tail[keep] / total : 0.0;
  out.S.assign(s.begin(), s.begin() + keep);

  out.U = DenseTensor({rows, keep});
  for (std::size_t i = 0; i < rows; ++i)
    std::copy_n(u.begin() + i * k, keep, out.U.data() + i * keep);
  out.Vh = DenseTensor({keep, cols}, {vh.begin(), vh.begin() + keep * cols});
  return out;
}

// ---------------------------------------------------------------------------
// Hermitian matrix exponential
// ---------------------------------------------------------------------------

DenseTensor hermitian_expm(const DenseTensor& h, Complex scale) {
  if (h.rank() != 2 || h.dim(0) != h.dim(1))
    throw InvalidArgumentError("hermitian_expm expects a square rank-2 tensor");
  if (!h.all_finite()) throw InvalidInputError("hermitian_expm: non-finite input");

  const std::size_t n = h.dim(0);
  auto hm = map_matrix(h, n, n);
  double max_abs = 0.0, max_dev = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      max_abs = std::max(max_abs, std::abs(hm(i, j)));
      max_dev = std::max(max_dev, std::abs(hm(i, j) - std::conj(hm(j, i))));
    }
  if (max_dev > 1e-12 * std::max(1.0, max_abs))
    throw InvalidInputError("hermitian_expm: input is not Hermitian");

  Eigen::SelfAdjointEigenSolver<EMatrix> es(
      (hm + hm.adjoint()) / 2.0);  // symmetrize the tolerated residual away
  if (es.info() != Eigen::Success)
    throw NumericalError("hermitian_expm: eigendecomposition failed");

  EVector phases(n);
  for (std::size_t i = 0; i < n; ++i)
    phases(i) = std::exp(scale * es.eigenvalues()(i));
  EMatrix result =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return from_eigen(result, {n, n});
}

// ---------------------------------------------------------------------------
// Contraction
// ---------------------------------------------------------------------------

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::span<const AxisPair> axes) {
  const std::size_t ra = a.rank(), rb = b.rank();
  std::vector<bool> a_contracted(ra, false), b_contracted(rb, false);
  std::size_t contracted_size = 1;
  for (const auto& [ia, ib] : axes) {
    if (ia >= ra || ib >= rb)
      throw InvalidArgumentError("contract: axis out of range");
    if (a_contracted[ia] || b_contracted[ib])
      throw InvalidArgumentError("contract: repeated axis");
    if (a.dim(ia) != b.dim(ib))
      throw InvalidArgumentError("contract: dimension mismatch");
    a_contracted[ia] = true;
    b_contracted[ib] = true;
    contracted_size *= a.dim(ia);
  }

  std::vector<std::size_t> perm_a, perm_b, out_shape;
  for (std::size_t i = 0; i < ra; ++i)
    if (!a_contracted[i]) {
      perm_a.push_back(i);
      out_shape.push_back(a.dim(i));
    }
  for (const auto& [ia, ib] : axes) perm_a.push_back(ia);
  for (const auto& [ia, ib] : axes) perm_b.push_back(ib);
  for (std::size_t i = 0; i < rb; ++i)
    if (!b_contracted[i]) {
      perm_b.push_back(i);
      out_shape.push_back(b.dim(i));
    }

  const std::size_t m = a.size() / contracted_size;
  const std::size_t n = b.size() / contracted_size;

  DenseTensor at = a.transposed(perm_a);
  DenseTensor bt = b.transposed(perm_b);
  DenseTensor out(out_shape);
  map_matrix(out, m, n).noalias() =
      map_matrix(at, m, contracted_size) * map_matrix(bt, contracted_size, n);
  return out;
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     std::initializer_list<AxisPair> axes) {
  return contract(a, b, std::span(axes.begin(), axes.size()));
}

DenseTensor kron(const DenseTensor& a, const DenseTensor& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw InvalidArgumentError("kron expects rank-2 tensors");
  const std::size_t m = a.dim(0), n = a.dim(1), p = b.dim(0), q = b.dim(1);
  DenseTensor out({m * p, n * q});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < p; ++k)
        for (std::size_t l = 0; l < q; ++l)
          out({i * p + k, j * q + l}) = a({i, j}) * b({k, l});
  return out;
}

DenseTensor pauli_x() {
  return DenseTensor({2, 2}, {0.0, 1.0, 1.0, 0.0});
}

DenseTensor pauli_y() {
  return DenseTensor({2, 2},
                     {0.0, Complex(0, -1), Complex(0, 1), 0.0});
}

DenseTensor pauli_z() {
  return DenseTensor({2, 2}, {1.0, 0.0, 0.0, -1.0});
}

DenseTensor identity2() { return DenseTensor::identity(2); }

}  // namespace kzqfi::linalg
