#include "kzqfi/lanczos.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "kzqfi/errors.hpp"

namespace kzqfi::linalg {

namespace {
using Vec = Eigen::VectorXcd;
}

LanczosResult lanczos_smallest(const MatVec& apply, std::size_t dim,
                               const std::complex<double>* initial,
                               const LanczosOptions& opts) {
  if (dim == 0) throw InvalidArgumentError("lanczos: empty operator");

  const int max_iter =
      std::min<std::size_t>(opts.max_iterations, dim);
  std::vector<Vec> basis;
  basis.reserve(max_iter);

  Vec v = Eigen::Map<const Vec>(initial, dim);
  double v_norm = v.norm();
  if (!(v_norm > 0.0) || !std::isfinite(v_norm))
    throw InvalidInputError("lanczos: invalid start vector");
  v /= v_norm;
  basis.push_back(v);

  std::vector<double> alpha, beta;
  Vec w(dim);
  LanczosResult result;
  Eigen::VectorXd ritz_coeffs;

  for (int it = 0; it < max_iter; ++it) {
    apply(basis[it].data(), w.data());
    double a = std::real(basis[it].dot(w));
    alpha.push_back(a);

    // Tridiagonal eigenproblem of the current Krylov space.
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    result.eigenvalue = es.eigenvalues()(0);
    ritz_coeffs = es.eigenvectors().col(0);
    result.iterations = it + 1;

    w -= a * basis[it];
    if (it > 0) w -= beta[it - 1] * basis[it - 1];
    // Full reorthogonalization keeps the basis clean at these dimensions.
    for (const auto& q : basis) w -= q.dot(w) * q;

    double b = w.norm();
    // Residual of the current Ritz pair: |beta_m * last coefficient|.
    double residual = b * std::abs(ritz_coeffs(m - 1));
    if (residual <= opts.tolerance * std::max(1.0, std::abs(result.eigenvalue))) {
      result.converged = true;
      break;
    }
    if (b < 1e-14) {
      // Invariant subspace: the Ritz value is exact within it.
      result.converged = true;
      break;
    }
    if (it + 1 < max_iter) {
      beta.push_back(b);
      basis.push_back(w / b);
    }
  }

  Vec x = Vec::Zero(dim);
  for (std::size_t i = 0; i < static_cast<std::size_t>(ritz_coeffs.size()); ++i)
    x += ritz_coeffs(i) * basis[i];
  x.normalize();
  result.eigenvector.assign(x.data(), x.data() + dim);
  return result;
}

}  // namespace kzqfi::linalg
