#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace kzqfi::linalg {

/// y = A x for a Hermitian operator of the given dimension.
using MatVec =
    std::function<void(const std::complex<double>*, std::complex<double>*)>;

struct LanczosOptions {
  int max_iterations = 200;
  /// Stop once the Ritz residual ||A v - lambda v|| drops below
  /// tol * max(1, |lambda|).
  double tolerance = 1e-12;
};

struct LanczosResult {
  double eigenvalue = 0.0;
  std::vector<std::complex<double>> eigenvector;
  int iterations = 0;
  bool converged = false;
};

/// Smallest eigenpair of a Hermitian operator by Lanczos iteration with full
/// reorthogonalization, started from `initial` (must be nonzero; it is the
/// warm start in DMRG sweeps).
LanczosResult lanczos_smallest(const MatVec& apply, std::size_t dim,
                               const std::complex<double>* initial,
                               const LanczosOptions& opts = {});

}  // namespace kzqfi::linalg
