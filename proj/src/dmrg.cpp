#include "kzqfi/dmrg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "kzqfi/errors.hpp"
#include "kzqfi/lanczos.hpp"
#include "kzqfi/linalg.hpp"

namespace kzqfi::dmrg {
namespace {

using linalg::AxisPair;
using linalg::Complex;
using linalg::contract;
using linalg::DenseTensor;

// MPO tensors (wl, wr, s', s) for H = -J sum sz sz - g sum sx, bond dim 3:
//   W = [[I, 0, 0], [sz, 0, 0], [-g sx, -J sz, I]]
// with the bottom row as the left boundary and the first column as the right.
std::vector<DenseTensor> build_mpo(const tfim::ModelParams& params, double g) {
  DenseTensor sz = linalg::pauli_z();
  DenseTensor sx = linalg::pauli_x();
  DenseTensor id = linalg::identity2();

  auto block = [&](DenseTensor& w, std::size_t wl, std::size_t wr,
                   const DenseTensor& op, Complex factor) {
    std::size_t wr_dim = w.dim(1);
    for (std::size_t sp = 0; sp < 2; ++sp)
      for (std::size_t s = 0; s < 2; ++s)
        w.data()[((wl * wr_dim + wr) * 2 + sp) * 2 + s] +=
            factor * op.data()[sp * 2 + s];
  };

  const Complex mg(-g, 0.0);
  const Complex mj(-params.j_coupling, 0.0);
  std::size_t n = params.n_sites;
  std::vector<DenseTensor> mpo;
  mpo.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t wl = i == 0 ? 1 : 3;
    std::size_t wr = i == n - 1 ? 1 : 3;
    DenseTensor w({wl, wr, 2, 2});
    std::size_t row = wl - 1;  // bottom row, or the only row at the left edge
    if (wr == 1) {
      // right edge: first column [I, sz, -g sx]^T, folded with the row select
      if (wl == 3) {
        block(w, 0, 0, id, 1.0);
        block(w, 1, 0, sz, 1.0);
        block(w, 2, 0, sx, mg);
      } else {
        throw InvalidArgumentError("build_mpo: need at least 2 sites");
      }
    } else {
      block(w, row, 0, sx, mg);
      block(w, row, 1, sz, mj);
      block(w, row, 2, id, 1.0);
      if (wl == 3) {
        block(w, 0, 0, id, 1.0);
        block(w, 1, 0, sz, 1.0);
      }
    }
    mpo.push_back(std::move(w));
  }
  return mpo;
}

DenseTensor ones_env() {
  DenseTensor e({1, 1, 1});
  e.data()[0] = 1.0;
  return e;
}

// Environments carry (bra bond, mpo bond, ket bond).
DenseTensor extend_left(const DenseTensor& le, const DenseTensor& a,
                        const DenseTensor& w) {
  DenseTensor u = contract(le, a, {AxisPair{2, 0}});             // (x, w, s, r)
  u = contract(u, w, {AxisPair{1, 0}, AxisPair{2, 3}});          // (x, r, wr, s')
  u = contract(u, a.conjugated(), {AxisPair{0, 0}, AxisPair{3, 1}});  // (r, wr, xr)
  return u.transposed({2, 1, 0});
}

DenseTensor extend_right(const DenseTensor& re, const DenseTensor& b,
                         const DenseTensor& w) {
  DenseTensor d = contract(b, re, {AxisPair{2, 2}});             // (l, s, x, w)
  d = contract(d, w, {AxisPair{3, 1}, AxisPair{1, 3}});          // (l, x, wl, s')
  d = contract(d, b.conjugated(), {AxisPair{1, 2}, AxisPair{3, 1}});  // (l, wl, xl)
  return d.transposed({2, 1, 0});
}

// v(l,2,2,r) -> (LE . W_i . W_{i+1} . RE) v, same layout.
DenseTensor apply_heff(const DenseTensor& le, const DenseTensor& wl,
                       const DenseTensor& wr, const DenseTensor& re,
                       const DenseTensor& v) {
  DenseTensor t = contract(le, v, {AxisPair{2, 0}});              // (x,w,s,t,r)
  t = contract(t, wl, {AxisPair{1, 0}, AxisPair{2, 3}});          // (x,t,r,wr,s')
  t = contract(t, wr, {AxisPair{3, 0}, AxisPair{1, 3}});          // (x,r,s',wr2,t')
  t = contract(t, re, {AxisPair{1, 2}, AxisPair{3, 1}});          // (x,s',t',x2)
  return t;
}

}  // namespace

DMRGResult ground_state(const tfim::ModelParams& params, double g,
                        const DMRGConfig& cfg) {
  if (params.n_sites < 4)
    throw InvalidArgumentError("dmrg: need at least 4 sites");
  if (cfg.chi_max < 2) throw InvalidArgumentError("dmrg: chi_max must be >= 2");
  if (!(cfg.svd_eps >= 0.0) || !(cfg.energy_tol > 0.0) ||
      !(cfg.local_solver_tol > 0.0))
    throw InvalidArgumentError("dmrg: tolerances must be positive");

  const std::size_t n = params.n_sites;
  std::vector<DenseTensor> mpo = build_mpo(params, g);
  mps::MPSState psi =
      mps::MPSState::random_state(n, std::min<std::size_t>(8, cfg.chi_max),
                                  cfg.seed);

  std::vector<DenseTensor> le(n + 1, ones_env());
  std::vector<DenseTensor> re(n + 1, ones_env());
  for (std::size_t i = n; i-- > 1;)
    re[i] = extend_right(re[i + 1], psi.tensor(i), mpo[i]);

  linalg::LanczosOptions lopts;
  lopts.tolerance = cfg.local_solver_tol;

  auto solve_bond = [&](std::size_t i, bool center_left) -> double {
    DenseTensor theta =
        contract(psi.tensor(i), psi.tensor(i + 1), {AxisPair{2, 0}});
    std::size_t dim = theta.size();

    linalg::MatVec apply = [&](const Complex* in, Complex* out) {
      DenseTensor vin(theta.shape(),
                      std::vector<Complex>(in, in + dim));
      DenseTensor vout = apply_heff(le[i], mpo[i], mpo[i + 1], re[i + 2], vin);
      std::memcpy(out, vout.data(), dim * sizeof(Complex));
    };
    linalg::LanczosResult res =
        linalg::lanczos_smallest(apply, dim, theta.data(), lopts);

    DenseTensor block(theta.shape(), std::move(res.eigenvector));
    psi.set_two_site_block(block, i, cfg.chi_max, cfg.svd_eps, center_left);
    return res.eigenvalue;
  };

  DMRGResult out;
  double prev = 0.0;
  for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    double energy = 0.0;
    for (std::size_t i = 0; i + 2 < n; ++i) {  // bonds 0 .. n-3, rightward
      energy = solve_bond(i, false);
      le[i + 1] = extend_left(le[i], psi.tensor(i), mpo[i]);
    }
    for (std::size_t i = n - 2; i + 1 > 0; --i) {  // bonds n-2 .. 0, leftward
      energy = solve_bond(i, true);
      re[i + 1] = extend_right(re[i + 2], psi.tensor(i + 1), mpo[i + 1]);
    }
    out.energy_per_sweep.push_back(energy);
    out.sweeps = sweep + 1;
    if (sweep > 0 && std::abs(energy - prev) < cfg.energy_tol) {
      psi.normalize();
      out.psi = std::move(psi);
      out.energy = energy;
      return out;
    }
    prev = energy;
  }
  throw ConvergenceError("dmrg: no convergence after max_sweeps",
                         out.energy_per_sweep);
}

}  // namespace kzqfi::dmrg
