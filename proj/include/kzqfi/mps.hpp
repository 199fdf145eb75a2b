#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kzqfi/linalg.hpp"

namespace kzqfi::mps {

using linalg::Complex;
using linalg::DenseTensor;

/// Open-boundary matrix product state. Site tensors have shape
/// (left bond, physical = 2, right bond); boundary bonds have dimension 1.
/// The canonical center (when set) carries the norm: tensors left of it are
/// left-isometries, tensors right of it right-isometries.
class MPSState {
 public:
  static constexpr std::ptrdiff_t kNoCenter = -1;

  /// Bond dimension 1 state |local>^N. local must be normalized to 1e-12.
  static MPSState product_state(std::size_t n_sites,
                                std::array<Complex, 2> local);

  /// Bond dimension 2 representation of (|up...up> + |down...down>)/sqrt(2).
  static MPSState ghz_state(std::size_t n_sites);

  /// Seeded random state with bond dimension min(chi, maximal), normalized
  /// and canonicalized at site 0.
  static MPSState random_state(std::size_t n_sites, std::size_t chi,
                               std::uint64_t seed);

  std::size_t n_sites() const { return tensors_.size(); }
  const DenseTensor& tensor(std::size_t site) const;
  std::ptrdiff_t center() const { return center_; }
  double cumulative_truncation_error() const { return cum_trunc_; }

  /// Sum over gate applications of log(pre-truncation block norm). Zero for
  /// exact unitary arithmetic; the evolution engine differences this to
  /// monitor per-step norm drift that renormalization would otherwise hide.
  double cumulative_renorm_log() const { return renorm_log_; }

  /// Bond dimension left of `site` (site in [0, N]; boundaries are 1).
  std::size_t bond_dim(std::size_t bond) const;
  std::size_t max_bond_dim() const;

  double norm() const;
  void normalize();

  /// Establishes mixed-canonical form with the center at `site` via QR
  /// sweeps from both ends. Exact (no truncation).
  void canonicalize(std::size_t site);

  /// Moves an existing center one bond at a time; canonicalizes first if no
  /// center is set.
  void move_center_to(std::size_t site);

  /// <psi| op_site |psi> for a Hermitian 2x2 op. The imaginary residual must
  /// stay below 1e-10.
  double expectation_one_site(const DenseTensor& op, std::size_t site) const;

  /// <psi| opA_m opB_n |psi>; for m == n the operator product acts on one
  /// site. Evaluated by a transfer-matrix sweep between the two sites.
  double correlation_two_site(const DenseTensor& op_a, const DenseTensor& op_b,
                              std::size_t m, std::size_t n) const;

  /// Applies a 4x4 unitary to sites (bond, bond+1), re-truncates the bond
  /// with svd_truncated(chi_max, eps), renormalizes, and accumulates the
  /// discarded weight. Returns the discarded weight of this application.
  double apply_two_site_gate(const DenseTensor& gate, std::size_t bond,
                             std::size_t chi_max, double eps);

  /// Replaces sites (bond, bond+1) from a two-site block of shape
  /// (left, 2, 2, right) via truncated SVD; the center ends on `bond` if
  /// center_left, else bond+1. Used by DMRG updates. Returns discarded weight.
  double set_two_site_block(const DenseTensor& block, std::size_t bond,
                            std::size_t chi_max, double eps, bool center_left);

  DenseTensor& mutable_tensor(std::size_t site);
  void add_truncation_error(double w) { cum_trunc_ += w; }

  /// Max deviation from the isometry conditions implied by the current
  /// center. Returns 0 for states without a center.
  double isometry_residual() const;

  /// Full state vector, site 0 as the most significant bit. Guarded to
  /// n_sites <= 24.
  std::vector<Complex> to_statevector() const;

  /// Checks bond consistency and boundary bonds; throws on violation.
  void validate_structure() const;

  /// Empty placeholder (no sites); only assignment makes it usable. Exists so
  /// result structs can be default-constructed.
  MPSState() = default;

 private:
  std::vector<DenseTensor> tensors_;
  std::ptrdiff_t center_ = kNoCenter;
  double cum_trunc_ = 0.0;
  double renorm_log_ = 0.0;

  void move_center_right();
  void move_center_left();

  friend MPSState load_checkpoint(const std::string& path);
};

/// Bit-exact binary checkpoint of an MPS (shape headers + raw complex data).
void save_checkpoint(const MPSState& psi, const std::string& path);
MPSState load_checkpoint(const std::string& path);

}  // namespace kzqfi::mps
