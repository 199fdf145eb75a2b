#include "kzqfi/mps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>

#include "kzqfi/errors.hpp"
#include "eigen_util.hpp"

namespace kzqfi::mps {
namespace {

using linalg::AxisPair;
using linalg::contract;
using linalg::DenseTensor;
using linalg::EMatrix;
using linalg::from_eigen;
using linalg::map_matrix;

std::size_t max_reachable_bond(std::size_t n_sites, std::size_t bond) {
  // min(2^bond, 2^(N-bond)) without overflow.
  std::size_t lexp = std::min<std::size_t>(bond, 62);
  std::size_t rexp = std::min<std::size_t>(n_sites - bond, 62);
  return std::size_t{1} << std::min(lexp, rexp);
}

void check_op_2x2(const DenseTensor& op, const char* what) {
  if (op.rank() != 2 || op.dim(0) != 2 || op.dim(1) != 2)
    throw InvalidArgumentError(std::string(what) + ": operator must be 2x2");
  if (!op.all_finite())
    throw InvalidArgumentError(std::string(what) + ": operator has non-finite entries");
}

void check_hermitian_2x2(const DenseTensor& op, const char* what) {
  const Complex* d = op.data();
  double dev = std::max({std::abs(d[0] - std::conj(d[0])),
                         std::abs(d[1] - std::conj(d[2])),
                         std::abs(d[3] - std::conj(d[3]))});
  if (dev > 1e-12)
    throw InvalidArgumentError(std::string(what) + ": operator must be Hermitian");
}

// QR-split tensor i, absorbing the R factor into site i+1.
void push_right(std::vector<DenseTensor>& ts, std::size_t i) {
  const DenseTensor& a = ts[i];
  std::size_t l = a.dim(0), r = a.dim(2);
  EMatrix m = map_matrix(a, l * 2, r);
  std::size_t k = std::min(l * 2, r);
  Eigen::HouseholderQR<EMatrix> qr(m);
  EMatrix q = qr.householderQ() * EMatrix::Identity(static_cast<Eigen::Index>(l * 2),
                                                    static_cast<Eigen::Index>(k));
  EMatrix rr = qr.matrixQR()
                   .topRows(static_cast<Eigen::Index>(k))
                   .triangularView<Eigen::Upper>();
  DenseTensor rt = from_eigen(rr, {k, r});
  ts[i] = from_eigen(q, {l, 2, k});
  ts[i + 1] = contract(rt, ts[i + 1], {AxisPair{1, 0}});
}

// LQ-split tensor i, absorbing the L factor into site i-1.
void push_left(std::vector<DenseTensor>& ts, std::size_t i) {
  const DenseTensor& a = ts[i];
  std::size_t l = a.dim(0), r = a.dim(2);
  EMatrix m = map_matrix(a, l, 2 * r);
  std::size_t k = std::min(l, 2 * r);
  EMatrix mh = m.adjoint();
  Eigen::HouseholderQR<EMatrix> qr(mh);
  EMatrix qt = qr.householderQ() * EMatrix::Identity(static_cast<Eigen::Index>(2 * r),
                                                     static_cast<Eigen::Index>(k));
  EMatrix rt = qr.matrixQR()
                   .topRows(static_cast<Eigen::Index>(k))
                   .triangularView<Eigen::Upper>();
  EMatrix lfac = rt.adjoint();   // l x k
  EMatrix qfac = qt.adjoint();   // k x 2r
  ts[i] = from_eigen(qfac, {k, 2, r});
  DenseTensor lt = from_eigen(lfac, {l, k});
  ts[i - 1] = contract(ts[i - 1], lt, {AxisPair{2, 0}});
}

// One transfer step: E'(kr,br) from E(kl,bl), optionally sandwiching op.
DenseTensor apply_transfer(const DenseTensor& env, const DenseTensor& a,
                           const DenseTensor* op) {
  DenseTensor t = contract(env, a, {AxisPair{0, 0}});  // (bl, s, kr)
  if (op != nullptr) {
    t = contract(*op, t, {AxisPair{1, 1}});            // (s', bl, kr)
    t = t.transposed({1, 0, 2});                       // (bl, s', kr)
  }
  return contract(t, a.conjugated(), {AxisPair{0, 0}, AxisPair{1, 1}});
}

}  // namespace

MPSState MPSState::product_state(std::size_t n_sites, std::array<Complex, 2> local) {
  if (n_sites == 0) throw InvalidArgumentError("product_state: n_sites must be >= 1");
  double nrm = std::sqrt(std::norm(local[0]) + std::norm(local[1]));
  if (std::abs(nrm - 1.0) > 1e-12)
    throw InvalidArgumentError("product_state: local state must be normalized");
  MPSState psi;
  psi.tensors_.reserve(n_sites);
  for (std::size_t i = 0; i < n_sites; ++i) {
    DenseTensor a({1, 2, 1});
    a.data()[0] = local[0];
    a.data()[1] = local[1];
    psi.tensors_.push_back(std::move(a));
  }
  psi.center_ = 0;
  return psi;
}

MPSState MPSState::ghz_state(std::size_t n_sites) {
  if (n_sites < 2) throw InvalidArgumentError("ghz_state: n_sites must be >= 2");
  MPSState psi;
  psi.tensors_.reserve(n_sites);
  const double c = 1.0 / std::sqrt(2.0);
  DenseTensor first({1, 2, 2});
  first({0, 0, 0}) = c;
  first({0, 1, 1}) = c;
  psi.tensors_.push_back(std::move(first));
  for (std::size_t i = 1; i + 1 < n_sites; ++i) {
    DenseTensor mid({2, 2, 2});
    mid({0, 0, 0}) = 1.0;
    mid({1, 1, 1}) = 1.0;
    psi.tensors_.push_back(std::move(mid));
  }
  DenseTensor last({2, 2, 1});
  last({0, 0, 0}) = 1.0;
  last({1, 1, 0}) = 1.0;
  psi.tensors_.push_back(std::move(last));
  psi.canonicalize(0);
  psi.normalize();
  return psi;
}

MPSState MPSState::random_state(std::size_t n_sites, std::size_t chi,
                                std::uint64_t seed) {
  if (n_sites == 0) throw InvalidArgumentError("random_state: n_sites must be >= 1");
  if (chi == 0) throw InvalidArgumentError("random_state: chi must be >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  MPSState psi;
  psi.tensors_.reserve(n_sites);
  for (std::size_t i = 0; i < n_sites; ++i) {
    std::size_t l = std::min(chi, max_reachable_bond(n_sites, i));
    std::size_t r = std::min(chi, max_reachable_bond(n_sites, i + 1));
    DenseTensor a({l, 2, r});
    for (std::size_t idx = 0; idx < a.size(); ++idx)
      a.data()[idx] = Complex(nd(gen), nd(gen));
    psi.tensors_.push_back(std::move(a));
  }
  psi.canonicalize(0);
  psi.normalize();
  return psi;
}

const DenseTensor& MPSState::tensor(std::size_t site) const {
  if (site >= tensors_.size()) throw InvalidArgumentError("tensor: site out of range");
  return tensors_[site];
}

DenseTensor& MPSState::mutable_tensor(std::size_t site) {
  if (site >= tensors_.size())
    throw InvalidArgumentError("mutable_tensor: site out of range");
  return tensors_[site];
}

std::size_t MPSState::bond_dim(std::size_t bond) const {
  if (bond > tensors_.size()) throw InvalidArgumentError("bond_dim: bond out of range");
  if (bond == 0) return tensors_.front().dim(0);
  return tensors_[bond - 1].dim(2);
}

std::size_t MPSState::max_bond_dim() const {
  std::size_t m = 1;
  for (const auto& t : tensors_) m = std::max(m, t.dim(2));
  return m;
}

double MPSState::norm() const {
  if (center_ != kNoCenter)
    return tensors_[static_cast<std::size_t>(center_)].frobenius_norm();
  DenseTensor env = DenseTensor::identity(1);
  for (const auto& t : tensors_) env = apply_transfer(env, t, nullptr);
  double n2 = env.data()[0].real();
  return std::sqrt(std::max(0.0, n2));
}

void MPSState::normalize() {
  if (center_ == kNoCenter) canonicalize(0);
  DenseTensor& c = tensors_[static_cast<std::size_t>(center_)];
  double n = c.frobenius_norm();
  if (n < 1e-300) throw NumericalError("normalize: state has zero norm");
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] /= n;
}

void MPSState::canonicalize(std::size_t site) {
  if (site >= tensors_.size())
    throw InvalidArgumentError("canonicalize: site out of range");
  for (std::size_t i = 0; i < site; ++i) push_right(tensors_, i);
  for (std::size_t i = tensors_.size() - 1; i > site; --i) push_left(tensors_, i);
  center_ = static_cast<std::ptrdiff_t>(site);
}

void MPSState::move_center_right() {
  push_right(tensors_, static_cast<std::size_t>(center_));
  ++center_;
}

void MPSState::move_center_left() {
  push_left(tensors_, static_cast<std::size_t>(center_));
  --center_;
}

void MPSState::move_center_to(std::size_t site) {
  if (site >= tensors_.size())
    throw InvalidArgumentError("move_center_to: site out of range");
  if (center_ == kNoCenter) {
    canonicalize(site);
    return;
  }
  while (center_ < static_cast<std::ptrdiff_t>(site)) move_center_right();
  while (center_ > static_cast<std::ptrdiff_t>(site)) move_center_left();
}

double MPSState::expectation_one_site(const DenseTensor& op, std::size_t site) const {
  check_op_2x2(op, "expectation_one_site");
  check_hermitian_2x2(op, "expectation_one_site");
  if (site >= tensors_.size())
    throw InvalidArgumentError("expectation_one_site: site out of range");
  DenseTensor env = DenseTensor::identity(1);
  for (std::size_t i = 0; i < tensors_.size(); ++i)
    env = apply_transfer(env, tensors_[i], i == site ? &op : nullptr);
  Complex raw = env.data()[0];

  DenseTensor nenv = DenseTensor::identity(1);
  for (const auto& t : tensors_) nenv = apply_transfer(nenv, t, nullptr);
  double n2 = nenv.data()[0].real();
  if (n2 < 1e-300) throw NumericalError("expectation_one_site: zero-norm state");
  Complex val = raw / n2;
  if (std::abs(val.imag()) > 1e-10)
    throw NumericalError("expectation_one_site: imaginary residual above 1e-10");
  return val.real();
}

double MPSState::correlation_two_site(const DenseTensor& op_a,
                                      const DenseTensor& op_b, std::size_t m,
                                      std::size_t n) const {
  check_op_2x2(op_a, "correlation_two_site");
  check_op_2x2(op_b, "correlation_two_site");
  if (m >= tensors_.size() || n >= tensors_.size())
    throw InvalidArgumentError("correlation_two_site: site out of range");

  DenseTensor first = op_a;
  DenseTensor second = op_b;
  std::size_t lo = m, hi = n;
  if (m > n) {
    std::swap(lo, hi);
    std::swap(first, second);
  }
  DenseTensor merged({2, 2});
  if (lo == hi) {
    merged = contract(first, second, {AxisPair{1, 0}});
    check_hermitian_2x2(merged, "correlation_two_site (operator product)");
  } else {
    check_hermitian_2x2(first, "correlation_two_site");
    check_hermitian_2x2(second, "correlation_two_site");
  }

  DenseTensor env = DenseTensor::identity(1);
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const DenseTensor* op = nullptr;
    if (lo == hi) {
      if (i == lo) op = &merged;
    } else if (i == lo) {
      op = &first;
    } else if (i == hi) {
      op = &second;
    }
    env = apply_transfer(env, tensors_[i], op);
  }
  Complex raw = env.data()[0];

  DenseTensor nenv = DenseTensor::identity(1);
  for (const auto& t : tensors_) nenv = apply_transfer(nenv, t, nullptr);
  double n2 = nenv.data()[0].real();
  if (n2 < 1e-300) throw NumericalError("correlation_two_site: zero-norm state");
  Complex val = raw / n2;
  if (std::abs(val.imag()) > 1e-10)
    throw NumericalError("correlation_two_site: imaginary residual above 1e-10");
  return val.real();
}

double MPSState::set_two_site_block(const DenseTensor& block, std::size_t bond,
                                    std::size_t chi_max, double eps,
                                    bool center_left) {
  if (bond + 1 >= tensors_.size())
    throw InvalidArgumentError("set_two_site_block: bond out of range");
  if (center_ != static_cast<std::ptrdiff_t>(bond) &&
      center_ != static_cast<std::ptrdiff_t>(bond + 1))
    throw InvalidArgumentError("set_two_site_block: center must sit on the target bond");
  std::size_t l = tensors_[bond].dim(0);
  std::size_t r = tensors_[bond + 1].dim(2);
  if (block.rank() != 4 || block.dim(0) != l || block.dim(1) != 2 ||
      block.dim(2) != 2 || block.dim(3) != r)
    throw InvalidArgumentError("set_two_site_block: block shape mismatch");

  DenseTensor m = block.reshaped({l * 2, 2 * r});
  linalg::SVDResult svd = linalg::svd_truncated(m, chi_max, eps);
  std::size_t chi = svd.S.size();
  double s2 = 0.0;
  for (double s : svd.S) s2 += s * s;
  if (s2 < 1e-300)
    throw NumericalError("set_two_site_block: block truncated to zero norm");
  double inv = 1.0 / std::sqrt(s2);

  if (center_left) {
    // A = U diag(S), B = Vh.
    DenseTensor a({l * 2, chi});
    for (std::size_t i = 0; i < l * 2; ++i)
      for (std::size_t j = 0; j < chi; ++j)
        a.data()[i * chi + j] = svd.U.data()[i * chi + j] * (svd.S[j] * inv);
    tensors_[bond] = a.reshaped({l, 2, chi});
    tensors_[bond + 1] = svd.Vh.reshaped({chi, 2, r});
    center_ = static_cast<std::ptrdiff_t>(bond);
  } else {
    // A = U, B = diag(S) Vh.
    tensors_[bond] = svd.U.reshaped({l, 2, chi});
    DenseTensor b({chi, 2 * r});
    for (std::size_t i = 0; i < chi; ++i)
      for (std::size_t j = 0; j < 2 * r; ++j)
        b.data()[i * 2 * r + j] = svd.Vh.data()[i * 2 * r + j] * (svd.S[i] * inv);
    tensors_[bond + 1] = b.reshaped({chi, 2, r});
    center_ = static_cast<std::ptrdiff_t>(bond + 1);
  }
  cum_trunc_ += svd.discarded_weight;
  renorm_log_ += 0.5 * std::log(s2 / (1.0 - svd.discarded_weight));
  return svd.discarded_weight;
}

double MPSState::apply_two_site_gate(const DenseTensor& gate, std::size_t bond,
                                     std::size_t chi_max, double eps) {
  if (gate.rank() != 2 || gate.dim(0) != 4 || gate.dim(1) != 4)
    throw InvalidArgumentError("apply_two_site_gate: gate must be 4x4");
  if (!gate.all_finite())
    throw InvalidArgumentError("apply_two_site_gate: gate has non-finite entries");
  if (bond + 1 >= tensors_.size())
    throw InvalidArgumentError("apply_two_site_gate: bond out of range");
  {
    DenseTensor gram = contract(gate.conjugated(), gate, {AxisPair{0, 0}});
    double dev = 0.0;
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t q = 0; q < 4; ++q)
        dev = std::max(dev, std::abs(gram.data()[p * 4 + q] -
                                     (p == q ? Complex(1.0) : Complex(0.0))));
    if (dev > 1e-10)
      throw InvalidInputError("apply_two_site_gate: gate is not unitary");
  }

  if (center_ == kNoCenter) {
    canonicalize(bond);
  } else if (center_ < static_cast<std::ptrdiff_t>(bond)) {
    move_center_to(bond);
  } else if (center_ > static_cast<std::ptrdiff_t>(bond + 1)) {
    move_center_to(bond + 1);
  }
  // Keep the center where the sweep is heading: a gate reached from the right
  // leaves the center on its left site, and vice versa.
  bool center_left = center_ == static_cast<std::ptrdiff_t>(bond + 1);

  DenseTensor theta =
      contract(tensors_[bond], tensors_[bond + 1], {AxisPair{2, 0}});  // (l,s,t,r)
  DenseTensor g4 = gate.reshaped({2, 2, 2, 2});
  DenseTensor out =
      contract(g4, theta, {AxisPair{2, 1}, AxisPair{3, 2}});  // (s',t',l,r)
  out = out.transposed({2, 0, 1, 3});                         // (l,s',t',r)
  return set_two_site_block(out, bond, chi_max, eps, center_left);
}

double MPSState::isometry_residual() const {
  if (center_ == kNoCenter) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == center_) continue;
    const DenseTensor& a = tensors_[i];
    DenseTensor g = static_cast<std::ptrdiff_t>(i) < center_
                        ? contract(a.conjugated(), a, {AxisPair{0, 0}, AxisPair{1, 1}})
                        : contract(a, a.conjugated(), {AxisPair{1, 1}, AxisPair{2, 2}});
    std::size_t d = g.dim(0);
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = 0; q < d; ++q) {
        Complex want = p == q ? Complex(1.0) : Complex(0.0);
        worst = std::max(worst, std::abs(g.data()[p * d + q] - want));
      }
  }
  return worst;
}

std::vector<Complex> MPSState::to_statevector() const {
  std::size_t n = tensors_.size();
  if (n > 24) throw CapacityError("to_statevector: refusing more than 24 sites");
  DenseTensor acc = DenseTensor::identity(1);  // (prefix, bond)
  for (const auto& t : tensors_) {
    acc = contract(acc, t, {AxisPair{1, 0}});  // (prefix, s, r)
    acc = acc.reshaped({acc.dim(0) * 2, acc.dim(2)});
  }
  std::vector<Complex> v(acc.size());
  std::memcpy(v.data(), acc.data(), acc.size() * sizeof(Complex));
  return v;
}

void MPSState::validate_structure() const {
  if (tensors_.empty()) throw InvalidInputError("mps: no site tensors");
  if (tensors_.front().dim(0) != 1 || tensors_.back().dim(2) != 1)
    throw InvalidInputError("mps: boundary bonds must have dimension 1");
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const DenseTensor& t = tensors_[i];
    if (t.rank() != 3 || t.dim(1) != 2)
      throw InvalidInputError("mps: site tensors must have shape (l, 2, r)");
    if (i + 1 < tensors_.size() && t.dim(2) != tensors_[i + 1].dim(0))
      throw InvalidInputError("mps: adjacent bond dimensions disagree");
    if (!t.all_finite()) throw InvalidInputError("mps: non-finite tensor data");
  }
  if (center_ != kNoCenter &&
      (center_ < 0 || center_ >= static_cast<std::ptrdiff_t>(tensors_.size())))
    throw InvalidInputError("mps: center out of range");
}

namespace {

constexpr char kMagic[8] = {'K', 'Z', 'M', 'P', 'S', '1', '\0', '\0'};

void write_u64(std::FILE* f, std::uint64_t v) {
  if (std::fwrite(&v, sizeof(v), 1, f) != 1)
    throw InvalidInputError("checkpoint: write failed");
}

std::uint64_t read_u64(std::FILE* f) {
  std::uint64_t v = 0;
  if (std::fread(&v, sizeof(v), 1, f) != 1)
    throw InvalidInputError("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const MPSState& psi, const std::string& path) {
  psi.validate_structure();
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw InvalidInputError("checkpoint: cannot open " + path);
  try {
    if (std::fwrite(kMagic, 1, 8, f) != 8)
      throw InvalidInputError("checkpoint: write failed");
    write_u64(f, psi.n_sites());
    write_u64(f, static_cast<std::uint64_t>(psi.center() + 1));  // 0 = no center
    double ct = psi.cumulative_truncation_error();
    if (std::fwrite(&ct, sizeof(ct), 1, f) != 1)
      throw InvalidInputError("checkpoint: write failed");
    for (std::size_t i = 0; i < psi.n_sites(); ++i) {
      const DenseTensor& t = psi.tensor(i);
      write_u64(f, t.dim(0));
      write_u64(f, t.dim(2));
      if (std::fwrite(t.data(), sizeof(Complex), t.size(), f) != t.size())
        throw InvalidInputError("checkpoint: write failed");
    }
  } catch (...) {
    std::fclose(f);
    throw;
  }
  if (std::fclose(f) != 0) throw InvalidInputError("checkpoint: close failed");
}

MPSState load_checkpoint(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (f == nullptr) throw InvalidInputError("checkpoint: cannot open " + path);
  MPSState psi;
  try {
    char magic[8];
    if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, kMagic, 8) != 0)
      throw InvalidInputError("checkpoint: bad magic in " + path);
    std::uint64_t n = read_u64(f);
    if (n == 0 || n > 1'000'000) throw InvalidInputError("checkpoint: bad site count");
    std::uint64_t center_raw = read_u64(f);
    if (center_raw > n) throw InvalidInputError("checkpoint: bad center");
    double ct = 0.0;
    if (std::fread(&ct, sizeof(ct), 1, f) != 1)
      throw InvalidInputError("checkpoint: truncated file");
    psi.tensors_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint64_t l = read_u64(f);
      std::uint64_t r = read_u64(f);
      if (l == 0 || r == 0 || l > (1u << 20) || r > (1u << 20))
        throw InvalidInputError("checkpoint: bad bond dimension");
      DenseTensor t({l, 2, r});
      if (std::fread(t.data(), sizeof(Complex), t.size(), f) != t.size())
        throw InvalidInputError("checkpoint: truncated file");
      psi.tensors_.push_back(std::move(t));
    }
    psi.center_ = static_cast<std::ptrdiff_t>(center_raw) - 1;
    psi.cum_trunc_ = ct;
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
  psi.validate_structure();
  return psi;
}

}  // namespace kzqfi::mps
