#include "kzqfi/observables.hpp"

#include <cmath>

#include "kzqfi/errors.hpp"
#include "kzqfi/linalg.hpp"

namespace kzqfi::observables {
namespace {

using linalg::AxisPair;
using linalg::Complex;
using linalg::contract;
using linalg::DenseTensor;

DenseTensor step_left(const DenseTensor& env, const DenseTensor& a,
                      const DenseTensor* op) {
  DenseTensor t = contract(env, a, {AxisPair{0, 0}});  // (bl, s, kr)
  if (op != nullptr) {
    t = contract(*op, t, {AxisPair{1, 1}});
    t = t.transposed({1, 0, 2});
  }
  return contract(t, a.conjugated(), {AxisPair{0, 0}, AxisPair{1, 1}});
}

DenseTensor step_right(const DenseTensor& env, const DenseTensor& a) {
  DenseTensor t = contract(a, env, {AxisPair{2, 0}});  // (kl, s, br)
  return contract(t, a.conjugated(), {AxisPair{1, 1}, AxisPair{2, 2}});
}

Complex close(const DenseTensor& left, const DenseTensor& right) {
  return contract(left, right, {AxisPair{0, 0}, AxisPair{1, 1}}).data()[0];
}

double checked_real(Complex v, const char* what) {
  if (std::abs(v.imag()) > 1e-10)
    throw NumericalError(std::string(what) + ": imaginary residual above 1e-10");
  return v.real();
}

}  // namespace

CorrelationTable measure_zz_table(const mps::MPSState& psi) {
  const std::size_t n = psi.n_sites();
  const DenseTensor sz = linalg::pauli_z();

  std::vector<DenseTensor> left(n + 1, DenseTensor::identity(1));
  for (std::size_t i = 0; i < n; ++i)
    left[i + 1] = step_left(left[i], psi.tensor(i), nullptr);
  std::vector<DenseTensor> right(n + 1, DenseTensor::identity(1));
  for (std::size_t i = n; i-- > 0;)
    right[i] = step_right(right[i + 1], psi.tensor(i));

  double norm2 = left[n].data()[0].real();
  if (!(norm2 > 1e-300))
    throw NumericalError("measure_zz_table: zero-norm state");

  CorrelationTable table;
  table.n_sites = n;
  table.z.resize(n);
  table.zz.assign(n * n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    DenseTensor anchored = step_left(left[m], psi.tensor(m), &sz);
    table.z[m] = checked_real(close(anchored, right[m + 1]) / norm2,
                              "measure_zz_table <sz>");
    table.zz[m * n + m] = 1.0;  // (sz)^2 = identity
    for (std::size_t k = m + 1; k < n; ++k) {
      DenseTensor both = step_left(anchored, psi.tensor(k), &sz);
      double v = checked_real(close(both, right[k + 1]) / norm2,
                              "measure_zz_table <sz sz>");
      table.zz[m * n + k] = v;
      table.zz[k * n + m] = v;
      if (k + 1 < n) anchored = step_left(anchored, psi.tensor(k), nullptr);
    }
  }
  return table;
}

QFIResult qfi_density_full(const CorrelationTable& table) {
  const std::size_t n = table.n_sites;
  if (n == 0) throw InvalidArgumentError("qfi_density: empty table");
  QFIResult r;
  for (double z : table.z) r.mean_o += z;
  for (double c : table.zz) r.mean_sq += c;
  r.f_q = (r.mean_sq - r.mean_o * r.mean_o) / static_cast<double>(n);
  return r;
}

double qfi_density(const mps::MPSState& psi) {
  return qfi_density_full(measure_zz_table(psi)).f_q;
}

double qfi_density_factor4(const mps::MPSState& psi) {
  return 4.0 * qfi_density(psi);
}

std::vector<std::pair<std::size_t, double>> correlation_profile(
    const CorrelationTable& table) {
  const std::size_t n = table.n_sites;
  if (n < 4) throw InvalidArgumentError("correlation_profile: need N >= 4");
  std::size_t anchor = n / 2 - 1;  // chain center, 1-based N/2
  std::vector<std::pair<std::size_t, double>> profile;
  profile.reserve(n / 2 - 1);
  for (std::size_t r = 1; r + 1 <= n / 2; ++r)
    profile.emplace_back(r, table.zz_at(anchor, anchor + r));
  return profile;
}

std::vector<std::pair<std::size_t, double>> correlation_profile(
    const mps::MPSState& psi) {
  return correlation_profile(measure_zz_table(psi));
}

double defect_density(const CorrelationTable& table) {
  const std::size_t n = table.n_sites;
  if (n < 2) throw InvalidArgumentError("defect_density: need N >= 2");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    sum += 0.5 * (1.0 - table.zz_at(i, i + 1));
  return sum / static_cast<double>(n - 1);
}

double defect_density(const mps::MPSState& psi) {
  return defect_density(measure_zz_table(psi));
}

int entangled_particle_witness(double f_q) {
  if (f_q < 0.0 || !std::isfinite(f_q))
    throw InvalidArgumentError("entangled_particle_witness: f_Q must be >= 0");
  double fl = std::floor(f_q);
  if (f_q == fl) return static_cast<int>(fl);
  return static_cast<int>(fl) + 1;
}

ObservableRecord measure_observables(const mps::MPSState& psi) {
  CorrelationTable table = measure_zz_table(psi);
  ObservableRecord rec;
  rec.n_sites = table.n_sites;
  rec.f_q = qfi_density_full(table).f_q;
  rec.n_d = defect_density(table);
  for (double z : table.z) rec.mean_sz = std::max(rec.mean_sz, std::abs(z));
  if (table.n_sites >= 4) rec.c_z = correlation_profile(table);
  rec.cum_trunc = psi.cumulative_truncation_error();
  return rec;
}

}  // namespace kzqfi::observables
