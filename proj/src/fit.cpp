#include "kzqfi/fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kzqfi/errors.hpp"

namespace kzqfi::fit {
namespace {

struct LineFit {
  double intercept;
  double slope;
  double stderr_intercept;
  double stderr_slope;
  double ss_residual;
  std::vector<double> residuals;
};

// Weighted least squares y = b0 + b1 x; unit weights = OLS. Standard errors
// from the usual linear-regression formulas with dof = n - 2 (0 when n = 2).
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& w) {
  const std::size_t n = x.size();
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  double xbar = sx / sw, ybar = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  double scale = 0.0;
  for (double xi : x) scale = std::max(scale, xi * xi);
  if (sxx <= 1e-14 * std::max(scale, 1.0) * sw)
    throw SingularFitError("fit: degenerate abscissae (no spread)");

  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = ybar - f.slope * xbar;
  f.residuals.resize(n);
  f.ss_residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f.residuals[i] = y[i] - (f.intercept + f.slope * x[i]);
    f.ss_residual += w[i] * f.residuals[i] * f.residuals[i];
  }
  double dof = static_cast<double>(n) - 2.0;
  double s2 = dof > 0.0 ? f.ss_residual / dof : 0.0;
  f.stderr_slope = std::sqrt(s2 / sxx);
  f.stderr_intercept = std::sqrt(s2 * (1.0 / sw + xbar * xbar / sxx));
  return f;
}

std::size_t count_distinct(const std::vector<double>& x) {
  std::set<double> s(x.begin(), x.end());
  return s.size();
}

}  // namespace

FiniteSizeFit finite_size_extrapolate(
    const std::vector<std::pair<double, double>>& points) {
  std::vector<double> x, y, w;
  for (auto [n, fq] : points) {
    if (!(n > 0.0))
      throw InvalidInputError("finite_size_extrapolate: N must be positive");
    if (!std::isfinite(fq))
      throw InvalidInputError("finite_size_extrapolate: non-finite f_Q");
    x.push_back(1.0 / n);
    y.push_back(fq);
    w.push_back(1.0);
  }
  if (count_distinct(x) < 3)
    throw InsufficientDataError(
        "finite_size_extrapolate: need at least 3 distinct sizes");
  LineFit f = fit_line(x, y, w);
  FiniteSizeFit out;
  out.f_q_infinity = f.intercept;
  out.a_coeff = -f.slope;
  out.stderr_intercept = f.stderr_intercept;
  out.residual_rms =
      std::sqrt(f.ss_residual / static_cast<double>(points.size()));
  out.points = points;
  out.residuals = std::move(f.residuals);
  return out;
}

PowerLawFit power_law_fit_weighted(
    const std::vector<std::pair<double, double>>& points,
    const std::vector<double>& weights) {
  if (!weights.empty() && weights.size() != points.size())
    throw InvalidArgumentError("power_law_fit: one weight per point");
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [tau, value] = points[i];
    if (!(tau > 0.0) || !(value > 0.0) || !std::isfinite(value))
      throw InvalidInputError("power_law_fit: points must be positive");
    x.push_back(std::log(tau));
    y.push_back(std::log(value));
    if (!weights.empty()) {
      if (!(weights[i] > 0.0))
        throw InvalidArgumentError("power_law_fit: weights must be positive");
      w.push_back(weights[i]);
    } else {
      w.push_back(1.0);
    }
  }
  if (count_distinct(x) < 4)
    throw InsufficientDataError("power_law_fit: need at least 4 distinct rates");
  LineFit f = fit_line(x, y, w);

  PowerLawFit out;
  out.exponent = f.slope;
  out.stderr_exponent = f.stderr_slope;
  out.log_prefactor = f.intercept;
  out.points = points;
  out.residuals = f.residuals;

  double ybar = 0.0;
  for (double yi : y) ybar += yi;
  ybar /= static_cast<double>(y.size());
  double ss_total = 0.0;
  for (double yi : y) ss_total += (yi - ybar) * (yi - ybar);
  out.r_squared = ss_total > 1e-30 ? 1.0 - f.ss_residual / ss_total : 1.0;
  out.r_squared = std::clamp(out.r_squared, 0.0, 1.0);
  return out;
}

PowerLawFit power_law_fit(const std::vector<std::pair<double, double>>& points) {
  return power_law_fit_weighted(points, {});
}

KZPrediction kz_predict(int d, double nu, double z, double alpha) {
  if (d <= 0 || !(nu > 0.0) || !(z > 0.0) || !(alpha > 0.0))
    throw InvalidArgumentError("kz_predict: all arguments must be positive");
  KZPrediction p;
  p.d = d;
  p.nu = nu;
  p.z = z;
  p.alpha = alpha;
  p.nu_lambda = alpha * nu;
  p.z_lambda = z;
  p.defect_exponent =
      -static_cast<double>(d) * p.nu_lambda / (p.z_lambda * p.nu_lambda + 1.0);
  p.qfi_exponent = -p.defect_exponent;
  p.freezeout_time_exponent = z * nu / (z * nu + 1.0);
  p.gap_exponent = -p.freezeout_time_exponent;
  return p;
}

}  // namespace kzqfi::fit
