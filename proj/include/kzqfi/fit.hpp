#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace kzqfi::fit {

/// f_Q(N) = f_Q^inf - A/N by ordinary least squares on x = 1/N.
struct FiniteSizeFit {
  double f_q_infinity = 0.0;
  double a_coeff = 0.0;
  double stderr_intercept = 0.0;
  double residual_rms = 0.0;
  std::vector<std::pair<double, double>> points;  // (N, f_Q)
  std::vector<double> residuals;
};

FiniteSizeFit finite_size_extrapolate(
    const std::vector<std::pair<double, double>>& points);

/// value = C * tau_Q^exponent by least squares on (log tau_Q, log value).
struct PowerLawFit {
  double exponent = 0.0;
  double stderr_exponent = 0.0;
  double log_prefactor = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (tau_Q, value)
  std::vector<double> residuals;                  // in log space
};

PowerLawFit power_law_fit(const std::vector<std::pair<double, double>>& points);

/// Inverse-variance weighted variant; weights must be positive, one per point.
PowerLawFit power_law_fit_weighted(
    const std::vector<std::pair<double, double>>& points,
    const std::vector<double>& weights);

/// Kibble-Zurek exponents for a power-alpha schedule in d dimensions with
/// equilibrium exponents (nu, z); alpha enters through nu_lambda = alpha nu.
struct KZPrediction {
  int d = 1;
  double nu = 1.0;
  double z = 1.0;
  double alpha = 1.0;
  double nu_lambda = 1.0;
  double z_lambda = 1.0;
  double defect_exponent = -0.5;
  double qfi_exponent = 0.5;
  double freezeout_time_exponent = 0.5;
  double gap_exponent = -0.5;
};

KZPrediction kz_predict(int d, double nu, double z, double alpha);

}  // namespace kzqfi::fit
