#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace infoflow {

inline constexpr double kPi = 3.14159265358979323846;

/// Result of a Monte Carlo estimator: point value plus standard error.
struct MonteCarloEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::size_t n_samples = 0;
};

double norm_pdf(double x);

/// Standard normal CDF, computed through erfc for tail accuracy.
double norm_cdf(double x);

/// log of the N(mean, variance) density at x.
double log_norm_pdf(double x, double mean, double variance);

/// log(sum_i exp(v_i)) with the usual max-shift; -inf entries contribute 0.
double log_sum_exp(std::span<const double> log_values);

double sample_mean(std::span<const double> xs);

/// Unbiased sample variance (n-1 divisor); 0 for fewer than two samples.
double sample_variance(std::span<const double> xs);

/// Standard error of the mean: sqrt(sample_variance / n).
double standard_error(std::span<const double> xs);

/// Sample skewness m3 / m2^(3/2) with central moments m_k = mean((x-xbar)^k).
/// Returns NaN when the sample standard deviation is below
/// 1e-8 (1 + |mean|), i.e. constant up to roundoff.
double sample_skewness(std::span<const double> xs);

/// Adaptive Simpson integration to an absolute tolerance.
/// Throws QuadratureFailure if the depth limit is reached before the local
/// error estimate meets the (subdivided) tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 48);

}  // namespace infoflow
