#include "infoflow/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "infoflow/errors.hpp"

namespace infoflow {

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double log_norm_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * kPi * variance) - 0.5 * d * d / variance;
}

double log_sum_exp(std::span<const double> log_values) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : log_values) m = std::max(m, v);
  if (!std::isfinite(m)) return m;  // all -inf (or empty)
  double s = 0.0;
  for (double v : log_values) {
    if (std::isfinite(v)) s += std::exp(v - m);
  }
  return m + std::log(s);
}

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = sample_mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(n - 1);
}

double standard_error(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

double sample_skewness(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  const double m = sample_mean(xs);
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  // Below this spread the sample is constant up to accumulated roundoff and
  // the ratio m3 / m2^(3/2) is pure noise.
  const double sd_floor = 1e-8 * (1.0 + std::abs(m));
  if (m2 <= sd_floor * sd_floor) return std::numeric_limits<double>::quiet_NaN();
  return m3 / std::pow(m2, 1.5);
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    throw QuadratureFailure("adaptive_simpson: depth limit reached before the tolerance was met");
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  if (a > b) throw BadInterval("adaptive_simpson: a > b");
  const double fa = f(a);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson(fa, fm, fb, b - a);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace infoflow
