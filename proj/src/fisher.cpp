#include "infoflow/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "infoflow/csv.hpp"
#include "infoflow/errors.hpp"
#include "infoflow/parallel.hpp"
#include "infoflow/paths.hpp"
#include "infoflow/rng.hpp"

namespace infoflow {

namespace {

void require_constant_sigma(const MarketModel& model) {
  if (model.n_flow() != 1) {
    throw InvalidModel("fisher: a single-flow-value model is required");
  }
}

void check_time(const MarketModel& model, double t) {
  if (t < 0.0) throw BadInterval("fisher: t < 0");
  if (t >= model.horizon) {
    throw TimeAtOrPastHorizon("fisher: t must be strictly before the horizon");
  }
}

/// Unnormalized posterior weights of the constant-rate model at parameter
/// sigma, scaled by exp(-max exponent) so the largest weight is p_max.
std::vector<double> scaled_weights(const MarketModel& model, double sigma,
                                   double t, double xi) {
  const double T = model.horizon;
  const double a = T / (T - t);
  const std::size_t n = model.n_cash();
  std::vector<double> expo(n);
  double emax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = model.cash_values[i];
    expo[i] = a * (sigma * x * xi - 0.5 * sigma * sigma * x * x * t);
    emax = std::max(emax, expo[i]);
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = model.cash_probs[i] * std::exp(expo[i] - emax);
  }
  return w;
}

}  // namespace

std::vector<double> posterior_rate_derivative(const MarketModel& model,
                                              double sigma, double t,
                                              double xi) {
  require_constant_sigma(model);
  check_time(model, t);
  const std::size_t n = model.n_cash();
  if (t == 0.0) return std::vector<double>(n, 0.0);

  const double T = model.horizon;
  const double a = T / (T - t);
  const std::vector<double> w = scaled_weights(model, sigma, t, xi);

  // d w_i / d sigma = a * u_i * w_i with u_i = x_i xi - sigma x_i^2 t;
  // quotient rule on pi_i = w_i / sum w.
  double wsum = 0.0, dwsum = 0.0;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = model.cash_values[i];
    u[i] = x * xi - sigma * x * x * t;
    wsum += w[i];
    dwsum += a * u[i] * w[i];
  }
  std::vector<double> dpi(n);
  for (std::size_t i = 0; i < n; ++i) {
    dpi[i] = (a * u[i] * w[i] * wsum - w[i] * dwsum) / (wsum * wsum);
  }
  return dpi;
}

double fisher_direct(const MarketModel& model, double sigma, double t,
                     double xi) {
  require_constant_sigma(model);
  check_time(model, t);
  if (t == 0.0) return 0.0;  // the posterior is the prior, independent of sigma

  const std::vector<double> dpi = posterior_rate_derivative(model, sigma, t, xi);
  const std::vector<double> w = scaled_weights(model, sigma, t, xi);
  double wsum = 0.0;
  for (double v : w) wsum += v;
  double g = 0.0;
  for (std::size_t i = 0; i < model.n_cash(); ++i) {
    const double pi = w[i] / wsum;
    if (pi <= 0.0) continue;
    g += dpi[i] * dpi[i] / pi;
  }
  return g;
}

double fisher_variance_form(const MarketModel& model, double sigma, double t,
                            double xi, double realized_bridge,
                            double realized_cash) {
  require_constant_sigma(model);
  check_time(model, t);
  const double reconstructed = sigma * realized_cash * t + realized_bridge;
  if (std::abs(reconstructed - xi) > 1e-9 * std::max(1.0, std::abs(xi))) {
    throw PathModelMismatch("fisher_variance_form: (bridge, cash) inconsistent with xi");
  }
  if (t == 0.0) return 0.0;

  const double T = model.horizon;
  const double a = T / (T - t);
  const std::size_t n = model.n_cash();
  const std::vector<double> w = scaled_weights(model, sigma, t, xi);
  double wsum = 0.0;
  for (double v : w) wsum += v;

  // v_i = x_i * beta_i with beta_i = xi - sigma x_i t the bridge value
  // consistent with outcome i.
  double vbar = 0.0;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = model.cash_values[i];
    v[i] = x * (xi - sigma * x * t);
    vbar += (w[i] / wsum) * v[i];
  }
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = v[i] - vbar;
    var += (w[i] / wsum) * d * d;
  }
  return a * a * var;
}

MonteCarloEstimate expected_fisher(const MarketModel& model, double sigma,
                                   double t, std::size_t n_paths,
                                   std::uint64_t seed, unsigned threads) {
  require_constant_sigma(model);
  check_time(model, t);
  if (n_paths < 100) throw TooFewPaths("expected_fisher: n_paths must be >= 100");

  const double T = model.horizon;
  const double noise_sd = std::sqrt(t * (T - t) / T);
  std::vector<double> g(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t j) {
    Rng rng(Rng::substream(seed, j));
    const double cash = draw_cash(model, rng);
    const double xi = sigma * cash * t + noise_sd * rng.next_gaussian();
    g[j] = fisher_direct(model, sigma, t, xi);
  });

  MonteCarloEstimate est;
  est.n_samples = n_paths;
  est.value = sample_mean(g);
  est.std_err = standard_error(g);
  return est;
}

double rao_divergence(const MarketModel& model, double sigma_a, double sigma_b,
                      double t, double xi) {
  require_constant_sigma(model);
  check_time(model, t);
  if (sigma_a > sigma_b) throw BadInterval("rao_divergence: sigma_a > sigma_b");
  if (sigma_a == sigma_b) return 0.0;
  return adaptive_simpson(
      [&](double u) { return std::sqrt(std::max(0.0, fisher_direct(model, u, t, xi))); },
      sigma_a, sigma_b, 1e-8);
}

FisherCurve fisher_curve(const MarketModel& model,
                         const std::vector<double>& sigma_grid,
                         const std::vector<double>& t_grid,
                         std::size_t n_paths, std::uint64_t seed,
                         unsigned threads) {
  FisherCurve curve;
  curve.sigma_grid = sigma_grid;
  curve.t_grid = t_grid;
  curve.n_paths = n_paths;
  const std::size_t n_nodes = sigma_grid.size() * t_grid.size();
  curve.expected_g.assign(n_nodes, 0.0);
  curve.std_err.assign(n_nodes, 0.0);
  for (std::size_t si = 0; si < sigma_grid.size(); ++si) {
    for (std::size_t tj = 0; tj < t_grid.size(); ++tj) {
      const std::size_t node = si * t_grid.size() + tj;
      const auto est = expected_fisher(model, sigma_grid[si], t_grid[tj],
                                       n_paths, Rng::substream(seed, node),
                                       threads);
      curve.expected_g[node] = est.value;
      curve.std_err[node] = est.std_err;
    }
  }
  return curve;
}

void write_fisher_csv(const FisherCurve& curve,
                      const std::filesystem::path& file) {
  CsvWriter csv(file, {"sigma", "t", "expected_g", "std_err"});
  for (std::size_t si = 0; si < curve.sigma_grid.size(); ++si) {
    for (std::size_t tj = 0; tj < curve.t_grid.size(); ++tj) {
      const std::size_t node = si * curve.t_grid.size() + tj;
      csv.row(curve.sigma_grid[si], curve.t_grid[tj], curve.expected_g[node],
              curve.std_err[node]);
    }
  }
}

}  // namespace infoflow
