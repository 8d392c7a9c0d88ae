#include "infoflow/mutual_information.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "infoflow/errors.hpp"
#include "infoflow/parallel.hpp"
#include "infoflow/posterior.hpp"
#include "infoflow/rng.hpp"

namespace infoflow {

namespace {

constexpr double kDensityFloor = 1e-300;

void check_open_time(const MarketModel& model, double t) {
  if (t <= 0.0) throw BadInterval("mutual information requires t > 0");
  if (t >= model.horizon) {
    throw TimeAtOrPastHorizon("mutual information requires t < horizon");
  }
}

double gaussian(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * kPi * variance);
}

}  // namespace

double prior_entropy(const MarketModel& model) {
  double h = 0.0;
  for (double p : model.cash_probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double joint_density(const MarketModel& model, double t, double x,
                     std::size_t cash_index) {
  check_open_time(model, t);
  const double variance = t * (model.horizon - t) / model.horizon;
  const double xv = model.cash_values[cash_index];
  double rho = 0.0;
  for (std::size_t k = 0; k < model.n_flow(); ++k) {
    rho += model.flow_probs[k] * gaussian(x, model.flow_values[k] * xv * t, variance);
  }
  return model.cash_probs[cash_index] * rho;
}

double mutual_info_quadrature(const MarketModel& model, double t) {
  check_open_time(model, t);
  const double variance = t * (model.horizon - t) / model.horizon;
  const double sd = std::sqrt(variance);

  // The integrand lives within 8 standard deviations of the mixture means
  // (tails below 1e-15 beyond that). Integrate the merged per-mean windows
  // separately: late in the horizon the density is a set of spikes far
  // narrower than their overall spread, and a single pass over the hull can
  // miss them entirely.
  std::vector<double> means;
  for (std::size_t i = 0; i < model.n_cash(); ++i) {
    for (std::size_t k = 0; k < model.n_flow(); ++k) {
      means.push_back(model.flow_values[k] * model.cash_values[i] * t);
    }
  }
  std::sort(means.begin(), means.end());
  std::vector<std::pair<double, double>> windows;
  for (double mean : means) {
    const double lo = mean - 8.0 * sd;
    const double hi = mean + 8.0 * sd;
    if (!windows.empty() && lo <= windows.back().second) {
      windows.back().second = std::max(windows.back().second, hi);
    } else {
      windows.emplace_back(lo, hi);
    }
  }

  const std::size_t n = model.n_cash();
  const auto integrand = [&](double x) {
    std::vector<double> rho(n);
    double rho_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rho[i] = joint_density(model, t, x, i);
      rho_total += rho[i];
    }
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = model.cash_probs[i];
      if (p <= 0.0 || rho[i] < kDensityFloor) continue;
      f += rho[i] * std::log(rho[i] / (rho_total * p));
    }
    return f;
  };

  const double tol = 1e-7 / static_cast<double>(windows.size());
  double total = 0.0;
  for (const auto& [lo, hi] : windows) {
    total += adaptive_simpson(integrand, lo, hi, tol);
  }
  return total;
}

MonteCarloEstimate mutual_info_entropy(const MarketModel& model, double t,
                                       std::size_t n_paths, std::uint64_t seed,
                                       unsigned threads) {
  check_open_time(model, t);
  if (n_paths < 1000) {
    throw TooFewPaths("mutual_info_entropy: n_paths must be >= 1000");
  }
  const double noise_sd = std::sqrt(t * (model.horizon - t) / model.horizon);
  std::vector<double> h(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t j) {
    Rng rng(Rng::substream(seed, j));
    const double cash = draw_cash(model, rng);
    const double flow = draw_flow(model, rng);
    const double xi = flow * cash * t + noise_sd * rng.next_gaussian();
    h[j] = entropy(posterior(model, t, xi));
  });

  MonteCarloEstimate est;
  est.n_samples = n_paths;
  est.value = prior_entropy(model) - sample_mean(h);
  est.std_err = standard_error(h);
  return est;
}

}  // namespace infoflow
