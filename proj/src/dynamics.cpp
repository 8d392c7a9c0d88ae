#include "infoflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "infoflow/errors.hpp"
#include "infoflow/math.hpp"
#include "infoflow/parallel.hpp"
#include "infoflow/posterior.hpp"

namespace infoflow {

double volatility(const MarketModel& model, double t, double xi) {
  const PosteriorState state = posterior(model, t, xi);
  const double T = model.horizon;
  return discount(model, t, T) * (T / (T - t)) * state.cond_cov;
}

InnovationsPath innovations(const InfoPath& path, const MarketModel& model) {
  const TimeGrid& grid = path.grid;
  const double T = model.horizon;
  InnovationsPath out;
  out.grid = grid;
  out.w.assign(grid.size(), 0.0);
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double t = grid[j];
    const double dt = grid[j + 1] - grid[j];
    const double dxi = path.xi[j + 1] - path.xi[j];
    const PosteriorState state = posterior(model, t, path.xi[j]);
    const double drift = (path.xi[j] - T * state.cond_mean_flow_cash) / (T - t);
    out.w[j + 1] = out.w[j] + dxi + drift * dt;
  }
  return out;
}

std::vector<double> price_series(const InfoPath& path, const MarketModel& model) {
  std::vector<double> prices(path.grid.size());
  for (std::size_t j = 0; j < path.grid.size(); ++j) {
    prices[j] = bond_price(model, path.grid[j], path.xi[j]);
  }
  return prices;
}

std::vector<double> volatility_series(const InfoPath& path,
                                      const MarketModel& model) {
  std::vector<double> vols(path.grid.size());
  for (std::size_t j = 0; j < path.grid.size(); ++j) {
    vols[j] = volatility(model, path.grid[j], path.xi[j]);
  }
  return vols;
}

VolDiagnostics ensemble_volatility(const PathEnsemble& ensemble,
                                   const MarketModel& model,
                                   std::size_t window, unsigned threads) {
  if (ensemble.n_paths() == 0) {
    throw TooFewPaths("ensemble_volatility: empty ensemble");
  }
  if (window == 0) window = 1;
  const std::size_t n_paths = ensemble.n_paths();
  const std::size_t n_t = ensemble.grid.size();

  std::vector<std::vector<double>> vols(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t p) {
    vols[p] = volatility_series(ensemble.paths[p], model);
  });

  VolDiagnostics diag;
  diag.grid = ensemble.grid;
  diag.n_paths = n_paths;
  diag.window = window;
  diag.mean_vol.assign(n_t, 0.0);
  for (std::size_t j = 0; j < n_t; ++j) {
    double s = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) s += vols[p][j];
    diag.mean_vol[j] = s / static_cast<double>(n_paths);
  }

  diag.vol_of_vol.assign(n_t, std::numeric_limits<double>::quiet_NaN());
  if (n_t < 2) return diag;
  // Scaled increments d_l = (vol[l+1] - vol[l]) / sqrt(dt_l), pooled over the
  // ensemble and over a centered window of left endpoints.
  const std::size_t half = window / 2;
  std::vector<double> sqrt_dt(n_t - 1);
  for (std::size_t l = 0; l + 1 < n_t; ++l) {
    sqrt_dt[l] = std::sqrt(ensemble.grid[l + 1] - ensemble.grid[l]);
  }
  for (std::size_t j = 0; j < n_t; ++j) {
    const std::size_t lo = (j >= half) ? j - half : 0;
    const std::size_t hi = std::min(j + half, n_t - 2);
    double s = 0.0, s2 = 0.0;
    std::size_t count = 0;
    for (std::size_t l = lo; l <= hi; ++l) {
      for (std::size_t p = 0; p < n_paths; ++p) {
        const double d = (vols[p][l + 1] - vols[p][l]) / sqrt_dt[l];
        s += d;
        s2 += d * d;
        ++count;
      }
    }
    if (count >= 2) {
      const double mean = s / static_cast<double>(count);
      const double var =
          std::max(0.0, (s2 - s * mean) / static_cast<double>(count - 1));
      diag.vol_of_vol[j] = std::sqrt(var);
    }
  }
  return diag;
}

std::vector<double> pointwise_skewness(
    const std::vector<std::vector<double>>& series) {
  if (series.empty()) return {};
  const std::size_t n_t = series.front().size();
  std::vector<double> skew(n_t);
  std::vector<double> column(series.size());
  for (std::size_t j = 0; j < n_t; ++j) {
    for (std::size_t p = 0; p < series.size(); ++p) column[p] = series[p][j];
    skew[j] = sample_skewness(column);
  }
  return skew;
}

std::vector<double> skewness_process(const PathEnsemble& ensemble,
                                     const MarketModel& model,
                                     double condition_cash, unsigned threads) {
  std::vector<std::size_t> selected;
  for (std::size_t p = 0; p < ensemble.n_paths(); ++p) {
    if (ensemble.paths[p].scenario_cash == condition_cash) selected.push_back(p);
  }
  if (selected.size() < 30) {
    throw TooFewPaths("skewness_process: fewer than 30 paths realize the conditioned cash value");
  }
  std::vector<std::vector<double>> prices(selected.size());
  parallel_for(selected.size(), threads, [&](std::size_t s) {
    prices[s] = price_series(ensemble.paths[selected[s]], model);
  });
  bool any_variation = false;
  for (std::size_t s = 1; s < prices.size() && !any_variation; ++s) {
    for (std::size_t j = 0; j < prices[s].size(); ++j) {
      if (std::abs(prices[s][j] - prices[0][j]) > 1e-12) {
        any_variation = true;
        break;
      }
    }
  }
  if (!any_variation) {
    throw DegenerateSample("skewness_process: conditioned prices are identical across paths");
  }
  return pointwise_skewness(prices);
}

}  // namespace infoflow
