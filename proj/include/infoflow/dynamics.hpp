#pragma once

#include <cstddef>
#include <vector>

#include "infoflow/market_model.hpp"
#include "infoflow/paths.hpp"

namespace infoflow {

/// Ensemble volatility summaries along a grid.
struct VolDiagnostics {
  TimeGrid grid;
  std::vector<double> mean_vol;
  std::vector<double> vol_of_vol;
  std::size_t n_paths = 0;
  std::size_t window = 0;
};

/// Driving Brownian motion reconstructed from an information path.
struct InnovationsPath {
  TimeGrid grid;
  std::vector<double> w;  // w[0] = 0
};

/// Bond price volatility at (t, xi):
///   P_tT * T/(T-t) * cov(X, sigma X | xi).
/// With a single flow value the covariance collapses to
/// sigma * var(X | xi) and this is the constant-rate model's volatility.
double volatility(const MarketModel& model, double t, double xi);

/// Euler reconstruction of the innovations process along the path:
///   W_{j+1} = W_j + dxi_j + dt_j * (xi_j - T E[sigma X | xi_j]) / (T - t_j).
InnovationsPath innovations(const InfoPath& path, const MarketModel& model);

/// Bond price along the path's grid.
std::vector<double> price_series(const InfoPath& path, const MarketModel& model);

/// Volatility along the path's grid.
std::vector<double> volatility_series(const InfoPath& path,
                                      const MarketModel& model);

/// Pointwise ensemble mean of the per-path volatility series, plus a
/// vol-of-vol diagnostic: the standard deviation, pooled across paths and
/// across a centered window of `window` grid points, of the volatility
/// increments scaled by 1/sqrt(dt). The window is truncated at the ends of
/// the grid.
VolDiagnostics ensemble_volatility(const PathEnsemble& ensemble,
                                   const MarketModel& model,
                                   std::size_t window = 11,
                                   unsigned threads = 0);

/// Pointwise sample skewness (m3 / m2^(3/2)) of bond prices across the paths
/// whose realized cash flow equals condition_cash. Grid points with zero
/// cross-sectional variance (such as t = 0) yield NaN. Throws TooFewPaths if
/// fewer than 30 paths realize the conditioned value, DegenerateSample if
/// the conditioned prices have no variation anywhere.
std::vector<double> skewness_process(const PathEnsemble& ensemble,
                                     const MarketModel& model,
                                     double condition_cash,
                                     unsigned threads = 0);

/// Skewness of each grid-point cross-section of a [series][time] matrix
/// (the shared core of skewness_process and the manipulation report).
std::vector<double> pointwise_skewness(const std::vector<std::vector<double>>& series);

}  // namespace infoflow
