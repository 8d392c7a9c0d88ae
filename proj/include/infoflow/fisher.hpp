#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "infoflow/market_model.hpp"
#include "infoflow/math.hpp"

namespace infoflow {

/// Expected Fisher information over a (sigma, t) grid, row-major sigma x t.
struct FisherCurve {
  std::vector<double> sigma_grid;
  std::vector<double> t_grid;
  std::vector<double> expected_g;
  std::vector<double> std_err;
  std::size_t n_paths = 0;
};

/// Closed-form derivative of the constant-rate posterior probabilities with
/// respect to the flow-rate parameter (quotient rule on the unnormalized
/// weights, whose rate derivative is T/(T-t) (x_i xi - sigma x_i^2 t) w_i).
std::vector<double> posterior_rate_derivative(const MarketModel& model_constant_sigma,
                                              double sigma, double t, double xi);

/// Fisher information of the constant-rate posterior with respect to the
/// flow-rate parameter, g = sum_i (1/pi_i) (d pi_i / d sigma)^2, with the
/// derivative taken from the closed-form quotient-rule expression. Requires
/// a single-flow-value model; the model's own flow value is not used -- the
/// parameter of interest is the `sigma` argument. g(0, xi) = 0.
double fisher_direct(const MarketModel& model_constant_sigma, double sigma,
                     double t, double xi);

/// The same information expressed through the conditional variance of
/// X * beta given xi, with beta = xi - sigma x_i t substituted per outcome:
///   g = (T/(T-t))^2 var(X beta | xi).
/// (realized_bridge, realized_cash) identify the realized scenario and must
/// reproduce xi = sigma * realized_cash * t + realized_bridge within 1e-9;
/// PathModelMismatch otherwise. Agrees with fisher_direct to 1e-10.
double fisher_variance_form(const MarketModel& model_constant_sigma,
                            double sigma, double t, double xi,
                            double realized_bridge, double realized_cash);

/// Monte Carlo mean of g over paths simulated at flow rate sigma: the
/// information value at time t is drawn directly from its law
/// (scenario + Normal(0, t(T-t)/T)). Requires n_paths >= 100.
MonteCarloEstimate expected_fisher(const MarketModel& model_constant_sigma,
                                   double sigma, double t, std::size_t n_paths,
                                   std::uint64_t seed, unsigned threads = 0);

/// Divergence between two flow-rate specifications,
///   D = integral_{sigma_a}^{sigma_b} sqrt(g_t(u)) du,
/// by adaptive quadrature to absolute tolerance 1e-8. Requires
/// sigma_a <= sigma_b.
double rao_divergence(const MarketModel& model_constant_sigma, double sigma_a,
                      double sigma_b, double t, double xi);

/// expected_fisher over a full (sigma, t) grid; node (si, tj) uses the
/// substream derived from (seed, si * |t_grid| + tj).
FisherCurve fisher_curve(const MarketModel& model_constant_sigma,
                         const std::vector<double>& sigma_grid,
                         const std::vector<double>& t_grid,
                         std::size_t n_paths, std::uint64_t seed,
                         unsigned threads = 0);

/// Columns: sigma,t,expected_g,std_err.
void write_fisher_csv(const FisherCurve& curve,
                      const std::filesystem::path& file);

}  // namespace infoflow
