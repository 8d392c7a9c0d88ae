#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "infoflow/market_model.hpp"
#include "infoflow/math.hpp"
#include "infoflow/paths.hpp"

namespace infoflow {

/// European call on the bond: option maturity strictly inside (0, horizon),
/// strike >= 0.
struct OptionSpec {
  double maturity = 0.0;
  double strike = 0.0;

  OptionSpec() = default;
  OptionSpec(double maturity, double strike);
};

/// Reciprocal of the total unnormalized posterior weight along a path,
/// computed two ways: phi_inverse evaluates 1 / sum_ik p_ikt directly at
/// each grid point (exact, authoritative); phi_inverse_euler integrates the
/// exponential-martingale form against the reconstructed innovations and
/// differs by discretization error O(dt). phi_inverse[0] = 1.
struct PhiPath {
  TimeGrid grid;
  std::vector<double> phi_inverse;
  std::vector<double> phi_inverse_euler;
};

/// Monte Carlo verification that the phi-inverse reweighting turns the
/// information value into a centered Gaussian with variance t(T-t)/T while
/// the cash-flow law is preserved. The xi moments use the phi-inverse
/// weight; the cash-flow frequencies use the per-scenario Gaussian density
/// ratio (the density of the reweighted measure on the full scenario
/// algebra, whose projection onto the information filtration is phi
/// inverse).
struct BridgeMeasureReport {
  std::size_t n_paths = 0;
  double mean = 0.0, mean_std_err = 0.0;
  double second_moment = 0.0, second_moment_std_err = 0.0;
  double target_variance = 0.0;
  std::vector<double> cash_freq, cash_freq_std_err;
  bool pass = false;
};

/// Implied constant-rate calibration surface, row-major maturity x strike.
/// Non-converged nodes are flagged and left NaN, never interpolated.
struct VolSurface {
  std::vector<double> strikes;
  std::vector<double> maturities;
  std::vector<double> price;
  std::vector<double> implied_sigma;
  std::vector<char> converged;
};

/// The unique information value at which the bond price equals the strike,
/// found by geometric bracket expansion from 0 (factor 2) followed by
/// bisection to |bracket| < 1e-12. Uniqueness needs every flow value
/// positive (monotone price); the strike must lie strictly inside the
/// attainable price interval (P_tT x_min, P_tT x_max).
double critical_information(const MarketModel& model, const OptionSpec& spec);

/// Closed-form call price
///   C_0 = P_0t sum_k sum_i q_k p_i (P_tT x_i - K) N(sqrt(tau) sigma_k x_i - Z*),
/// tau = tT/(T-t), Z* = xi* / sqrt(t(T-t)/T). Strikes at or outside the
/// attainable interval return the degenerate value (the discounted forward
/// difference, or 0) without root finding.
double call_price_closed(const MarketModel& model, const OptionSpec& spec);

/// The same sum evaluated at a caller-supplied critical value (the random
/// model's price is the flow-prior-weighted average of constant-rate prices
/// sharing one critical value; exposed for that identity and for testing).
double call_price_from_critical(const MarketModel& model, const OptionSpec& spec,
                                double xi_star);

/// Monte Carlo price: discounted mean of (B_tT - K)+ over information values
/// simulated from the signal-plus-bridge construction at the option
/// maturity. Requires n_paths >= 1000.
MonteCarloEstimate call_price_mc(const MarketModel& model, const OptionSpec& spec,
                                 std::size_t n_paths, std::uint64_t seed,
                                 unsigned threads = 0);

PhiPath phi_inverse_path(const InfoPath& path, const MarketModel& model);

/// Requires n_paths >= 10000; checks run at 4 standard errors.
BridgeMeasureReport bridge_measure_check(const MarketModel& model, double t,
                                         std::size_t n_paths, std::uint64_t seed,
                                         unsigned threads = 0);

/// The constant flow rate at which the single-rate model reproduces
/// target_price at (maturity, strike), by bracketed bisection (the
/// single-rate call price is increasing in the rate). The target must lie
/// strictly between the rate->0 and rate->infinity limit prices. The
/// template model supplies the cash law, rates and horizon; its flow value
/// seeds the bracket.
double implied_bhm_sigma(const MarketModel& bhm_template, const OptionSpec& spec,
                         double target_price);

/// call_price_closed followed by implied_bhm_sigma at every
/// (maturity, strike) node; non-converged nodes are flagged.
VolSurface vol_surface(const MarketModel& model,
                       const std::vector<double>& strikes,
                       const std::vector<double>& maturities,
                       const MarketModel& bhm_template, unsigned threads = 0);

/// Columns: maturity,strike,price,implied_sigma,converged.
void write_surface_csv(const VolSurface& surface,
                       const std::filesystem::path& file);

}  // namespace infoflow
