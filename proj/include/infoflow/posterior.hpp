#pragma once

#include <cstddef>
#include <vector>

#include "infoflow/market_model.hpp"
#include "infoflow/paths.hpp"

namespace infoflow {

/// Joint posterior law of (cash flow, flow rate) given the information value
/// xi observed at time t, together with the conditional moments the pricing
/// and volatility formulas need.
///
/// joint_log_weights holds the unnormalized log weights (row-major n_cash x
/// n_flow):
///   log p_i + log q_k + T/(T-t) * (x_i s_k xi - 0.5 x_i^2 s_k^2 t),
/// log_weight_norm is their log-sum-exp (so the normalized joint probability
/// of (i,k) is exp(joint_log_weights[i*m+k] - log_weight_norm), and
/// exp(log_weight_norm) is the unnormalized total weight, which is the
/// density ratio used by the option-measure machinery).
struct PosteriorState {
  double t = 0.0;
  double xi = 0.0;
  std::size_t n_cash = 0;
  std::size_t n_flow = 0;
  std::vector<double> joint_log_weights;
  std::vector<double> marginal_probs;  // P(X = x_i | xi), sums to 1
  double cond_mean_cash = 0.0;         // E[X | xi]
  double cond_mean_flow_cash = 0.0;    // E[sigma X | xi]
  double cond_cov = 0.0;               // cov(X, sigma X | xi)
  double log_weight_norm = 0.0;

  double joint_prob(std::size_t i, std::size_t k) const;
};

/// Bayesian posterior at (t, xi). All exponent arithmetic is done in log
/// space with log-sum-exp: T/(T-t) reaches 250 at the default grid cutoff
/// and the raw exponentials overflow long before that.
///
/// At t = 0 the information value is 0 by construction and the posterior is
/// the prior; any xi passed for t = 0 is ignored. Requires 0 <= t < horizon.
PosteriorState posterior(const MarketModel& model, double t, double xi);

/// Discounted conditional mean of the cash flow,
///   P_tT * sum_i x_i * P(X = x_i | xi).
/// Strictly increasing in xi when every flow value is positive and the cash
/// law is non-degenerate.
double bond_price(const MarketModel& model, double t, double xi);

/// Shannon entropy -sum_i pi_i ln pi_i of the cash-flow marginal, with the
/// 0 ln 0 = 0 convention.
double entropy(const PosteriorState& state);

/// True iff, at the last grid point of the path, the posterior puts mass at
/// least 1 - delta on the realized cash value. Meaningful as a statistical
/// check over ensembles, not a per-path guarantee.
bool terminal_limit_check(const InfoPath& path, const MarketModel& model,
                          double delta = 0.05);

}  // namespace infoflow
