#pragma once

#include <cstddef>
#include <cstdint>

#include "infoflow/market_model.hpp"
#include "infoflow/math.hpp"

namespace infoflow {

/// Prior entropy H_0 = -sum_i p_i ln p_i of the cash-flow law.
double prior_entropy(const MarketModel& model);

/// Joint density of (information value, cash outcome i) at time t:
///   rho(x, i) = sum_k q_k p_i N(x; sigma_k x_i t, t(T-t)/T).
/// Requires 0 < t < horizon.
double joint_density(const MarketModel& model, double t, double x,
                     std::size_t cash_index);

/// Mutual information between the time-t information value and the cash
/// flow, by direct quadrature of the joint density over
/// [min mean - 8 sd, max mean + 8 sd] (tails below 1e-15 beyond that) to
/// absolute tolerance 1e-7. Regions where the joint density underflows are
/// dropped; the integrand's limit there is 0.
double mutual_info_quadrature(const MarketModel& model, double t);

/// The entropy route: J = H_0 - E[H_t], the expectation estimated by Monte
/// Carlo over information values drawn directly from their time-t law.
/// Requires n_paths >= 1000.
MonteCarloEstimate mutual_info_entropy(const MarketModel& model, double t,
                                       std::size_t n_paths, std::uint64_t seed,
                                       unsigned threads = 0);

}  // namespace infoflow
