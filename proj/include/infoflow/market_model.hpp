#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace infoflow {

/// Market model for a single-cash-flow (digital credit-risky) bond whose
/// information flow rate is itself a discrete random variable.
///
/// The terminal cash flow takes cash_values[i] with probability
/// cash_probs[i]; the flow rate takes flow_values[k] with probability
/// flow_probs[k], independently of the cash flow. Discounting is flat and
/// continuously compounded at short_rate.
struct MarketModel {
  std::vector<double> cash_values;
  std::vector<double> cash_probs;
  std::vector<double> flow_values;
  std::vector<double> flow_probs;
  double horizon = 0.0;
  double short_rate = 0.0;

  MarketModel() = default;
  MarketModel(std::vector<double> cash_values, std::vector<double> cash_probs,
              std::vector<double> flow_values, std::vector<double> flow_probs,
              double horizon, double short_rate);

  std::size_t n_cash() const { return cash_values.size(); }
  std::size_t n_flow() const { return flow_values.size(); }

  double prior_mean_cash() const;
  double prior_mean_flow() const;

  /// Throws InvalidModel on any invariant violation:
  /// probabilities in [0,1] summing to 1 within 1e-12, cash values strictly
  /// increasing, flow values pairwise distinct, horizon > 0.
  void validate() const;
};

void to_json(nlohmann::json& j, const MarketModel& m);
void from_json(const nlohmann::json& j, MarketModel& m);

/// A coinciding pair of terminal information values: flow_values[flow_k] *
/// cash_values[cash_i] equals flow_values[flow_l] * cash_values[cash_j]
/// although the cash values differ, so the cash flow cannot be read off the
/// terminal information.
struct Collision {
  std::size_t cash_i = 0, flow_k = 0;
  std::size_t cash_j = 0, flow_l = 0;
  double terminal_product = 0.0;  // common value of sigma * x * T
};

struct MeasurabilityReport {
  bool is_measurable = true;
  std::vector<Collision> collisions;
};

/// Scans every (cash, flow) pair of combinations for coinciding terminal
/// products sigma_k * x_i * horizon (relative tolerance 1e-12). Never fails;
/// it reports.
MeasurabilityReport validate_measurability(const MarketModel& model);

/// A family of correlated information sources on the same cash flow: one
/// flow rate per source plus the noise correlation matrix.
struct SourceSpec {
  std::vector<double> source_rates;
  Eigen::MatrixXd noise_correlation;

  SourceSpec() = default;
  SourceSpec(std::vector<double> rates, Eigen::MatrixXd correlation);

  /// Throws InvalidModel unless the correlation matrix is square of matching
  /// size, symmetric within 1e-12, unit-diagonal within 1e-12, and positive
  /// definite (all eigenvalues > 0).
  void validate() const;
};

enum class EffectiveRateFormula {
  /// sigma^2 = (sum_i sigma_i^2 inv(rho)_ii
  ///            - 2 sum_{i != j} sigma_i sigma_j inv(rho)_ij) / det(rho),
  /// the i != j sum running over ordered pairs.
  kAsPrinted,
  /// sigma^2 = sigma' inv(rho) sigma (precision-weighted quadratic form).
  kQuadraticForm,
};

/// Effective flow rate of the aggregated source family. Throws
/// NegativeEffectiveRate when the expression under the root is negative.
/// A single source returns its rate's magnitude exactly.
double effective_flow_rate(const SourceSpec& spec,
                           EffectiveRateFormula formula = EffectiveRateFormula::kAsPrinted);

/// Deterministic discount factor exp(-r (to_t - from_t)).
/// Requires 0 <= from_t <= to_t <= horizon; throws BadInterval otherwise.
double discount(const MarketModel& model, double from_t, double to_t);

}  // namespace infoflow
