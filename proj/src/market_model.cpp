#include "infoflow/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "infoflow/errors.hpp"

namespace infoflow {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kCollisionRelTol = 1e-12;

void check_probability_law(const std::vector<double>& probs, const char* what) {
  if (probs.empty()) throw InvalidModel(std::string(what) + ": empty probability law");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidModel(std::string(what) + ": probability outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbTol) {
    throw InvalidModel(std::string(what) + ": probabilities do not sum to 1");
  }
}

}  // namespace

MarketModel::MarketModel(std::vector<double> cash_values_in,
                         std::vector<double> cash_probs_in,
                         std::vector<double> flow_values_in,
                         std::vector<double> flow_probs_in, double horizon_in,
                         double short_rate_in)
    : cash_values(std::move(cash_values_in)),
      cash_probs(std::move(cash_probs_in)),
      flow_values(std::move(flow_values_in)),
      flow_probs(std::move(flow_probs_in)),
      horizon(horizon_in),
      short_rate(short_rate_in) {
  validate();
}

void MarketModel::validate() const {
  if (cash_values.size() != cash_probs.size()) {
    throw InvalidModel("cash_values and cash_probs differ in length");
  }
  if (flow_values.size() != flow_probs.size()) {
    throw InvalidModel("flow_values and flow_probs differ in length");
  }
  check_probability_law(cash_probs, "cash_probs");
  check_probability_law(flow_probs, "flow_probs");
  for (std::size_t i = 1; i < cash_values.size(); ++i) {
    if (!(cash_values[i] > cash_values[i - 1])) {
      throw InvalidModel("cash_values must be strictly increasing");
    }
  }
  for (std::size_t k = 0; k < flow_values.size(); ++k) {
    for (std::size_t l = k + 1; l < flow_values.size(); ++l) {
      if (flow_values[k] == flow_values[l]) {
        throw InvalidModel("flow_values must be pairwise distinct");
      }
    }
  }
  if (!(horizon > 0.0)) throw InvalidModel("horizon must be positive");
  if (!std::isfinite(short_rate)) throw InvalidModel("short_rate must be finite");
}

double MarketModel::prior_mean_cash() const {
  double s = 0.0;
  for (std::size_t i = 0; i < cash_values.size(); ++i) {
    s += cash_probs[i] * cash_values[i];
  }
  return s;
}

double MarketModel::prior_mean_flow() const {
  double s = 0.0;
  for (std::size_t k = 0; k < flow_values.size(); ++k) {
    s += flow_probs[k] * flow_values[k];
  }
  return s;
}

void to_json(nlohmann::json& j, const MarketModel& m) {
  j = nlohmann::json{{"cash_values", m.cash_values},
                     {"cash_probs", m.cash_probs},
                     {"flow_values", m.flow_values},
                     {"flow_probs", m.flow_probs},
                     {"horizon", m.horizon},
                     {"short_rate", m.short_rate}};
}

void from_json(const nlohmann::json& j, MarketModel& m) {
  m = MarketModel(j.at("cash_values").get<std::vector<double>>(),
                  j.at("cash_probs").get<std::vector<double>>(),
                  j.at("flow_values").get<std::vector<double>>(),
                  j.at("flow_probs").get<std::vector<double>>(),
                  j.at("horizon").get<double>(), j.at("short_rate").get<double>());
}

MeasurabilityReport validate_measurability(const MarketModel& model) {
  MeasurabilityReport report;
  const double T = model.horizon;
  for (std::size_t i = 0; i < model.n_cash(); ++i) {
    for (std::size_t j = i + 1; j < model.n_cash(); ++j) {
      // cash values are strictly increasing, so i != j implies x_i != x_j.
      for (std::size_t k = 0; k < model.n_flow(); ++k) {
        for (std::size_t l = 0; l < model.n_flow(); ++l) {
          const double a = model.flow_values[k] * model.cash_values[i] * T;
          const double b = model.flow_values[l] * model.cash_values[j] * T;
          if (std::abs(a - b) <= kCollisionRelTol * std::max(std::abs(a), std::abs(b))) {
            report.collisions.push_back(Collision{i, k, j, l, a});
          }
        }
      }
    }
  }
  report.is_measurable = report.collisions.empty();
  return report;
}

SourceSpec::SourceSpec(std::vector<double> rates, Eigen::MatrixXd correlation)
    : source_rates(std::move(rates)), noise_correlation(std::move(correlation)) {
  validate();
}

void SourceSpec::validate() const {
  const auto n = static_cast<Eigen::Index>(source_rates.size());
  if (n == 0) throw InvalidModel("SourceSpec: no sources");
  if (noise_correlation.rows() != n || noise_correlation.cols() != n) {
    throw InvalidModel("SourceSpec: correlation matrix size mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(noise_correlation(i, i) - 1.0) > 1e-12) {
      throw InvalidModel("SourceSpec: correlation diagonal must be 1");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(noise_correlation(i, j) - noise_correlation(j, i)) > 1e-12) {
        throw InvalidModel("SourceSpec: correlation matrix must be symmetric");
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(noise_correlation);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw InvalidModel("SourceSpec: correlation matrix must be positive definite");
  }
}

double effective_flow_rate(const SourceSpec& spec, EffectiveRateFormula formula) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.source_rates.size());
  if (n == 1) return std::abs(spec.source_rates[0]);

  const Eigen::Map<const Eigen::VectorXd> rates(spec.source_rates.data(), n);
  const Eigen::MatrixXd inv = spec.noise_correlation.inverse();

  double s2 = 0.0;
  if (formula == EffectiveRateFormula::kQuadraticForm) {
    s2 = rates.dot(inv * rates);
  } else {
    double diag = 0.0, cross = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      diag += rates[i] * rates[i] * inv(i, i);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j) cross += rates[i] * rates[j] * inv(i, j);
      }
    }
    s2 = (diag - 2.0 * cross) / spec.noise_correlation.determinant();
  }
  if (s2 < 0.0) {
    throw NegativeEffectiveRate("effective rate expression is negative for this source family");
  }
  return std::sqrt(s2);
}

double discount(const MarketModel& model, double from_t, double to_t) {
  if (from_t > to_t) throw BadInterval("discount: from_t > to_t");
  if (from_t < 0.0 || to_t > model.horizon) {
    throw BadInterval("discount: interval outside [0, horizon]");
  }
  return std::exp(-model.short_rate * (to_t - from_t));
}

}  // namespace infoflow
