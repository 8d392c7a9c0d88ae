#include "infoflow/posterior.hpp"

#include <cmath>

#include "infoflow/errors.hpp"
#include "infoflow/math.hpp"

namespace infoflow {

namespace {

void check_time(const MarketModel& model, double t) {
  if (t < 0.0) throw BadInterval("posterior: t < 0");
  if (t >= model.horizon) {
    throw TimeAtOrPastHorizon("posterior: t must be strictly before the horizon");
  }
}

}  // namespace

double PosteriorState::joint_prob(std::size_t i, std::size_t k) const {
  return std::exp(joint_log_weights[i * n_flow + k] - log_weight_norm);
}

PosteriorState posterior(const MarketModel& model, double t, double xi) {
  check_time(model, t);
  const std::size_t n = model.n_cash();
  const std::size_t m = model.n_flow();
  const double T = model.horizon;

  PosteriorState state;
  state.t = t;
  state.xi = (t == 0.0) ? 0.0 : xi;
  state.n_cash = n;
  state.n_flow = m;
  state.joint_log_weights.resize(n * m);

  const double a = T / (T - t);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = model.cash_values[i];
    const double lp = std::log(model.cash_probs[i]);
    for (std::size_t k = 0; k < m; ++k) {
      const double s = model.flow_values[k];
      const double lq = std::log(model.flow_probs[k]);
      state.joint_log_weights[i * m + k] =
          lp + lq + a * (x * s * state.xi - 0.5 * x * x * s * s * t);
    }
  }

  if (t == 0.0) {
    // The prior, exactly: no information has arrived yet.
    state.log_weight_norm = 0.0;
    state.marginal_probs = model.cash_probs;
    double ex = 0.0, ex2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ex += model.cash_probs[i] * model.cash_values[i];
      ex2 += model.cash_probs[i] * model.cash_values[i] * model.cash_values[i];
    }
    const double es = model.prior_mean_flow();
    state.cond_mean_cash = ex;
    state.cond_mean_flow_cash = es * ex;
    state.cond_cov = es * ex2 - ex * (es * ex);  // = E[sigma] var(X)
    return state;
  }

  state.log_weight_norm = log_sum_exp(state.joint_log_weights);

  state.marginal_probs.assign(n, 0.0);
  double mean_x = 0.0, mean_sx = 0.0, mean_sx2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = model.cash_values[i];
    double pi = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double w =
          std::exp(state.joint_log_weights[i * m + k] - state.log_weight_norm);
      pi += w;
      const double s = model.flow_values[k];
      mean_sx += w * s * x;
      mean_sx2 += w * s * x * x;
    }
    state.marginal_probs[i] = pi;
    mean_x += pi * x;
  }
  state.cond_mean_cash = mean_x;
  state.cond_mean_flow_cash = mean_sx;
  state.cond_cov = mean_sx2 - mean_x * mean_sx;
  return state;
}

double bond_price(const MarketModel& model, double t, double xi) {
  const PosteriorState state = posterior(model, t, xi);
  return discount(model, t, model.horizon) * state.cond_mean_cash;
}

double entropy(const PosteriorState& state) {
  double h = 0.0;
  for (double p : state.marginal_probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

bool terminal_limit_check(const InfoPath& path, const MarketModel& model,
                          double delta) {
  const std::size_t last = path.grid.size() - 1;
  const PosteriorState state = posterior(model, path.grid[last], path.xi[last]);
  for (std::size_t i = 0; i < model.n_cash(); ++i) {
    if (model.cash_values[i] == path.scenario_cash) {
      return state.marginal_probs[i] >= 1.0 - delta;
    }
  }
  throw PathModelMismatch("terminal_limit_check: realized cash value not in the model");
}

}  // namespace infoflow
