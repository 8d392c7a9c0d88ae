#include "infoflow/options.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "infoflow/csv.hpp"
#include "infoflow/dynamics.hpp"
#include "infoflow/errors.hpp"
#include "infoflow/parallel.hpp"
#include "infoflow/posterior.hpp"
#include "infoflow/rng.hpp"

namespace infoflow {

namespace {

constexpr double kBisectTol = 1e-12;
constexpr int kMaxExpansions = 200;
constexpr int kMaxBisections = 400;

void check_spec(const MarketModel& model, const OptionSpec& spec) {
  if (!(spec.maturity > 0.0 && spec.maturity < model.horizon)) {
    throw BadInterval("option maturity must lie strictly inside (0, horizon)");
  }
}

}  // namespace

OptionSpec::OptionSpec(double maturity_in, double strike_in)
    : maturity(maturity_in), strike(strike_in) {
  if (!(maturity > 0.0)) throw BadInterval("OptionSpec: maturity must be positive");
  if (!(strike >= 0.0)) throw BadInterval("OptionSpec: strike must be nonnegative");
}

double critical_information(const MarketModel& model, const OptionSpec& spec) {
  check_spec(model, spec);
  for (double s : model.flow_values) {
    if (!(s > 0.0)) {
      throw NonPositiveFlowRate("critical_information: price monotonicity needs positive flow rates");
    }
  }
  const double t = spec.maturity;
  const double k = spec.strike;
  const double ptt = discount(model, t, model.horizon);
  const double lo_price = ptt * model.cash_values.front();
  const double hi_price = ptt * model.cash_values.back();
  if (!(k > lo_price && k < hi_price)) {
    throw StrikeOutOfRange("critical_information: strike outside the attainable price interval");
  }

  const auto price = [&](double xi) { return bond_price(model, t, xi); };

  double lo = 0.0, hi = 0.0;
  const double p0 = price(0.0);
  if (p0 == k) return 0.0;
  double step = 1.0;
  if (p0 < k) {
    hi = step;
    int iter = 0;
    while (price(hi) < k) {
      lo = hi;
      step *= 2.0;
      hi = step;
      if (++iter > kMaxExpansions) {
        throw NoConvergence("critical_information: bracket expansion failed");
      }
    }
  } else {
    lo = -step;
    int iter = 0;
    while (price(lo) > k) {
      hi = lo;
      step *= 2.0;
      lo = -step;
      if (++iter > kMaxExpansions) {
        throw NoConvergence("critical_information: bracket expansion failed");
      }
    }
  }

  int iter = 0;
  while (hi - lo > kBisectTol) {
    const double mid = 0.5 * (lo + hi);
    if (price(mid) < k) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (++iter > kMaxBisections) break;
  }
  return 0.5 * (lo + hi);
}

double call_price_from_critical(const MarketModel& model, const OptionSpec& spec,
                                double xi_star) {
  check_spec(model, spec);
  const double t = spec.maturity;
  const double T = model.horizon;
  const double p0t = discount(model, 0.0, t);
  const double ptt = discount(model, t, T);
  const double tau = t * T / (T - t);
  const double sqrt_tau = std::sqrt(tau);
  const double z_star = xi_star / std::sqrt(t * (T - t) / T);

  double sum = 0.0;
  for (std::size_t k = 0; k < model.n_flow(); ++k) {
    for (std::size_t i = 0; i < model.n_cash(); ++i) {
      sum += model.flow_probs[k] * model.cash_probs[i] *
             (ptt * model.cash_values[i] - spec.strike) *
             norm_cdf(sqrt_tau * model.flow_values[k] * model.cash_values[i] - z_star);
    }
  }
  return p0t * sum;
}

double call_price_closed(const MarketModel& model, const OptionSpec& spec) {
  check_spec(model, spec);
  const double t = spec.maturity;
  const double p0t = discount(model, 0.0, t);
  const double ptt = discount(model, t, model.horizon);
  if (spec.strike >= ptt * model.cash_values.back()) return 0.0;
  if (spec.strike <= ptt * model.cash_values.front()) {
    // Always in the money: the discounted forward difference.
    return p0t * (ptt * model.prior_mean_cash() - spec.strike);
  }
  return call_price_from_critical(model, spec, critical_information(model, spec));
}

MonteCarloEstimate call_price_mc(const MarketModel& model, const OptionSpec& spec,
                                 std::size_t n_paths, std::uint64_t seed,
                                 unsigned threads) {
  check_spec(model, spec);
  if (n_paths < 1000) throw TooFewPaths("call_price_mc: n_paths must be >= 1000");
  const double t = spec.maturity;
  const double T = model.horizon;
  const double p0t = discount(model, 0.0, t);
  const double noise_sd = std::sqrt(t * (T - t) / T);

  std::vector<double> payoff(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t j) {
    Rng rng(Rng::substream(seed, j));
    const double cash = draw_cash(model, rng);
    const double flow = draw_flow(model, rng);
    const double xi = flow * cash * t + noise_sd * rng.next_gaussian();
    payoff[j] = std::max(0.0, bond_price(model, t, xi) - spec.strike);
  });

  MonteCarloEstimate est;
  est.n_samples = n_paths;
  est.value = p0t * sample_mean(payoff);
  est.std_err = p0t * standard_error(payoff);
  return est;
}

PhiPath phi_inverse_path(const InfoPath& path, const MarketModel& model) {
  const TimeGrid& grid = path.grid;
  const double T = model.horizon;
  const std::size_t n = grid.size();

  PhiPath out;
  out.grid = grid;
  out.phi_inverse.assign(n, 1.0);
  out.phi_inverse_euler.assign(n, 1.0);

  double log_phi_inv_euler = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const PosteriorState state = posterior(model, grid[j], path.xi[j]);
    // Route (a): the total weight directly. At t = 0 it is 1 by construction.
    out.phi_inverse[j] = (grid[j] == 0.0) ? 1.0 : std::exp(-state.log_weight_norm);
    out.phi_inverse_euler[j] = std::exp(log_phi_inv_euler);
    if (j + 1 < n) {
      // Route (b): exponential-martingale form against the innovations,
      // d log(phi^-1) = -a dW - a^2/2 dt with a = T/(T-t) E[sigma X | xi].
      const double t = grid[j];
      const double dt = grid[j + 1] - t;
      const double drift = (path.xi[j] - T * state.cond_mean_flow_cash) / (T - t);
      const double dw = (path.xi[j + 1] - path.xi[j]) + drift * dt;
      const double a = (T / (T - t)) * state.cond_mean_flow_cash;
      log_phi_inv_euler += -a * dw - 0.5 * a * a * dt;
    }
  }
  return out;
}

BridgeMeasureReport bridge_measure_check(const MarketModel& model, double t,
                                         std::size_t n_paths, std::uint64_t seed,
                                         unsigned threads) {
  if (n_paths < 10000) {
    throw TooFewPaths("bridge_measure_check: n_paths must be >= 10000");
  }
  if (t <= 0.0 || t >= model.horizon) {
    throw BadInterval("bridge_measure_check: t must lie strictly inside (0, horizon)");
  }
  const double T = model.horizon;
  const double variance = t * (T - t) / T;
  const double noise_sd = std::sqrt(variance);
  const std::size_t n_cash = model.n_cash();

  std::vector<double> w_xi(n_paths), w_xi2(n_paths);
  std::vector<std::vector<double>> w_ind(n_cash, std::vector<double>(n_paths));
  parallel_for(n_paths, threads, [&](std::size_t j) {
    Rng rng(Rng::substream(seed, j));
    const double cash = draw_cash(model, rng);
    const double flow = draw_flow(model, rng);
    const double xi = flow * cash * t + noise_sd * rng.next_gaussian();

    const double phi_inv = std::exp(-posterior(model, t, xi).log_weight_norm);
    w_xi[j] = phi_inv * xi;
    w_xi2[j] = phi_inv * xi * xi;

    // Scenario-level density ratio N(xi; 0, v) / N(xi; mean, v): the
    // reweighting that leaves the factor law untouched.
    const double mean = flow * cash * t;
    const double ratio = std::exp((mean * mean - 2.0 * xi * mean) / (2.0 * variance));
    for (std::size_t i = 0; i < n_cash; ++i) {
      w_ind[i][j] = (model.cash_values[i] == cash) ? ratio : 0.0;
    }
  });

  BridgeMeasureReport report;
  report.n_paths = n_paths;
  report.target_variance = variance;
  report.mean = sample_mean(w_xi);
  report.mean_std_err = standard_error(w_xi);
  report.second_moment = sample_mean(w_xi2);
  report.second_moment_std_err = standard_error(w_xi2);
  report.cash_freq.resize(n_cash);
  report.cash_freq_std_err.resize(n_cash);
  bool ok = std::abs(report.mean) <= 4.0 * report.mean_std_err &&
            std::abs(report.second_moment - variance) <=
                4.0 * report.second_moment_std_err;
  for (std::size_t i = 0; i < n_cash; ++i) {
    report.cash_freq[i] = sample_mean(w_ind[i]);
    report.cash_freq_std_err[i] = standard_error(w_ind[i]);
    ok = ok && std::abs(report.cash_freq[i] - model.cash_probs[i]) <=
                   4.0 * report.cash_freq_std_err[i] + 1e-15;
  }
  report.pass = ok;
  return report;
}

namespace {

/// Limits of the constant-rate call price as the rate goes to 0 / infinity.
void bhm_price_limits(const MarketModel& tmpl, const OptionSpec& spec,
                      double& lo, double& hi) {
  const double p0t = discount(tmpl, 0.0, spec.maturity);
  const double ptt = discount(tmpl, spec.maturity, tmpl.horizon);
  lo = p0t * std::max(0.0, ptt * tmpl.prior_mean_cash() - spec.strike);
  hi = 0.0;
  for (std::size_t i = 0; i < tmpl.n_cash(); ++i) {
    hi += tmpl.cash_probs[i] * std::max(0.0, ptt * tmpl.cash_values[i] - spec.strike);
  }
  hi *= p0t;
}

MarketModel with_flow(const MarketModel& tmpl, double sigma) {
  return MarketModel(tmpl.cash_values, tmpl.cash_probs, {sigma}, {1.0},
                     tmpl.horizon, tmpl.short_rate);
}

}  // namespace

double implied_bhm_sigma(const MarketModel& bhm_template, const OptionSpec& spec,
                         double target_price) {
  if (bhm_template.n_flow() != 1) {
    throw InvalidModel("implied_bhm_sigma: template must carry a single flow value");
  }
  check_spec(bhm_template, spec);
  const double ptt = discount(bhm_template, spec.maturity, bhm_template.horizon);
  if (!(spec.strike > ptt * bhm_template.cash_values.front() &&
        spec.strike < ptt * bhm_template.cash_values.back())) {
    // Degenerate strike: the price does not depend on the rate at all.
    throw TargetOutOfRange("implied_bhm_sigma: strike outside the attainable interval");
  }
  double limit_lo = 0.0, limit_hi = 0.0;
  bhm_price_limits(bhm_template, spec, limit_lo, limit_hi);
  if (!(target_price > limit_lo && target_price < limit_hi)) {
    throw TargetOutOfRange("implied_bhm_sigma: target outside the attainable price range");
  }

  const auto price_at = [&](double sigma) {
    return call_price_closed(with_flow(bhm_template, sigma), spec);
  };

  double seed_sigma = std::abs(bhm_template.flow_values[0]);
  if (!(seed_sigma > 0.0)) seed_sigma = 1.0;

  double lo = seed_sigma, hi = seed_sigma;
  int iter = 0;
  while (price_at(lo) > target_price) {
    lo *= 0.5;
    if (++iter > kMaxExpansions) {
      throw NoConvergence("implied_bhm_sigma: lower bracket search failed");
    }
  }
  iter = 0;
  while (price_at(hi) < target_price) {
    hi *= 2.0;
    if (++iter > kMaxExpansions) {
      throw NoConvergence("implied_bhm_sigma: upper bracket search failed");
    }
  }
  iter = 0;
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (price_at(mid) < target_price) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (++iter > kMaxBisections) {
      throw NoConvergence("implied_bhm_sigma: bisection failed to converge");
    }
  }
  const double sigma = 0.5 * (lo + hi);
  if (std::abs(price_at(sigma) - target_price) > 1e-10) {
    throw NoConvergence("implied_bhm_sigma: residual above price tolerance");
  }
  return sigma;
}

VolSurface vol_surface(const MarketModel& model,
                       const std::vector<double>& strikes,
                       const std::vector<double>& maturities,
                       const MarketModel& bhm_template, unsigned threads) {
  VolSurface surface;
  surface.strikes = strikes;
  surface.maturities = maturities;
  const std::size_t n_nodes = strikes.size() * maturities.size();
  surface.price.assign(n_nodes, std::numeric_limits<double>::quiet_NaN());
  surface.implied_sigma.assign(n_nodes, std::numeric_limits<double>::quiet_NaN());
  surface.converged.assign(n_nodes, 0);

  parallel_for(n_nodes, threads, [&](std::size_t node) {
    const double maturity = maturities[node / strikes.size()];
    const double strike = strikes[node % strikes.size()];
    try {
      const OptionSpec spec(maturity, strike);
      const double price = call_price_closed(model, spec);
      surface.price[node] = price;
      surface.implied_sigma[node] = implied_bhm_sigma(bhm_template, spec, price);
      surface.converged[node] = 1;
    } catch (const Error&) {
      // leave the node flagged as not converged
    }
  });
  return surface;
}

void write_surface_csv(const VolSurface& surface,
                       const std::filesystem::path& file) {
  CsvWriter csv(file, {"maturity", "strike", "price", "implied_sigma", "converged"});
  for (std::size_t mi = 0; mi < surface.maturities.size(); ++mi) {
    for (std::size_t si = 0; si < surface.strikes.size(); ++si) {
      const std::size_t node = mi * surface.strikes.size() + si;
      csv.row(surface.maturities[mi], surface.strikes[si], surface.price[node],
              surface.implied_sigma[node],
              static_cast<std::int64_t>(surface.converged[node]));
    }
  }
}

}  // namespace infoflow
