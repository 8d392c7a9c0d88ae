#include "infoflow/runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "infoflow/csv.hpp"
#include "infoflow/dynamics.hpp"
#include "infoflow/errors.hpp"
#include "infoflow/fisher.hpp"
#include "infoflow/manipulation.hpp"
#include "infoflow/market_model.hpp"
#include "infoflow/mutual_information.hpp"
#include "infoflow/options.hpp"
#include "infoflow/paths.hpp"
#include "infoflow/posterior.hpp"
#include "infoflow/rng.hpp"
#include "infoflow/version.hpp"

namespace infoflow {

namespace {

using nlohmann::json;

struct ExperimentContext {
  std::string experiment;
  MarketModel model;
  std::size_t grid_steps = kDefaultGridSteps;
  double terminal_cutoff = kDefaultTerminalCutoff;
  std::size_t mc_paths = 5000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  json config;
  std::filesystem::path out_dir;
  std::vector<std::string> outputs;
};

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path output_path(ExperimentContext& ctx, const std::string& name) {
  const std::string file = ctx.experiment + "_" + name + ".csv";
  ctx.outputs.push_back(file);
  return ctx.out_dir / file;
}

TimeGrid make_grid(const ExperimentContext& ctx) {
  return TimeGrid::uniform(ctx.model.horizon, ctx.grid_steps, ctx.terminal_cutoff);
}

const json& require_section(const json& config, const char* key) {
  if (!config.contains(key)) {
    throw ConfigError(std::string("config is missing the \"") + key + "\" section");
  }
  return config.at(key);
}

void run_simulate(ExperimentContext& ctx) {
  const TimeGrid grid = make_grid(ctx);
  const PathEnsemble ensemble =
      make_ensemble(ctx.model, grid, ctx.mc_paths, ctx.seed, ctx.threads);
  write_ensemble_csv(ensemble, output_path(ctx, "paths"));

  CsvWriter prices(output_path(ctx, "prices"), {"path_id", "t", "price"});
  for (std::size_t j = 0; j < ensemble.n_paths(); ++j) {
    const std::vector<double> series = price_series(ensemble.paths[j], ctx.model);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      prices.row(j, grid[g], series[g]);
    }
  }

  const VolDiagnostics diag = ensemble_volatility(ensemble, ctx.model, 11, ctx.threads);
  CsvWriter vol(output_path(ctx, "voldiag"), {"t", "mean_vol", "vol_of_vol"});
  for (std::size_t g = 0; g < grid.size(); ++g) {
    vol.row(grid[g], diag.mean_vol[g], diag.vol_of_vol[g]);
  }
}

void run_volatility(ExperimentContext& ctx) {
  std::vector<std::vector<double>> sweep;
  if (ctx.config.contains("volatility") &&
      ctx.config.at("volatility").contains("flow_probs_sweep")) {
    sweep = ctx.config.at("volatility")
                .at("flow_probs_sweep")
                .get<std::vector<std::vector<double>>>();
  } else {
    sweep.push_back(ctx.model.flow_probs);
  }

  const TimeGrid grid = make_grid(ctx);
  CsvWriter members(output_path(ctx, "sweep"),
                    {"sweep_id", "flow_index", "flow_value", "flow_prob"});
  CsvWriter vol(output_path(ctx, "voldiag"),
                {"sweep_id", "t", "mean_vol", "vol_of_vol"});
  for (std::size_t s = 0; s < sweep.size(); ++s) {
    const MarketModel variant(ctx.model.cash_values, ctx.model.cash_probs,
                              ctx.model.flow_values, sweep[s], ctx.model.horizon,
                              ctx.model.short_rate);
    for (std::size_t k = 0; k < variant.n_flow(); ++k) {
      members.row(s, k, variant.flow_values[k], variant.flow_probs[k]);
    }
    const PathEnsemble ensemble =
        make_ensemble(variant, grid, ctx.mc_paths, Rng::substream(ctx.seed, s),
                      ctx.threads);
    const VolDiagnostics diag = ensemble_volatility(ensemble, variant, 11, ctx.threads);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      vol.row(s, grid[g], diag.mean_vol[g], diag.vol_of_vol[g]);
    }
  }
}

void run_fisher(ExperimentContext& ctx) {
  const json& section = require_section(ctx.config, "fisher");
  const auto sigmas = section.at("sigmas").get<std::vector<double>>();
  const auto times = section.at("times").get<std::vector<double>>();
  const std::size_t paths = section.value("paths", ctx.mc_paths);
  const FisherCurve curve =
      fisher_curve(ctx.model, sigmas, times, paths, ctx.seed, ctx.threads);
  write_fisher_csv(curve, output_path(ctx, "curve"));
}

void run_mutual_info(ExperimentContext& ctx) {
  const json& section = require_section(ctx.config, "mutual_info");
  const auto times = section.at("times").get<std::vector<double>>();
  CsvWriter csv(output_path(ctx, "curve"),
                {"t", "J_quadrature", "J_entropy", "std_err"});
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double jq = mutual_info_quadrature(ctx.model, times[j]);
    const MonteCarloEstimate je = mutual_info_entropy(
        ctx.model, times[j], ctx.mc_paths, Rng::substream(ctx.seed, j), ctx.threads);
    csv.row(times[j], jq, je.value, je.std_err);
  }
}

void run_price(ExperimentContext& ctx) {
  const json& section = require_section(ctx.config, "option");
  const OptionSpec spec(section.at("maturity").get<double>(),
                        section.at("strike").get<double>());
  const double closed = call_price_closed(ctx.model, spec);
  const MonteCarloEstimate mc =
      call_price_mc(ctx.model, spec, ctx.mc_paths, ctx.seed, ctx.threads);
  double xi_star = std::numeric_limits<double>::quiet_NaN();
  try {
    xi_star = critical_information(ctx.model, spec);
  } catch (const Error&) {
    // degenerate strike: no critical value
  }
  CsvWriter csv(output_path(ctx, "option"),
                {"maturity", "strike", "price_closed", "price_mc", "mc_std_err",
                 "critical_information"});
  csv.row(spec.maturity, spec.strike, closed, mc.value, mc.std_err, xi_star);
}

void run_surface(ExperimentContext& ctx) {
  const json& section = require_section(ctx.config, "surface");
  const auto strikes = section.at("strikes").get<std::vector<double>>();
  const auto maturities = section.at("maturities").get<std::vector<double>>();
  const double sigma_init = section.at("bhm_sigma_init").get<double>();
  const MarketModel bhm_template(ctx.model.cash_values, ctx.model.cash_probs,
                                 {sigma_init}, {1.0}, ctx.model.horizon,
                                 ctx.model.short_rate);
  const VolSurface surface =
      vol_surface(ctx.model, strikes, maturities, bhm_template, ctx.threads);
  write_surface_csv(surface, output_path(ctx, "nodes"));
}

void run_manipulate(ExperimentContext& ctx) {
  const json& section = require_section(ctx.config, "manipulation");
  const double true_sigma = section.at("true_sigma").get<double>();
  const double believed_sigma = section.at("believed_sigma").get<double>();
  const double condition_cash =
      section.value("condition_cash", ctx.model.cash_values.back());

  const MarketModel model_true(ctx.model.cash_values, ctx.model.cash_probs,
                               {true_sigma}, {1.0}, ctx.model.horizon,
                               ctx.model.short_rate);
  const TimeGrid grid = make_grid(ctx);
  const ConjugatePaths paths = conjugate_paths(model_true, believed_sigma, grid,
                                               ctx.mc_paths, ctx.seed, ctx.threads);
  const ManipulationReport report = manipulation_report(paths, condition_cash);
  write_conjugate_paths_csv(paths, output_path(ctx, "paths"));
  write_skew_csv(paths, report, output_path(ctx, "skew"));
}

int run_validate(ExperimentContext& ctx, const MeasurabilityReport& report,
                 bool strict, std::ostream& log) {
  CsvWriter csv(output_path(ctx, "collisions"),
                {"cash_i", "flow_k", "cash_j", "flow_l", "cash_value_i",
                 "flow_value_k", "cash_value_j", "flow_value_l",
                 "terminal_product"});
  for (const Collision& c : report.collisions) {
    csv.row(c.cash_i, c.flow_k, c.cash_j, c.flow_l,
            ctx.model.cash_values[c.cash_i], ctx.model.flow_values[c.flow_k],
            ctx.model.cash_values[c.cash_j], ctx.model.flow_values[c.flow_l],
            c.terminal_product);
  }
  if (report.is_measurable) {
    log << "model is measurable: terminal information determines the cash flow\n";
    return kExitOk;
  }
  return strict ? kExitValidation : kExitOk;
}

void print_collisions(const ExperimentContext& ctx,
                      const MeasurabilityReport& report, std::ostream& log) {
  log << "measurability violation: " << report.collisions.size()
      << " colliding terminal-information pair(s)\n";
  for (const Collision& c : report.collisions) {
    log << "  (cash=" << ctx.model.cash_values[c.cash_i]
        << ", flow=" << ctx.model.flow_values[c.flow_k] << ") vs (cash="
        << ctx.model.cash_values[c.cash_j]
        << ", flow=" << ctx.model.flow_values[c.flow_l]
        << ") share terminal information " << c.terminal_product << "\n";
  }
}

void write_manifest(const ExperimentContext& ctx, const std::string& config_hash,
                    double wall_seconds) {
  json manifest{{"experiment", ctx.experiment},
                {"config_hash", config_hash},
                {"seed", ctx.seed},
                {"paths", ctx.mc_paths},
                {"threads", ctx.threads},
                {"version", kVersion},
                {"wall_time_seconds", wall_seconds},
                {"outputs", ctx.outputs}};
  std::ofstream out(ctx.out_dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << "\n";
}

}  // namespace

int run_experiment(const std::filesystem::path& config_path,
                   const std::filesystem::path& out_dir,
                   const RunOverrides& overrides, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentContext ctx;
  std::string config_hash;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + config_path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();
    config_hash = fnv1a_hex(bytes);

    json config;
    try {
      config = json::parse(bytes);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ctx.config = config;
    ctx.out_dir = out_dir;

    try {
      ctx.experiment = overrides.experiment.value_or(
          config.at("experiment").get<std::string>());
      ctx.model = require_section(config, "model").get<MarketModel>();
      if (config.contains("grid")) {
        ctx.grid_steps = config.at("grid").value("steps", ctx.grid_steps);
        ctx.terminal_cutoff =
            config.at("grid").value("terminal_cutoff", ctx.terminal_cutoff);
      }
      if (config.contains("mc")) {
        ctx.mc_paths = config.at("mc").value("paths", ctx.mc_paths);
        ctx.seed = config.at("mc").value("seed", ctx.seed);
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config field error: ") + e.what());
    }
    if (overrides.seed) ctx.seed = *overrides.seed;
    if (overrides.paths) ctx.mc_paths = *overrides.paths;
    ctx.threads = overrides.threads;

    std::filesystem::create_directories(out_dir);

    const MeasurabilityReport measurability = validate_measurability(ctx.model);
    if (!measurability.is_measurable) print_collisions(ctx, measurability, log);

    if (ctx.experiment == "validate") {
      const int code = run_validate(ctx, measurability, overrides.strict, log);
      write_manifest(ctx, config_hash,
                     std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count());
      return code;
    }
    if (!measurability.is_measurable && overrides.strict) {
      log << "refusing to run '" << ctx.experiment
          << "' on a non-measurable model (strict mode)\n";
      return kExitValidation;
    }

    try {
      if (ctx.experiment == "simulate") {
        run_simulate(ctx);
      } else if (ctx.experiment == "volatility") {
        run_volatility(ctx);
      } else if (ctx.experiment == "fisher") {
        run_fisher(ctx);
      } else if (ctx.experiment == "mutual-info") {
        run_mutual_info(ctx);
      } else if (ctx.experiment == "price") {
        run_price(ctx);
      } else if (ctx.experiment == "surface") {
        run_surface(ctx);
      } else if (ctx.experiment == "manipulate") {
        run_manipulate(ctx);
      } else {
        throw ConfigError("unknown experiment: " + ctx.experiment);
      }
    } catch (const json::exception& e) {
      // Missing or mistyped fields inside an experiment section.
      throw ConfigError(std::string("config field error: ") + e.what());
    }
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InvalidModel& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(ctx, config_hash, wall);
  for (const std::string& f : ctx.outputs) log << "wrote " << f << "\n";
  return kExitOk;
}

}  // namespace infoflow
