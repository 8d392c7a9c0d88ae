#include "infoflow/paths.hpp"

#include <cmath>

#include "infoflow/csv.hpp"
#include "infoflow/errors.hpp"
#include "infoflow/parallel.hpp"
#include "infoflow/rng.hpp"

namespace infoflow {

TimeGrid::TimeGrid(std::vector<double> pts) : points(std::move(pts)) {
  if (points.empty()) throw BadInterval("TimeGrid: empty grid");
  if (points.front() != 0.0) throw BadInterval("TimeGrid: first point must be 0");
  for (std::size_t j = 1; j < points.size(); ++j) {
    if (!(points[j] > points[j - 1])) {
      throw BadInterval("TimeGrid: points must be strictly increasing");
    }
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps,
                           double terminal_cutoff) {
  if (!(horizon > 0.0)) throw BadInterval("TimeGrid: horizon must be positive");
  if (!(terminal_cutoff >= 0.0 && terminal_cutoff < 1.0)) {
    throw BadInterval("TimeGrid: terminal_cutoff must lie in [0, 1)");
  }
  if (steps == 0) return TimeGrid(std::vector<double>{0.0});
  const double t_max = (1.0 - terminal_cutoff) * horizon;
  std::vector<double> pts(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    pts[j] = t_max * (static_cast<double>(j) / static_cast<double>(steps));
  }
  return TimeGrid(std::move(pts));
}

std::vector<double> sample_bridge(double horizon, const TimeGrid& grid,
                                  std::uint64_t seed) {
  if (!(grid.back() < horizon)) {
    throw TimeAtOrPastHorizon("sample_bridge: grid reaches the horizon");
  }
  Rng rng(seed);
  std::vector<double> b(grid.size());
  b[0] = 0.0;
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double s = grid[j - 1];
    const double t = grid[j];
    const double mean = b[j - 1] * (horizon - t) / (horizon - s);
    const double var = (t - s) * (horizon - t) / (horizon - s);
    b[j] = mean + std::sqrt(var) * rng.next_gaussian();
  }
  return b;
}

namespace {

std::size_t draw_index(const std::vector<double>& probs, double u) {
  // u in (0, 1]: the first index whose cumulative probability reaches u.
  // Zero-probability entries are never selected.
  double cum = 0.0;
  std::size_t last_positive = 0;
  bool seen_positive = false;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) {
      last_positive = i;
      seen_positive = true;
    }
    cum += probs[i];
    if (u <= cum && probs[i] > 0.0) return i;
  }
  if (!seen_positive) throw InvalidModel("draw_index: all probabilities are zero");
  return last_positive;  // u fell into the roundoff sliver above the last cum
}

}  // namespace

double draw_cash(const MarketModel& model, Rng& rng) {
  return model.cash_values[draw_index(model.cash_probs, rng.next_uniform())];
}

double draw_flow(const MarketModel& model, Rng& rng) {
  return model.flow_values[draw_index(model.flow_probs, rng.next_uniform())];
}

std::pair<double, double> sample_scenario(const MarketModel& model,
                                          std::uint64_t seed) {
  Rng rng(seed);
  const double cash = draw_cash(model, rng);
  const double flow = draw_flow(model, rng);
  return {cash, flow};
}

InfoPath information_path(const MarketModel& model, const TimeGrid& grid,
                          std::uint64_t seed) {
  InfoPath path;
  path.seed = seed;
  path.grid = grid;
  const auto [cash, flow] = sample_scenario(model, Rng::substream(seed, 0));
  path.scenario_cash = cash;
  path.scenario_flow = flow;
  path.bridge = sample_bridge(model.horizon, grid, Rng::substream(seed, 1));
  path.xi.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    path.xi[j] = flow * cash * grid[j] + path.bridge[j];
  }
  return path;
}

PathEnsemble make_ensemble(const MarketModel& model, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t master_seed,
                           unsigned threads) {
  if (n_paths == 0) throw TooFewPaths("make_ensemble: n_paths must be >= 1");
  PathEnsemble ensemble;
  ensemble.grid = grid;
  ensemble.master_seed = master_seed;
  ensemble.paths.resize(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t j) {
    ensemble.paths[j] = information_path(model, grid, Rng::substream(master_seed, j));
  });
  return ensemble;
}

void write_ensemble_csv(const PathEnsemble& ensemble,
                        const std::filesystem::path& file) {
  CsvWriter csv(file, {"path_id", "t", "xi", "bridge", "scenario_cash",
                       "scenario_flow"});
  for (std::size_t j = 0; j < ensemble.n_paths(); ++j) {
    const InfoPath& p = ensemble.paths[j];
    for (std::size_t g = 0; g < p.grid.size(); ++g) {
      csv.row(j, p.grid[g], p.xi[g], p.bridge[g], p.scenario_cash,
              p.scenario_flow);
    }
  }
}

}  // namespace infoflow
