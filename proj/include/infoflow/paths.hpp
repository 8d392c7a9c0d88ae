#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "infoflow/market_model.hpp"

namespace infoflow {

inline constexpr double kDefaultTerminalCutoff = 0.004;
inline constexpr std::size_t kDefaultGridSteps = 500;

/// Strictly increasing evaluation times starting at 0. Grids are kept away
/// from the horizon (default cutoff 0.004, i.e. last point 0.996 T): the
/// conditional formulas carry a T/(T-t) exponent that degenerates at T.
struct TimeGrid {
  std::vector<double> points;

  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> pts);

  static TimeGrid uniform(double horizon, std::size_t steps = kDefaultGridSteps,
                          double terminal_cutoff = kDefaultTerminalCutoff);

  std::size_t size() const { return points.size(); }
  double operator[](std::size_t j) const { return points[j]; }
  double back() const { return points.back(); }
};

/// One realized scenario: the drawn cash flow and flow rate, the sampled
/// noise bridge, and the resulting information values
///   xi[j] = scenario_flow * scenario_cash * t_j + bridge[j],
/// which holds exactly, by construction, at every grid point.
struct InfoPath {
  double scenario_cash = 0.0;
  double scenario_flow = 0.0;
  TimeGrid grid;
  std::vector<double> xi;
  std::vector<double> bridge;
  std::uint64_t seed = 0;
};

/// Exact forward sampling of a standard Brownian bridge on [0, horizon] at
/// the grid times: given the value b at time s, the value at t > s is
/// Normal(b (T-t)/(T-s), (t-s)(T-t)/(T-s)). Identical (seed, grid) inputs
/// give bit-identical output.
std::vector<double> sample_bridge(double horizon, const TimeGrid& grid,
                                  std::uint64_t seed);

/// Independent draw of (cash value, flow value) from the model priors.
std::pair<double, double> sample_scenario(const MarketModel& model,
                                          std::uint64_t seed);

class Rng;  // rng.hpp

/// Single draws from the model priors using an existing generator (one
/// uniform each). Zero-probability entries are never selected.
double draw_cash(const MarketModel& model, Rng& rng);
double draw_flow(const MarketModel& model, Rng& rng);

/// Scenario plus bridge composed into an information path. The scenario and
/// the bridge use decorrelated substreams derived from `seed` (tags 0 and 1).
InfoPath information_path(const MarketModel& model, const TimeGrid& grid,
                          std::uint64_t seed);

struct PathEnsemble {
  TimeGrid grid;
  std::vector<InfoPath> paths;
  std::uint64_t master_seed = 0;

  std::size_t n_paths() const { return paths.size(); }
};

/// Path j draws from Rng::substream(master_seed, j); results are stored by
/// path index, so the ensemble is identical across runs and across any
/// degree of parallelism.
PathEnsemble make_ensemble(const MarketModel& model, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t master_seed,
                           unsigned threads = 0);

/// Columns: path_id,t,xi,bridge,scenario_cash,scenario_flow.
void write_ensemble_csv(const PathEnsemble& ensemble,
                        const std::filesystem::path& file);

}  // namespace infoflow
