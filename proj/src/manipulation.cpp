#include "infoflow/manipulation.hpp"

#include <cmath>

#include "infoflow/csv.hpp"
#include "infoflow/dynamics.hpp"
#include "infoflow/errors.hpp"
#include "infoflow/parallel.hpp"
#include "infoflow/rng.hpp"

namespace infoflow {

ConjugatePaths conjugate_paths(const MarketModel& model_true, double believed_flow,
                               const TimeGrid& grid, std::size_t n_paths,
                               std::uint64_t master_seed, unsigned threads) {
  if (model_true.n_flow() != 1) {
    throw InvalidModel("conjugate_paths: the true model must carry a single flow value");
  }
  if (n_paths == 0) throw TooFewPaths("conjugate_paths: n_paths must be >= 1");

  const MarketModel model_believed(model_true.cash_values, model_true.cash_probs,
                                   {believed_flow}, {1.0}, model_true.horizon,
                                   model_true.short_rate);

  ConjugatePaths out;
  out.grid = grid;
  out.horizon = model_true.horizon;
  out.true_flow = model_true.flow_values[0];
  out.believed_flow = believed_flow;
  out.scenario_cash.assign(n_paths, 0.0);
  out.price_true.resize(n_paths);
  out.price_believed.resize(n_paths);

  parallel_for(n_paths, threads, [&](std::size_t j) {
    const InfoPath path = information_path(model_true, grid, Rng::substream(master_seed, j));
    out.scenario_cash[j] = path.scenario_cash;
    out.price_true[j] = price_series(path, model_true);
    out.price_believed[j] = price_series(path, model_believed);
  });
  return out;
}

ManipulationReport manipulation_report(const ConjugatePaths& paths,
                                       double condition_cash) {
  if (paths.n_paths() < 1000) {
    throw TooFewPaths("manipulation_report: at least 1000 paths are required");
  }
  std::vector<std::size_t> selected;
  for (std::size_t j = 0; j < paths.n_paths(); ++j) {
    if (paths.scenario_cash[j] == condition_cash) selected.push_back(j);
  }
  if (selected.size() < 30) {
    throw TooFewPaths("manipulation_report: fewer than 30 paths realize the conditioned cash value");
  }

  std::vector<std::vector<double>> sel_true(selected.size());
  std::vector<std::vector<double>> sel_believed(selected.size());
  for (std::size_t s = 0; s < selected.size(); ++s) {
    sel_true[s] = paths.price_true[selected[s]];
    sel_believed[s] = paths.price_believed[selected[s]];
  }

  ManipulationReport report;
  report.condition_cash = condition_cash;
  report.n_conditioned = selected.size();
  report.skew_true = pointwise_skewness(sel_true);
  report.skew_believed = pointwise_skewness(sel_believed);

  std::size_t all_count = 0, all_opposite = 0;
  std::size_t interior_count = 0, interior_opposite = 0;
  const double lo = 0.2 * paths.horizon;
  const double hi = 0.8 * paths.horizon;
  for (std::size_t g = 0; g < paths.grid.size(); ++g) {
    const double a = report.skew_true[g];
    const double b = report.skew_believed[g];
    if (!std::isfinite(a) || !std::isfinite(b)) continue;
    const bool opposite = a * b < 0.0;
    ++all_count;
    all_opposite += opposite ? 1 : 0;
    if (paths.grid[g] >= lo && paths.grid[g] <= hi) {
      ++interior_count;
      interior_opposite += opposite ? 1 : 0;
    }
  }
  report.opposite_sign_fraction_all =
      all_count == 0 ? 0.0 : static_cast<double>(all_opposite) / all_count;
  report.opposite_sign_fraction_interior =
      interior_count == 0 ? 0.0
                          : static_cast<double>(interior_opposite) / interior_count;
  return report;
}

void write_conjugate_paths_csv(const ConjugatePaths& paths,
                               const std::filesystem::path& file) {
  CsvWriter csv(file, {"path_id", "t", "price_true", "price_believed"});
  for (std::size_t j = 0; j < paths.n_paths(); ++j) {
    for (std::size_t g = 0; g < paths.grid.size(); ++g) {
      csv.row(j, paths.grid[g], paths.price_true[j][g], paths.price_believed[j][g]);
    }
  }
}

void write_skew_csv(const ConjugatePaths& paths, const ManipulationReport& report,
                    const std::filesystem::path& file) {
  CsvWriter csv(file, {"t", "skew_true", "skew_believed"});
  for (std::size_t g = 0; g < paths.grid.size(); ++g) {
    csv.row(paths.grid[g], report.skew_true[g], report.skew_believed[g]);
  }
}

}  // namespace infoflow
