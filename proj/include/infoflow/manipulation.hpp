#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "infoflow/market_model.hpp"
#include "infoflow/paths.hpp"

namespace infoflow {

/// Paired price paths from one shared simulation: each path's scenario and
/// bridge are drawn under the true model (a single true flow rate), and the
/// same information path is then priced twice -- once with the true rate and
/// once under the falsely believed rate. Both price processes are
/// deterministic functions of (t, xi_t). Matrices are [path][time].
struct ConjugatePaths {
  TimeGrid grid;
  double horizon = 0.0;
  double true_flow = 0.0;
  double believed_flow = 0.0;
  std::vector<double> scenario_cash;
  std::vector<std::vector<double>> price_true;
  std::vector<std::vector<double>> price_believed;

  std::size_t n_paths() const { return scenario_cash.size(); }
};

/// Conditional skew curves of the two price processes and how often their
/// signs disagree. opposite_sign_fraction_* count grid points where both
/// skews are finite and of strictly opposite sign; the interior variant
/// restricts to t in [0.2 T, 0.8 T].
struct ManipulationReport {
  double condition_cash = 0.0;
  std::size_t n_conditioned = 0;
  std::vector<double> skew_true;
  std::vector<double> skew_believed;
  double opposite_sign_fraction_all = 0.0;
  double opposite_sign_fraction_interior = 0.0;
};

/// The believed rate may be negative or zero; the true model must carry a
/// single flow value. The prior cash law is shared by both pricings.
ConjugatePaths conjugate_paths(const MarketModel& model_true, double believed_flow,
                               const TimeGrid& grid, std::size_t n_paths,
                               std::uint64_t master_seed, unsigned threads = 0);

/// Requires at least 1000 simulated paths and at least 30 paths realizing
/// condition_cash (TooFewPaths otherwise).
ManipulationReport manipulation_report(const ConjugatePaths& paths,
                                       double condition_cash);

/// Columns: path_id,t,price_true,price_believed.
void write_conjugate_paths_csv(const ConjugatePaths& paths,
                               const std::filesystem::path& file);

/// Columns: t,skew_true,skew_believed.
void write_skew_csv(const ConjugatePaths& paths, const ManipulationReport& report,
                    const std::filesystem::path& file);

}  // namespace infoflow
