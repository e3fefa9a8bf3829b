#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eigenmc/metrics.hpp"
#include "eigenmc/simulate.hpp"
#include "eigenmc/stationary.hpp"
#include "eigenmc/transition.hpp"

namespace eigenmc {

// How the reference distribution for convergence curves is formed.
//   final_matrix:     steady state of the cumulative matrix after all N paths.
//   snapshot_average: mean of the per-snapshot steady states.
enum class BaselineMode { final_matrix, snapshot_average };

const char* to_string(BaselineMode m) noexcept;

struct HarnessOptions {
  int replications = 1;
  SolverKind solver = SolverKind::eigen;
  Repair repair = Repair::restrict_touched;
  BaselineMode baseline = BaselineMode::final_matrix;
  bool metric_paper_w = true;
  bool metric_w1 = true;
  bool exact_snapshots = false;
  PowerOptions power;
  unsigned n_workers = 0;      // replication-level parallelism; 0 = hardware
  bool dump_paths = false;     // stream primary-replication paths to paths.csv
  std::string out_dir;         // only used for streamed dumps; may be empty
};

struct ExperimentConfig {
  SimulationConfig sim;
  HarnessOptions harness;
};

// One emitted row of the convergence curve (distances vs the baseline).
struct SnapshotRow {
  std::int64_t n_paths = 0;
  double paper_w = 0.0;
  double w1 = 0.0;
  bool converged = false;
  double lambda_max = 0.0;
};

// Mean +/- one standard deviation of the distance across replications.
struct BandRow {
  std::int64_t n_paths = 0;
  double mean_paper_w = 0.0;
  double std_paper_w = 0.0;
  double mean_w1 = 0.0;
  double std_w1 = 0.0;
};

struct PhaseTimes {
  double simulate_accumulate_s = 0.0;  // summed over replications
  double solve_s = 0.0;
  double total_s = 0.0;
};

struct ExperimentResult {
  SimulationConfig config;
  HarnessOptions options;
  std::string kind;  // "binomial" | "diffusion"

  DistributionVector baseline;                  // primary replication
  std::vector<SnapshotRow> curve_rows;          // primary replication (binomial)
  std::vector<ConvergenceCurve> curves;         // per enabled metric
  std::vector<BandRow> bands;                   // when replications > 1

  DistributionVector classic_dist;              // primary replication
  DistributionVector eigen_dist;                // primary replication
  double price_classic = 0.0;
  double price_eigen = 0.0;

  std::optional<VarianceReport> variance_eigen;    // across converged replications
  std::optional<VarianceReport> variance_classic;  // across all replications
  double variance_ratio = 0.0;                     // eigen total / classic total

  std::vector<SolverReport> replication_reports;   // final solve per replication
  std::vector<int> non_converged_replications;
  std::vector<std::uint64_t> replication_seeds;

  std::optional<TransitionCounts> final_counts;    // primary replication
  std::optional<StochasticMatrix> final_matrix;    // primary replication
  PhaseTimes runtimes;
};

// Snapshot indices at which the cumulative matrix is re-solved: every path up
// to 1000, then 24 log-spaced points per decade, always ending at n_total.
std::vector<std::int64_t> snapshot_schedule(std::int64_t n_total, bool exact);

ExperimentResult run_binomial_experiment(const ExperimentConfig& config);
ExperimentResult run_diffusion_experiment(const ExperimentConfig& config);

struct SweepSpec {
  ExperimentConfig base;
  std::vector<std::int64_t> paths;
  std::vector<int> horizons;
  std::vector<int> grid_states;
  std::vector<double> sigmas;
  std::vector<double> mus;
};

struct SweepCell {
  int index = 0;
  std::map<std::string, double> params;  // swept parameter values
  bool skipped = false;
  std::string skip_reason;
  std::optional<ExperimentResult> result;
};

// Cross-product over the non-empty ranges; infeasible combinations are
// returned as skipped cells. Throws std::invalid_argument when nothing is
// swept. Cell i runs under sweep_cell_seed(base master seed, i).
std::vector<SweepCell> run_sweep(const SweepSpec& spec);

}  // namespace eigenmc
