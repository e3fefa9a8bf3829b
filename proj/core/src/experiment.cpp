#include "eigenmc/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

#include "eigenmc/io.hpp"
#include "eigenmc/rng.hpp"

namespace eigenmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReplicationOutput {
  std::vector<SnapshotRow> rows;
  DistributionVector classic;
  DistributionVector steady;
  DistributionVector baseline;
  SolverReport report;
  double price_classic = 0.0;
  double price_eigen = 0.0;
  std::optional<TransitionCounts> counts;
  std::optional<StochasticMatrix> matrix;
  double sim_s = 0.0;
  double solve_s = 0.0;
};

template <typename PathFn>
void stream_paths(const SimulationConfig& sim, PathFn&& per_path) {
  for (std::int64_t k = 0; k < sim.n_paths; ++k) {
    per_path(k, simulate_path(sim, path_seed(sim.master_seed, k)));
  }
}

DistributionVector histogram_from_tallies(const std::vector<std::int64_t>& tally,
                                          std::int64_t n_paths) {
  std::vector<double> mass(tally.size(), 0.0);
  for (std::size_t i = 0; i < tally.size(); ++i) {
    mass[i] = static_cast<double>(tally[i]) / static_cast<double>(n_paths);
  }
  return DistributionVector{std::move(mass), Provenance::terminal_histogram};
}

ReplicationOutput run_binomial_replication(const SimulationConfig& sim,
                                           const HarnessOptions& harness,
                                           std::ostream* path_dump) {
  ReplicationOutput out;
  const auto schedule = snapshot_schedule(sim.n_paths, harness.exact_snapshots);

  // Pass 1: simulate and accumulate every intertemporal transition plus the
  // terminal tally. This is the phase whose wall clock scales linearly in N.
  TransitionCounts counts(sim.grid.size());
  std::vector<std::int64_t> terminal_tally(static_cast<std::size_t>(sim.grid.size()), 0);
  const auto t_sim = Clock::now();
  stream_paths(sim, [&](std::int64_t k, const Path& path) {
    counts.accumulate_path(path, sim.grid);
    ++terminal_tally[static_cast<std::size_t>(sim.grid.value_to_index(path.back()))];
    if (path_dump != nullptr) write_path_rows(*path_dump, k, path);
  });
  out.sim_s = seconds_since(t_sim);

  out.classic = histogram_from_tallies(terminal_tally, sim.n_paths);

  auto t_solve = Clock::now();
  StochasticMatrix final_matrix = normalize_rows(counts, harness.repair);
  StationaryResult final_solve = solve_stationary(final_matrix, harness.solver, harness.power);
  out.solve_s += seconds_since(t_solve);
  out.steady = final_solve.distribution;
  out.report = final_solve.report;

  // Baseline for the convergence curve.
  if (harness.baseline == BaselineMode::final_matrix) {
    out.baseline = out.steady;
  } else {
    // Mean of the per-snapshot steady states, accumulated in a dedicated pass.
    std::vector<double> mean(static_cast<std::size_t>(sim.grid.size()), 0.0);
    TransitionCounts acc(sim.grid.size());
    std::size_t si = 0;
    stream_paths(sim, [&](std::int64_t k, const Path& path) {
      acc.accumulate_path(path, sim.grid);
      if (si < schedule.size() && schedule[si] == k + 1) {
        ++si;
        const auto t0 = Clock::now();
        auto solved = solve_stationary(normalize_rows(acc, harness.repair), harness.solver,
                                       harness.power);
        out.solve_s += seconds_since(t0);
        for (std::size_t i = 0; i < mean.size(); ++i) {
          mean[i] += solved.distribution.probs[i];
        }
      }
    });
    for (double& m : mean) m /= static_cast<double>(schedule.size());
    out.baseline = DistributionVector{std::move(mean), Provenance::average};
  }

  // Pass 2: replay the same paths, solving the cumulative matrix at each
  // snapshot and recording distances to the baseline.
  {
    TransitionCounts acc(sim.grid.size());
    std::size_t si = 0;
    out.rows.reserve(schedule.size());
    stream_paths(sim, [&](std::int64_t k, const Path& path) {
      acc.accumulate_path(path, sim.grid);
      if (si < schedule.size() && schedule[si] == k + 1) {
        ++si;
        const auto t0 = Clock::now();
        auto solved = solve_stationary(normalize_rows(acc, harness.repair), harness.solver,
                                       harness.power);
        out.solve_s += seconds_since(t0);
        SnapshotRow row;
        row.n_paths = k + 1;
        row.paper_w =
            harness.metric_paper_w ? rms_distance(solved.distribution, out.baseline) : kNaN;
        row.w1 = harness.metric_w1
                     ? wasserstein1(solved.distribution, out.baseline, sim.grid)
                     : kNaN;
        row.converged = solved.report.converged;
        row.lambda_max = solved.report.lambda_max;
        out.rows.push_back(row);
      }
    });
  }

  out.price_classic = call_price(out.classic, sim.grid, sim.strike, sim.discount);
  out.price_eigen = call_price(out.steady, sim.grid, sim.strike, sim.discount);
  out.counts = std::move(counts);
  out.matrix = std::move(final_matrix);
  return out;
}

ReplicationOutput run_diffusion_replication(const SimulationConfig& sim,
                                            const HarnessOptions& harness,
                                            std::ostream* path_dump) {
  ReplicationOutput out;

  const auto t_sim = Clock::now();
  PathEnsemble ensemble = simulate_ensemble(sim, 1);
  TransitionCounts counts(sim.grid.size());
  for (const Path& path : ensemble.paths) counts.accumulate_path(path, sim.grid);
  out.sim_s = seconds_since(t_sim);

  if (path_dump != nullptr) {
    for (std::size_t k = 0; k < ensemble.paths.size(); ++k) {
      write_path_rows(*path_dump, static_cast<std::int64_t>(k), ensemble.paths[k]);
    }
  }

  out.classic = terminal_histogram(ensemble, sim.grid);

  const auto t_solve = Clock::now();
  StochasticMatrix matrix = normalize_rows(counts, harness.repair);
  StationaryResult solved = solve_stationary(matrix, harness.solver, harness.power);
  out.solve_s = seconds_since(t_solve);

  out.steady = solved.distribution;
  out.report = solved.report;
  out.baseline = out.steady;
  out.price_classic = call_price(out.classic, sim.grid, sim.strike, sim.discount);
  out.price_eigen = call_price(out.steady, sim.grid, sim.strike, sim.discount);
  out.counts = std::move(counts);
  out.matrix = std::move(matrix);
  return out;
}

ExperimentResult assemble(const ExperimentConfig& config, const char* kind) {
  config.sim.validate();
  if (config.harness.replications < 1) {
    throw std::invalid_argument("harness: replications must be at least 1");
  }
  const auto t_total = Clock::now();
  const bool binomial = config.sim.model == Model::binomial;
  const int reps = config.harness.replications;

  // Optional streamed path dump for the primary replication.
  std::ofstream dump_stream;
  std::ostream* dump = nullptr;
  if (config.harness.dump_paths && !config.harness.out_dir.empty()) {
    std::filesystem::create_directories(config.harness.out_dir);
    dump_stream.open(std::filesystem::path(config.harness.out_dir) / "paths.csv",
                     std::ios::trunc);
    if (!dump_stream) throw std::runtime_error("cannot open paths.csv for writing");
    write_paths_header(dump_stream);
    dump = &dump_stream;
  }

  std::vector<std::uint64_t> rep_seeds(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    rep_seeds[static_cast<std::size_t>(r)] =
        r == 0 ? config.sim.master_seed : replication_seed(config.sim.master_seed, r);
  }

  auto run_one = [&](int r) {
    SimulationConfig sim = config.sim;
    sim.master_seed = rep_seeds[static_cast<std::size_t>(r)];
    std::ostream* rep_dump = r == 0 ? dump : nullptr;
    return binomial ? run_binomial_replication(sim, config.harness, rep_dump)
                    : run_diffusion_replication(sim, config.harness, rep_dump);
  };

  std::vector<ReplicationOutput> outputs(static_cast<std::size_t>(reps));
  unsigned workers = config.harness.n_workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers <= 1 || reps == 1) {
    for (int r = 0; r < reps; ++r) outputs[static_cast<std::size_t>(r)] = run_one(r);
  } else {
    std::vector<std::future<ReplicationOutput>> futures;
    futures.reserve(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
      futures.push_back(std::async(std::launch::async, run_one, r));
    }
    for (int r = 0; r < reps; ++r) outputs[static_cast<std::size_t>(r)] = futures[r].get();
  }

  ExperimentResult result;
  result.config = config.sim;
  result.options = config.harness;
  result.kind = kind;
  result.replication_seeds = std::move(rep_seeds);

  for (auto& o : outputs) {
    result.replication_reports.push_back(o.report);
    result.runtimes.simulate_accumulate_s += o.sim_s;
    result.runtimes.solve_s += o.solve_s;
  }
  for (int r = 0; r < reps; ++r) {
    if (!outputs[static_cast<std::size_t>(r)].report.converged) {
      result.non_converged_replications.push_back(r);
    }
  }

  if (!outputs.front().rows.empty()) {
    if (config.harness.metric_paper_w) {
      ConvergenceCurve curve{Metric::paper_w, {}};
      for (const auto& row : outputs.front().rows) {
        curve.points.push_back({row.n_paths, row.paper_w});
      }
      result.curves.push_back(std::move(curve));
    }
    if (config.harness.metric_w1) {
      ConvergenceCurve curve{Metric::w1, {}};
      for (const auto& row : outputs.front().rows) {
        curve.points.push_back({row.n_paths, row.w1});
      }
      result.curves.push_back(std::move(curve));
    }
  }

  if (reps > 1 && !outputs.front().rows.empty()) {
    const std::size_t n_rows = outputs.front().rows.size();
    result.bands.reserve(n_rows);
    for (std::size_t j = 0; j < n_rows; ++j) {
      BandRow band;
      band.n_paths = outputs.front().rows[j].n_paths;
      double sum_pw = 0.0, sum_w1 = 0.0;
      for (const auto& o : outputs) {
        sum_pw += o.rows[j].paper_w;
        sum_w1 += o.rows[j].w1;
      }
      band.mean_paper_w = sum_pw / reps;
      band.mean_w1 = sum_w1 / reps;
      double ss_pw = 0.0, ss_w1 = 0.0;
      for (const auto& o : outputs) {
        ss_pw += (o.rows[j].paper_w - band.mean_paper_w) * (o.rows[j].paper_w - band.mean_paper_w);
        ss_w1 += (o.rows[j].w1 - band.mean_w1) * (o.rows[j].w1 - band.mean_w1);
      }
      band.std_paper_w = std::sqrt(ss_pw / (reps - 1));
      band.std_w1 = std::sqrt(ss_w1 / (reps - 1));
      result.bands.push_back(band);
    }
  }

  result.variance_ratio = kNaN;
  if (reps >= 2) {
    std::vector<DistributionVector> classics, steadies;
    for (const auto& o : outputs) classics.push_back(o.classic);
    for (int r = 0; r < reps; ++r) {
      // Non-converged solves are flagged, never silently averaged in.
      if (outputs[static_cast<std::size_t>(r)].report.converged) {
        steadies.push_back(outputs[static_cast<std::size_t>(r)].steady);
      }
    }
    result.variance_classic = variance_report(classics, "classic");
    if (steadies.size() >= 2) {
      result.variance_eigen = variance_report(steadies, to_string(config.harness.solver));
      if (result.variance_classic->total > 0.0) {
        result.variance_ratio = result.variance_eigen->total / result.variance_classic->total;
      }
    }
  }

  ReplicationOutput& primary = outputs.front();
  result.baseline = std::move(primary.baseline);
  result.curve_rows = std::move(primary.rows);
  result.classic_dist = std::move(primary.classic);
  result.eigen_dist = std::move(primary.steady);
  result.price_classic = primary.price_classic;
  result.price_eigen = primary.price_eigen;
  result.final_counts = std::move(primary.counts);
  result.final_matrix = std::move(primary.matrix);

  result.runtimes.total_s = seconds_since(t_total);
  return result;
}

}  // namespace

const char* to_string(BaselineMode m) noexcept {
  switch (m) {
    case BaselineMode::final_matrix: return "final";
    case BaselineMode::snapshot_average: return "average";
  }
  return "?";
}

std::vector<std::int64_t> snapshot_schedule(std::int64_t n_total, bool exact) {
  if (n_total < 1) throw std::invalid_argument("snapshot_schedule: n_total must be >= 1");
  std::vector<std::int64_t> points;
  if (exact) {
    points.reserve(static_cast<std::size_t>(n_total));
    for (std::int64_t i = 1; i <= n_total; ++i) points.push_back(i);
    return points;
  }
  const std::int64_t dense = std::min<std::int64_t>(n_total, 1000);
  points.reserve(static_cast<std::size_t>(dense) + 128);
  for (std::int64_t i = 1; i <= dense; ++i) points.push_back(i);
  for (int k = 1;; ++k) {
    const auto v = static_cast<std::int64_t>(std::llround(1000.0 * std::pow(10.0, k / 24.0)));
    if (v >= n_total) break;
    if (v > points.back()) points.push_back(v);
  }
  if (points.back() != n_total) points.push_back(n_total);
  return points;
}

ExperimentResult run_binomial_experiment(const ExperimentConfig& config) {
  if (config.sim.model != Model::binomial) {
    throw std::invalid_argument("run_binomial_experiment: config.model must be binomial");
  }
  return assemble(config, "binomial");
}

ExperimentResult run_diffusion_experiment(const ExperimentConfig& config) {
  if (config.sim.model != Model::gbm) {
    throw std::invalid_argument("run_diffusion_experiment: config.model must be gbm");
  }
  return assemble(config, "diffusion");
}

std::vector<SweepCell> run_sweep(const SweepSpec& spec) {
  const bool binomial = spec.base.sim.model == Model::binomial;
  if (spec.paths.empty() && spec.horizons.empty() && spec.grid_states.empty() &&
      spec.sigmas.empty() && spec.mus.empty()) {
    throw std::invalid_argument("run_sweep: no swept parameter");
  }

  // Empty dimensions collapse to the base configuration's value.
  const std::vector<std::int64_t> paths =
      spec.paths.empty() ? std::vector<std::int64_t>{spec.base.sim.n_paths} : spec.paths;
  const std::vector<int> horizons =
      spec.horizons.empty() ? std::vector<int>{spec.base.sim.horizon} : spec.horizons;
  const std::vector<int> grid_states =
      spec.grid_states.empty() ? std::vector<int>{spec.base.sim.grid.size()} : spec.grid_states;
  const std::vector<double> sigmas =
      spec.sigmas.empty() ? std::vector<double>{spec.base.sim.gbm.sigma} : spec.sigmas;
  const std::vector<double> mus =
      spec.mus.empty() ? std::vector<double>{spec.base.sim.gbm.mu} : spec.mus;

  std::vector<SweepCell> cells;
  int index = 0;
  for (std::int64_t n : paths) {
    for (int t : horizons) {
      for (int g : grid_states) {
        for (double sigma : sigmas) {
          for (double mu : mus) {
            SweepCell cell;
            cell.index = index;
            cell.params = {{"n_paths", static_cast<double>(n)},
                           {"horizon", static_cast<double>(t)},
                           {"grid_states", static_cast<double>(g)},
                           {"sigma", sigma},
                           {"mu", mu}};
            auto skip = [&cell](std::string reason) {
              cell.skipped = true;
              cell.skip_reason = std::move(reason);
            };
            if (n < 1) {
              skip("n_paths must be >= 1");
            } else if (t < 1) {
              skip("horizon must be >= 1");
            } else if (g < 2) {
              skip("grid_states must be >= 2");
            } else if (binomial && (!spec.sigmas.empty() || !spec.mus.empty())) {
              skip("mu/sigma do not apply to the binomial model");
            } else if (!binomial && sigma < 0.0) {
              skip("sigma must be nonnegative");
            } else {
              ExperimentConfig cfg = spec.base;
              cfg.sim.n_paths = n;
              cfg.sim.horizon = t;
              cfg.sim.grid = StateGrid(cfg.sim.grid.lower_value(), cfg.sim.grid.increment(), g);
              cfg.sim.gbm.sigma = sigma;
              cfg.sim.gbm.mu = mu;
              cfg.sim.master_seed = sweep_cell_seed(spec.base.sim.master_seed, cell.index);
              cfg.harness.dump_paths = false;  // per-cell dumps are not emitted
              cell.result = binomial ? run_binomial_experiment(cfg) : run_diffusion_experiment(cfg);
            }
            cells.push_back(std::move(cell));
            ++index;
          }
        }
      }
    }
  }
  return cells;
}

}  // namespace eigenmc
