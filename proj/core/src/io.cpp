#include "eigenmc/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "eigenmc/version.hpp"

namespace eigenmc {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json grid_json(const StateGrid& grid) {
  return {{"lower_value", grid.lower_value()},
          {"increment", grid.increment()},
          {"n_states", grid.size()}};
}

json config_json(const SimulationConfig& sim) {
  return {{"model", sim.model == Model::binomial ? "binomial" : "gbm"},
          {"s0", sim.s0},
          {"horizon", sim.horizon},
          {"n_paths", sim.n_paths},
          {"master_seed", sim.master_seed},
          {"binomial",
           {{"up_factor", sim.binomial.up_factor},
            {"down_factor", sim.binomial.down_factor},
            {"p_up", sim.binomial.p_up}}},
          {"gbm",
           {{"mu", sim.gbm.mu},
            {"sigma", sim.gbm.sigma},
            {"dt", sim.gbm.dt},
            {"drift_correction",
             sim.gbm.drift == DriftCorrection::plus_half ? "paper" : "standard"}}},
          {"grid", grid_json(sim.grid)},
          {"strike", sim.strike},
          {"discount", sim.discount}};
}

json harness_json(const HarnessOptions& h) {
  json metrics = json::array();
  if (h.metric_paper_w) metrics.push_back(to_string(Metric::paper_w));
  if (h.metric_w1) metrics.push_back(to_string(Metric::w1));
  return {{"replications", h.replications},
          {"solver", to_string(h.solver)},
          {"repair", to_string(h.repair)},
          {"baseline", to_string(h.baseline)},
          {"metrics", metrics},
          {"exact_snapshots", h.exact_snapshots},
          {"power_tol", h.power.tol},
          {"power_max_iter", h.power.max_iter},
          {"workers", h.n_workers},
          {"dump_paths", h.dump_paths}};
}

json report_json(const SolverReport& r, int replication) {
  return {{"replication", replication},
          {"method", to_string(r.method)},
          {"lambda_max", r.lambda_max},
          {"iterations", r.iterations},
          {"residual", r.residual},
          {"converged", r.converged},
          {"multiplicity", r.multiplicity},
          {"sign_warning", r.sign_warning},
          {"message", r.message}};
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_convergence_csv(const std::filesystem::path& file,
                           const std::vector<SnapshotRow>& rows) {
  auto out = open_out(file);
  out << "n_paths,paper_w,w1,converged,lambda_max\n";
  for (const auto& r : rows) {
    out << r.n_paths << ',' << format_double(r.paper_w) << ',' << format_double(r.w1) << ','
        << (r.converged ? 1 : 0) << ',' << format_double(r.lambda_max) << '\n';
  }
}

void write_bands_csv(const std::filesystem::path& file, const std::vector<BandRow>& bands) {
  auto out = open_out(file);
  out << "n_paths,mean_paper_w,std_paper_w,mean_w1,std_w1\n";
  for (const auto& b : bands) {
    out << b.n_paths << ',' << format_double(b.mean_paper_w) << ','
        << format_double(b.std_paper_w) << ',' << format_double(b.mean_w1) << ','
        << format_double(b.std_w1) << '\n';
  }
}

void write_terminal_csv(const std::filesystem::path& file, const StateGrid& grid,
                        const DistributionVector& classic,
                        const DistributionVector& eigen_dist) {
  auto out = open_out(file);
  out << "state_index,state_value,prob_classic,prob_eigen\n";
  for (int i = 0; i < grid.size(); ++i) {
    out << i << ',' << format_double(grid.index_to_value(i)) << ','
        << format_double(classic.probs[static_cast<std::size_t>(i)]) << ','
        << format_double(eigen_dist.probs[static_cast<std::size_t>(i)]) << '\n';
  }
}

void write_variance_csv(const std::filesystem::path& file, const StateGrid& grid,
                        const VarianceReport& eigen_var, const VarianceReport& classic_var) {
  auto out = open_out(file);
  out << "state_value,var_eigen,var_classic\n";
  for (int i = 0; i < grid.size(); ++i) {
    out << format_double(grid.index_to_value(i)) << ','
        << format_double(eigen_var.per_state[static_cast<std::size_t>(i)]) << ','
        << format_double(classic_var.per_state[static_cast<std::size_t>(i)]) << '\n';
  }
}

void write_counts_csv(const std::filesystem::path& file, const StateGrid& grid,
                      const TransitionCounts& counts) {
  auto out = open_out(file);
  out << "row_state_value,col_state_value,entry\n";
  for (int i = 0; i < counts.size(); ++i) {
    for (int j = 0; j < counts.size(); ++j) {
      out << format_double(grid.index_to_value(i)) << ','
          << format_double(grid.index_to_value(j)) << ',' << counts.at(i, j) << '\n';
    }
  }
}

void write_probs_csv(const std::filesystem::path& file, const StateGrid& grid,
                     const StochasticMatrix& matrix) {
  auto out = open_out(file);
  out << "row_state_value,col_state_value,entry\n";
  for (int i = 0; i < matrix.size(); ++i) {
    const double vi = grid.index_to_value(matrix.state_map[static_cast<std::size_t>(i)]);
    for (int j = 0; j < matrix.size(); ++j) {
      const double vj = grid.index_to_value(matrix.state_map[static_cast<std::size_t>(j)]);
      out << format_double(vi) << ',' << format_double(vj) << ','
          << format_double(matrix.probs(i, j)) << '\n';
    }
  }
}

void write_paths_header(std::ostream& out) { out << "path_id,t,value\n"; }

void write_path_rows(std::ostream& out, std::int64_t path_id, const Path& path) {
  for (std::size_t t = 0; t < path.size(); ++t) {
    out << path_id << ',' << t << ',' << format_double(path[t]) << '\n';
  }
}

void write_manifest(const std::filesystem::path& file, const ExperimentResult& result,
                    const std::vector<std::string>& output_files) {
  json m;
  m["artifact"] = {{"name", "eigenmc"}, {"version", kVersion}};
  m["kind"] = result.kind;
  m["timestamp_utc"] = utc_timestamp();
  m["config"] = config_json(result.config);
  m["harness"] = harness_json(result.options);

  m["seeds"] = {{"master", result.config.master_seed},
                {"replications", result.replication_seeds}};

  json reports = json::array();
  for (std::size_t r = 0; r < result.replication_reports.size(); ++r) {
    reports.push_back(report_json(result.replication_reports[r], static_cast<int>(r)));
  }
  m["solver_reports"] = reports;
  m["all_converged"] = result.non_converged_replications.empty();
  m["non_converged_replications"] = result.non_converged_replications;

  m["prices"] = {{"classic", result.price_classic}, {"eigen", result.price_eigen}};

  json variance;
  variance["n_replications"] = result.options.replications;
  variance["total_eigen"] =
      result.variance_eigen ? json(result.variance_eigen->total) : json();
  variance["total_classic"] =
      result.variance_classic ? json(result.variance_classic->total) : json();
  variance["ratio_eigen_classic"] =
      std::isnan(result.variance_ratio) ? json() : json(result.variance_ratio);
  m["variance"] = variance;

  m["distances_classic_vs_eigen"] = {
      {"paper_w", rms_distance(result.classic_dist, result.eigen_dist)},
      {"w1", wasserstein1(result.classic_dist, result.eigen_dist, result.config.grid)}};

  m["runtimes_seconds"] = {{"simulate_accumulate", result.runtimes.simulate_accumulate_s},
                           {"solve", result.runtimes.solve_s},
                           {"total", result.runtimes.total_s}};
  m["snapshot_count"] = result.curve_rows.size();
  m["baseline_provenance"] = to_string(result.baseline.provenance);

  if (result.config.grid.size() <= 64 && result.final_counts && result.final_matrix) {
    json counts = json::array();
    for (int i = 0; i < result.final_counts->size(); ++i) {
      json row = json::array();
      for (int j = 0; j < result.final_counts->size(); ++j) {
        row.push_back(result.final_counts->at(i, j));
      }
      counts.push_back(std::move(row));
    }
    json probs = json::array();
    for (int i = 0; i < result.final_matrix->size(); ++i) {
      json row = json::array();
      for (int j = 0; j < result.final_matrix->size(); ++j) {
        row.push_back(result.final_matrix->probs(i, j));
      }
      probs.push_back(std::move(row));
    }
    json state_values = json::array();
    for (int idx : result.final_matrix->state_map) {
      state_values.push_back(result.config.grid.index_to_value(idx));
    }
    m["matrices"] = {{"counts", std::move(counts)},
                     {"probs", std::move(probs)},
                     {"probs_state_values", std::move(state_values)}};
  }

  m["files"] = output_files;

  auto out = open_out(file);
  out << m.dump(2) << '\n';
}

void write_sweep_csv(const std::filesystem::path& file, const std::vector<SweepCell>& cells) {
  auto out = open_out(file);
  out << "cell,n_paths,horizon,grid_states,sigma,mu,status,reason,"
         "price_classic,price_eigen,variance_ratio,paper_w_classic_vs_eigen,"
         "w1_classic_vs_eigen,all_converged\n";
  for (const auto& cell : cells) {
    out << cell.index << ',' << static_cast<std::int64_t>(cell.params.at("n_paths")) << ','
        << static_cast<int>(cell.params.at("horizon")) << ','
        << static_cast<int>(cell.params.at("grid_states")) << ','
        << format_double(cell.params.at("sigma")) << ','
        << format_double(cell.params.at("mu")) << ',';
    if (cell.skipped) {
      out << "skipped," << cell.skip_reason << ",,,,,,\n";
      continue;
    }
    const ExperimentResult& r = *cell.result;
    out << "ok,," << format_double(r.price_classic) << ',' << format_double(r.price_eigen)
        << ',' << format_double(r.variance_ratio) << ','
        << format_double(rms_distance(r.classic_dist, r.eigen_dist)) << ','
        << format_double(wasserstein1(r.classic_dist, r.eigen_dist, r.config.grid)) << ','
        << (r.non_converged_replications.empty() ? 1 : 0) << '\n';
  }
}

std::vector<std::string> write_outputs(const ExperimentResult& result,
                                       const std::filesystem::path& out_dir,
                                       bool dump_matrix) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> files;

  if (!result.curve_rows.empty()) {
    write_convergence_csv(out_dir / "convergence.csv", result.curve_rows);
    files.emplace_back("convergence.csv");
  }
  if (!result.bands.empty()) {
    write_bands_csv(out_dir / "convergence_bands.csv", result.bands);
    files.emplace_back("convergence_bands.csv");
  }
  write_terminal_csv(out_dir / "terminal.csv", result.config.grid, result.classic_dist,
                     result.eigen_dist);
  files.emplace_back("terminal.csv");
  if (result.variance_eigen && result.variance_classic) {
    write_variance_csv(out_dir / "variance.csv", result.config.grid, *result.variance_eigen,
                       *result.variance_classic);
    files.emplace_back("variance.csv");
  }
  if (dump_matrix && result.final_counts && result.final_matrix) {
    write_counts_csv(out_dir / "counts.csv", result.config.grid, *result.final_counts);
    write_probs_csv(out_dir / "probs.csv", result.config.grid, *result.final_matrix);
    files.emplace_back("counts.csv");
    files.emplace_back("probs.csv");
  }
  if (result.options.dump_paths && std::filesystem::exists(out_dir / "paths.csv")) {
    files.emplace_back("paths.csv");
  }

  write_manifest(out_dir / "manifest.json", result, files);
  files.emplace_back("manifest.json");
  return files;
}

std::vector<std::string> write_sweep_outputs(const std::vector<SweepCell>& cells,
                                             const std::filesystem::path& out_dir,
                                             bool dump_matrix) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> files;
  for (const auto& cell : cells) {
    if (cell.skipped) continue;
    char name[32];
    std::snprintf(name, sizeof name, "cell_%03d", cell.index);
    for (const std::string& f : write_outputs(*cell.result, out_dir / name, dump_matrix)) {
      files.push_back(std::string(name) + "/" + f);
    }
  }
  write_sweep_csv(out_dir / "sweep.csv", cells);
  files.emplace_back("sweep.csv");
  return files;
}

}  // namespace eigenmc
