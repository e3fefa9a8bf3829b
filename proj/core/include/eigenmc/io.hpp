#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "eigenmc/experiment.hpp"

namespace eigenmc {

// Shortest round-trippable decimal form of a double (17 significant digits);
// NaN prints as "nan" regardless of sign.
std::string format_double(double v);

void write_convergence_csv(const std::filesystem::path& file,
                           const std::vector<SnapshotRow>& rows);
void write_bands_csv(const std::filesystem::path& file,
                     const std::vector<BandRow>& bands);
void write_terminal_csv(const std::filesystem::path& file, const StateGrid& grid,
                        const DistributionVector& classic,
                        const DistributionVector& eigen_dist);
void write_variance_csv(const std::filesystem::path& file, const StateGrid& grid,
                        const VarianceReport& eigen_var,
                        const VarianceReport& classic_var);
void write_counts_csv(const std::filesystem::path& file, const StateGrid& grid,
                      const TransitionCounts& counts);
void write_probs_csv(const std::filesystem::path& file, const StateGrid& grid,
                     const StochasticMatrix& matrix);
void write_paths_header(std::ostream& out);
void write_path_rows(std::ostream& out, std::int64_t path_id, const Path& path);

// Serializes the full result (config echo, seeds, solver reports, runtimes,
// prices, variance totals, version). Matrices are embedded as dense arrays
// when the grid has at most 64 states. The timestamp is the only field that
// differs between identical runs.
void write_manifest(const std::filesystem::path& file, const ExperimentResult& result,
                    const std::vector<std::string>& output_files);

void write_sweep_csv(const std::filesystem::path& file, const std::vector<SweepCell>& cells);

// Emits every applicable CSV plus manifest.json into out_dir (created if
// missing). Returns the file names written. `dump_matrix` adds counts.csv
// and probs.csv.
std::vector<std::string> write_outputs(const ExperimentResult& result,
                                       const std::filesystem::path& out_dir,
                                       bool dump_matrix);

// Per-cell subdirectories (cell_000, cell_001, ...) plus a sweep.csv summary.
std::vector<std::string> write_sweep_outputs(const std::vector<SweepCell>& cells,
                                             const std::filesystem::path& out_dir,
                                             bool dump_matrix);

}  // namespace eigenmc
