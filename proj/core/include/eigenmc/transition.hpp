#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "eigenmc/distribution.hpp"
#include "eigenmc/simulate.hpp"
#include "eigenmc/state_grid.hpp"

namespace eigenmc {

// Observed state-to-state transition counts over a grid (row = from-state).
class TransitionCounts {
 public:
  explicit TransitionCounts(int n_states);

  void record(int from, int to);

  // Records every intertemporal transition of the path: horizon increments.
  // Throws std::domain_error naming the offending step on non-finite values.
  void accumulate_path(const Path& path, const StateGrid& grid);

  // Records only the first-to-terminal transition: one increment.
  void record_terminal(const Path& path, const StateGrid& grid);

  // Adds another count matrix of the same size (worker-local merge).
  void merge(const TransitionCounts& other);

  std::int64_t at(int from, int to) const;
  std::int64_t row_sum(int from) const;
  std::int64_t col_sum(int to) const;
  std::int64_t total() const noexcept { return total_; }
  int size() const noexcept { return n_; }
  const std::vector<std::int64_t>& data() const noexcept { return counts_; }

 private:
  int n_;
  std::vector<std::int64_t> counts_;  // row-major n x n
  std::int64_t total_ = 0;
};

// How rows with no observed outgoing transition are made stochastic.
//   restrict_touched: drop states with no transitions at all; states entered
//                     but never exited keep full rows with a diagonal 1.
//   self_loop:        keep full size; every zero row gets a diagonal 1.
//   uniform_row:      keep full size; every zero row becomes 1/n everywhere.
enum class Repair { restrict_touched, self_loop, uniform_row };

const char* to_string(Repair r) noexcept;

// Row-normalized transition matrix over the retained states.
struct StochasticMatrix {
  Eigen::MatrixXd probs;           // n' x n', rows sum to 1
  std::vector<int> state_map;      // retained position -> original grid index
  int full_size = 0;               // original grid size for embedding
  Repair repair = Repair::restrict_touched;

  int size() const noexcept { return static_cast<int>(probs.rows()); }

  // Square shape, entries in [0,1], row sums within tol of 1; throws.
  void validate(double tol = 1e-12) const;

  // Wraps an already-stochastic dense matrix (identity state map).
  static StochasticMatrix from_dense(Eigen::MatrixXd probs, double tol = 1e-12);
};

// Divides each retained row by its sum, applying `repair` to zero rows.
// Throws std::invalid_argument when no transitions were recorded.
StochasticMatrix normalize_rows(const TransitionCounts& counts, Repair repair);

// Empirical distribution of path endpoints over grid states.
DistributionVector terminal_histogram(const PathEnsemble& ensemble, const StateGrid& grid);

}  // namespace eigenmc
