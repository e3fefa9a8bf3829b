#include "eigenmc/transition.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eigenmc {

TransitionCounts::TransitionCounts(int n_states) : n_(n_states) {
  if (n_states < 2) throw std::invalid_argument("TransitionCounts: need at least 2 states");
  counts_.assign(static_cast<std::size_t>(n_) * n_, 0);
}

void TransitionCounts::record(int from, int to) {
  if (from < 0 || from >= n_ || to < 0 || to >= n_) {
    throw std::out_of_range("TransitionCounts: state index out of range");
  }
  ++counts_[static_cast<std::size_t>(from) * n_ + to];
  ++total_;
}

void TransitionCounts::accumulate_path(const Path& path, const StateGrid& grid) {
  if (path.size() < 2) throw std::invalid_argument("accumulate_path: path length must be >= 2");
  if (grid.size() != n_) throw std::invalid_argument("accumulate_path: grid size mismatch");
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (!std::isfinite(path[t])) {
      throw std::domain_error("accumulate_path: non-finite value at step " + std::to_string(t));
    }
  }
  int from = grid.value_to_index(path[0]);
  for (std::size_t t = 1; t < path.size(); ++t) {
    const int to = grid.value_to_index(path[t]);
    ++counts_[static_cast<std::size_t>(from) * n_ + to];
    ++total_;
    from = to;
  }
}

void TransitionCounts::record_terminal(const Path& path, const StateGrid& grid) {
  if (path.size() < 2) throw std::invalid_argument("record_terminal: path length must be >= 2");
  if (grid.size() != n_) throw std::invalid_argument("record_terminal: grid size mismatch");
  if (!std::isfinite(path.front())) {
    throw std::domain_error("record_terminal: non-finite value at step 0");
  }
  if (!std::isfinite(path.back())) {
    throw std::domain_error("record_terminal: non-finite value at step " +
                            std::to_string(path.size() - 1));
  }
  record(grid.value_to_index(path.front()), grid.value_to_index(path.back()));
}

void TransitionCounts::merge(const TransitionCounts& other) {
  if (other.n_ != n_) throw std::invalid_argument("merge: size mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

std::int64_t TransitionCounts::at(int from, int to) const {
  if (from < 0 || from >= n_ || to < 0 || to >= n_) {
    throw std::out_of_range("TransitionCounts: state index out of range");
  }
  return counts_[static_cast<std::size_t>(from) * n_ + to];
}

std::int64_t TransitionCounts::row_sum(int from) const {
  std::int64_t s = 0;
  for (int j = 0; j < n_; ++j) s += counts_[static_cast<std::size_t>(from) * n_ + j];
  return s;
}

std::int64_t TransitionCounts::col_sum(int to) const {
  std::int64_t s = 0;
  for (int i = 0; i < n_; ++i) s += counts_[static_cast<std::size_t>(i) * n_ + to];
  return s;
}

const char* to_string(Repair r) noexcept {
  switch (r) {
    case Repair::restrict_touched: return "restrict";
    case Repair::self_loop: return "self-loop";
    case Repair::uniform_row: return "uniform";
  }
  return "?";
}

void StochasticMatrix::validate(double tol) const {
  const auto n = probs.rows();
  if (n == 0 || probs.cols() != n) throw std::logic_error("StochasticMatrix: not square");
  if (static_cast<int>(state_map.size()) != n) {
    throw std::logic_error("StochasticMatrix: state_map size mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double p = probs(i, j);
      if (!(p >= 0.0 && p <= 1.0 + tol)) {
        throw std::logic_error("StochasticMatrix: entry outside [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw std::logic_error("StochasticMatrix: row " + std::to_string(i) +
                             " sums to " + std::to_string(sum));
    }
  }
}

StochasticMatrix StochasticMatrix::from_dense(Eigen::MatrixXd probs, double tol) {
  StochasticMatrix m;
  m.full_size = static_cast<int>(probs.rows());
  m.state_map.resize(static_cast<std::size_t>(m.full_size));
  for (int i = 0; i < m.full_size; ++i) m.state_map[static_cast<std::size_t>(i)] = i;
  m.probs = std::move(probs);
  m.validate(tol);
  return m;
}

StochasticMatrix normalize_rows(const TransitionCounts& counts, Repair repair) {
  if (counts.total() < 1) throw std::invalid_argument("normalize_rows: no transitions recorded");
  const int n = counts.size();

  std::vector<int> keep;
  if (repair == Repair::restrict_touched) {
    for (int i = 0; i < n; ++i) {
      if (counts.row_sum(i) > 0 || counts.col_sum(i) > 0) keep.push_back(i);
    }
  } else {
    keep.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) keep[static_cast<std::size_t>(i)] = i;
  }

  const int m = static_cast<int>(keep.size());
  StochasticMatrix out;
  out.repair = repair;
  out.full_size = n;
  out.state_map = keep;
  out.probs = Eigen::MatrixXd::Zero(m, m);

  for (int r = 0; r < m; ++r) {
    const int i = keep[static_cast<std::size_t>(r)];
    const std::int64_t row_total = counts.row_sum(i);
    if (row_total > 0) {
      for (int c = 0; c < m; ++c) {
        const std::int64_t v = counts.at(i, keep[static_cast<std::size_t>(c)]);
        if (v > 0) out.probs(r, c) = static_cast<double>(v) / static_cast<double>(row_total);
      }
    } else if (repair == Repair::uniform_row) {
      out.probs.row(r).setConstant(1.0 / m);
    } else {
      // restrict keeps entered-never-exited states as absorbing; self-loop
      // does the same for every zero row.
      out.probs(r, r) = 1.0;
    }
  }
  return out;
}

DistributionVector terminal_histogram(const PathEnsemble& ensemble, const StateGrid& grid) {
  if (ensemble.paths.empty()) {
    throw std::invalid_argument("terminal_histogram: empty ensemble");
  }
  std::vector<double> mass(static_cast<std::size_t>(grid.size()), 0.0);
  const double w = 1.0 / static_cast<double>(ensemble.paths.size());
  for (const Path& p : ensemble.paths) {
    mass[static_cast<std::size_t>(grid.value_to_index(p.back()))] += w;
  }
  return DistributionVector{std::move(mass), Provenance::terminal_histogram};
}

}  // namespace eigenmc
