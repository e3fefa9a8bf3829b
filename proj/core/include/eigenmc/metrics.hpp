#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eigenmc/distribution.hpp"
#include "eigenmc/state_grid.hpp"

namespace eigenmc {

// Distance identifiers as they appear in output schemas and on the CLI.
enum class Metric { paper_w, w1 };

const char* to_string(Metric m) noexcept;

// Root-mean-square difference between two probability mass vectors:
// sqrt(sum_i (p_i - q_i)^2 / n). Reported under the "paper_w" column.
double rms_distance(const DistributionVector& p, const DistributionVector& q);

// Wasserstein-1 on a uniform grid: increment * sum_i |CDF_p(i) - CDF_q(i)|.
double wasserstein1(const DistributionVector& p, const DistributionVector& q,
                    const StateGrid& grid);

// Discounted expected call payoff under `dist`:
// discount * sum_i dist[i] * max(value_i - strike, 0).
double call_price(const DistributionVector& dist, const StateGrid& grid,
                  double strike, double discount);

struct VarianceReport {
  std::vector<double> per_state;  // unbiased variance of each state's mass
  double total = 0.0;             // sum over states
  int n_replications = 0;
  std::string method;
};

// Cross-replication variance of a set of equal-length distributions.
// Throws std::invalid_argument with fewer than 2 replications.
VarianceReport variance_report(const std::vector<DistributionVector>& replications,
                               std::string method_tag);

struct CurvePoint {
  std::int64_t n_paths = 0;
  double distance = 0.0;
};

struct ConvergenceCurve {
  Metric metric = Metric::paper_w;
  std::vector<CurvePoint> points;  // n_paths strictly increasing
};

}  // namespace eigenmc
