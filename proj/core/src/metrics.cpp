#include "eigenmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eigenmc {

namespace {

void require_same_length(const DistributionVector& p, const DistributionVector& q) {
  if (p.probs.size() != q.probs.size()) {
    throw std::invalid_argument("distance: distributions have different lengths");
  }
  if (p.probs.empty()) throw std::invalid_argument("distance: empty distributions");
}

}  // namespace

const char* to_string(Metric m) noexcept {
  switch (m) {
    case Metric::paper_w: return "paper-w";
    case Metric::w1: return "w1";
  }
  return "?";
}

double rms_distance(const DistributionVector& p, const DistributionVector& q) {
  require_same_length(p, q);
  double sumsq = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) {
    const double d = p.probs[i] - q.probs[i];
    sumsq += d * d;
  }
  return std::sqrt(sumsq / static_cast<double>(p.probs.size()));
}

double wasserstein1(const DistributionVector& p, const DistributionVector& q,
                    const StateGrid& grid) {
  require_same_length(p, q);
  if (static_cast<int>(p.probs.size()) != grid.size()) {
    throw std::invalid_argument("wasserstein1: length does not match grid");
  }
  double cdf_gap = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.probs.size(); ++i) {
    cdf_gap += p.probs[i] - q.probs[i];
    total += std::abs(cdf_gap);
  }
  return grid.increment() * total;
}

double call_price(const DistributionVector& dist, const StateGrid& grid,
                  double strike, double discount) {
  if (static_cast<int>(dist.probs.size()) != grid.size()) {
    throw std::invalid_argument("call_price: length does not match grid");
  }
  double expectation = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double payoff = grid.index_to_value(i) - strike;
    if (payoff > 0.0) expectation += dist.probs[static_cast<std::size_t>(i)] * payoff;
  }
  return discount * expectation;
}

VarianceReport variance_report(const std::vector<DistributionVector>& replications,
                               std::string method_tag) {
  const int r = static_cast<int>(replications.size());
  if (r < 2) throw std::invalid_argument("variance_report: need at least 2 replications");
  const std::size_t n = replications.front().probs.size();
  for (const auto& d : replications) {
    if (d.probs.size() != n) {
      throw std::invalid_argument("variance_report: replication length mismatch");
    }
  }

  VarianceReport report;
  report.n_replications = r;
  report.method = std::move(method_tag);
  report.per_state.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (const auto& d : replications) mean += d.probs[i];
    mean /= r;
    double ss = 0.0;
    for (const auto& d : replications) {
      const double dev = d.probs[i] - mean;
      ss += dev * dev;
    }
    report.per_state[i] = ss / (r - 1);
    report.total += report.per_state[i];
  }
  return report;
}

}  // namespace eigenmc
