#include "eigenmc/distribution.hpp"

#include <cmath>
#include <stdexcept>

namespace eigenmc {

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::eigen: return "eigen";
    case Provenance::power: return "power";
    case Provenance::svd: return "svd";
    case Provenance::terminal_histogram: return "terminal-histogram";
    case Provenance::average: return "average";
  }
  return "?";
}

void DistributionVector::validate(double tol) const {
  if (probs.empty()) throw std::logic_error("distribution: empty");
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p)) throw std::logic_error("distribution: non-finite entry");
    if (p < 0.0) throw std::logic_error("distribution: negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw std::logic_error("distribution: entries sum to " + std::to_string(sum));
  }
}

}  // namespace eigenmc
