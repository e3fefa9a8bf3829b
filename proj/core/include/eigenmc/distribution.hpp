#pragma once

#include <string>
#include <vector>

namespace eigenmc {

enum class Provenance { eigen, power, svd, terminal_histogram, average };

const char* to_string(Provenance p) noexcept;

// Probability vector over the full grid's states.
struct DistributionVector {
  std::vector<double> probs;
  Provenance provenance = Provenance::terminal_histogram;

  // Checks entries are >= 0 and sum to 1 within `tol`; throws std::logic_error.
  void validate(double tol = 1e-10) const;
};

}  // namespace eigenmc
