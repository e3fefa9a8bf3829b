#pragma once

#include <string>

#include "eigenmc/distribution.hpp"
#include "eigenmc/transition.hpp"

namespace eigenmc {

enum class SolverKind { eigen, power, svd };

const char* to_string(SolverKind k) noexcept;

struct SolverReport {
  SolverKind method = SolverKind::eigen;
  double lambda_max = 0.0;   // dominant eigenvalue modulus (singular value for svd)
  int iterations = 0;
  double residual = 0.0;     // max-norm of pi P - pi on the retained states
  bool converged = false;
  int multiplicity = 1;      // admissible dominant vectors folded into the result
  bool sign_warning = false; // svd only: dominant vector had mixed signs
  std::string message;       // empty when converged without caveats
};

struct StationaryResult {
  DistributionVector distribution;  // embedded back to full grid length
  SolverReport report;
};

struct PowerOptions {
  double tol = 1e-12;
  int max_iter = 200000;
};

// Left eigenvector of P for the largest-magnitude eigenvalue, normalized to
// a distribution. Degenerate dominant eigenspaces resolve to the uniform
// mixture of the admissible (sign-consistent) eigenvectors, reported via
// `multiplicity`. A complex dominant pair or an inadmissible eigenvector
// yields converged = false with the best-effort result.
StationaryResult stationary_eigen(const StochasticMatrix& P);

// Damped iteration pi <- pi (I + P) / 2 from the uniform start. The damping
// keeps periodic chains convergent and does not change the fixed points.
StationaryResult stationary_power(const StochasticMatrix& P, const PowerOptions& opts = {});

// Leading right singular vector of the transposed system, sign-flipped and
// normalized. This generally differs from the stationary vector; mixed signs
// are reported as a warning, not an error.
StationaryResult stationary_svd(const StochasticMatrix& P);

StationaryResult solve_stationary(const StochasticMatrix& P, SolverKind kind,
                                  const PowerOptions& opts = {});

// Modulus of the largest-magnitude eigenvalue (1 for any row-stochastic matrix).
double spectral_check(const StochasticMatrix& P);

}  // namespace eigenmc
