#include "eigenmc/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace eigenmc {

namespace {

constexpr double kTieTol = 1e-10;       // dominant eigenvalue tie window
constexpr double kImagTol = 1e-9;       // tolerated imaginary part
constexpr double kSignTol = 1e-9;       // tolerated negativity, relative to max |entry|
constexpr double kResidualTol = 1e-10;  // converged fixed-point residual

DistributionVector embed(const Eigen::VectorXd& pi, const StochasticMatrix& P,
                         Provenance provenance) {
  std::vector<double> full(static_cast<std::size_t>(P.full_size), 0.0);
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    full[static_cast<std::size_t>(P.state_map[static_cast<std::size_t>(i)])] = pi[i];
  }
  return DistributionVector{std::move(full), provenance};
}

double residual_of(const Eigen::VectorXd& pi, const Eigen::MatrixXd& probs) {
  return (probs.transpose() * pi - pi).cwiseAbs().maxCoeff();
}

// Sign-flips toward a positive sum, rejects vectors with meaningful negative
// mass, clips roundoff negatives and normalizes to sum 1.
bool admissible_distribution(Eigen::VectorXd& v) {
  if (v.sum() < 0.0) v = -v;
  const double vmax = v.cwiseAbs().maxCoeff();
  if (vmax == 0.0) return false;
  if (v.minCoeff() < -kSignTol * vmax) return false;
  v = v.cwiseMax(0.0);
  const double s = v.sum();
  if (s <= 0.0) return false;
  v /= s;
  return true;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

// Uniform mixture of the admissible candidates; deterministic ordering.
Eigen::VectorXd mix_candidates(std::vector<Eigen::VectorXd>& candidates) {
  std::sort(candidates.begin(), candidates.end(), lex_less);
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(candidates.front().size());
  for (const auto& c : candidates) pi += c;
  pi /= pi.sum();
  return pi;
}

}  // namespace

const char* to_string(SolverKind k) noexcept {
  switch (k) {
    case SolverKind::eigen: return "eigen";
    case SolverKind::power: return "power";
    case SolverKind::svd: return "svd";
  }
  return "?";
}

StationaryResult stationary_eigen(const StochasticMatrix& P) {
  P.validate();
  const int n = P.size();

  Eigen::EigenSolver<Eigen::MatrixXd> solver(P.probs.transpose());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("stationary_eigen: eigendecomposition failed");
  }
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();

  double lambda_max = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    lambda_max = std::max(lambda_max, std::abs(values[i]));
  }

  bool complex_dominant = false;
  bool mixed_signs = false;
  std::vector<Eigen::VectorXd> candidates;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (std::abs(values[i]) < lambda_max - kTieTol) continue;
    if (std::abs(values[i].imag()) > kImagTol) {
      complex_dominant = true;
      continue;
    }
    const Eigen::VectorXcd col = vectors.col(i);
    const double col_max = col.cwiseAbs().maxCoeff();
    if (col_max > 0.0 && col.imag().cwiseAbs().maxCoeff() > kImagTol * col_max) {
      complex_dominant = true;
      continue;
    }
    Eigen::VectorXd v = col.real();
    if (admissible_distribution(v)) {
      candidates.push_back(std::move(v));
    } else {
      mixed_signs = true;
    }
  }

  SolverReport report;
  report.method = SolverKind::eigen;
  report.lambda_max = lambda_max;

  Eigen::VectorXd pi;
  if (!candidates.empty()) {
    pi = mix_candidates(candidates);
    report.multiplicity = static_cast<int>(candidates.size());
    report.residual = residual_of(pi, P.probs);
    report.converged = report.residual <= kResidualTol;
    if (!report.converged) {
      report.message = "fixed-point residual " + std::to_string(report.residual) +
                       " above tolerance";
    }
  } else {
    // Best effort: clip the dominant eigenvector anyway so callers can see
    // what the solver was looking at, but flag non-convergence.
    Eigen::Index argmax = 0;
    for (Eigen::Index i = 1; i < values.size(); ++i) {
      if (std::abs(values[i]) > std::abs(values[argmax])) argmax = i;
    }
    Eigen::VectorXd v = vectors.col(argmax).real();
    if (v.sum() < 0.0) v = -v;
    v = v.cwiseMax(0.0);
    const double s = v.sum();
    pi = s > 0.0 ? Eigen::VectorXd(v / s)
                 : Eigen::VectorXd(Eigen::VectorXd::Constant(n, 1.0 / n));
    report.multiplicity = 0;
    report.residual = residual_of(pi, P.probs);
    report.converged = false;
    report.message = std::string(complex_dominant && !mixed_signs
                                     ? "complex dominant eigenvalue"
                                     : "dominant eigenvector has mixed signs") +
                     "; residual " + std::to_string(report.residual);
  }

  return StationaryResult{embed(pi, P, Provenance::eigen), std::move(report)};
}

StationaryResult stationary_power(const StochasticMatrix& P, const PowerOptions& opts) {
  P.validate();
  if (!(opts.tol > 0.0)) throw std::invalid_argument("stationary_power: tol must be positive");
  const int n = P.size();
  const Eigen::MatrixXd pt = P.probs.transpose();

  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
  SolverReport report;
  report.method = SolverKind::power;
  report.converged = false;

  double res = 0.0;
  int it = 0;
  for (; it <= opts.max_iter; ++it) {
    Eigen::VectorXd next = pt * pi;
    res = (next - pi).cwiseAbs().maxCoeff();
    if (res <= opts.tol) {
      report.converged = true;
      break;
    }
    if (it == opts.max_iter) break;
    pi = 0.5 * (pi + next);
    pi /= pi.sum();
  }

  report.iterations = it;
  report.residual = res;
  report.lambda_max = (pt * pi).sum() / pi.sum();
  if (!report.converged) {
    report.message = "max_iter reached; residual " + std::to_string(res);
  }
  return StationaryResult{embed(pi, P, Provenance::power), std::move(report)};
}

StationaryResult stationary_svd(const StochasticMatrix& P) {
  P.validate();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P.probs.transpose(), Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();
  const double sigma_max = sigma[0];

  SolverReport report;
  report.method = SolverKind::svd;
  report.lambda_max = sigma_max;

  std::vector<Eigen::VectorXd> candidates;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] < sigma_max - kTieTol) break;  // singular values are sorted
    Eigen::VectorXd cand = v.col(i);
    if (admissible_distribution(cand)) {
      candidates.push_back(std::move(cand));
    } else if (i == 0 && candidates.empty()) {
      // The reported procedure returns the leading vector even when it has
      // mixed signs; keep it, clipped, and warn.
      report.sign_warning = true;
      Eigen::VectorXd lead = v.col(0);
      if (lead.sum() < 0.0) lead = -lead;
      lead = lead.cwiseMax(0.0);
      candidates.push_back(lead / lead.sum());
    }
  }

  Eigen::VectorXd pi = mix_candidates(candidates);
  report.multiplicity = static_cast<int>(candidates.size());
  report.residual = residual_of(pi, P.probs);
  report.converged = !report.sign_warning && report.residual <= kResidualTol;
  if (report.sign_warning) {
    report.message = "leading singular vector has mixed signs; residual " +
                     std::to_string(report.residual);
  } else if (!report.converged) {
    report.message = "singular vector is not a fixed point; residual " +
                     std::to_string(report.residual);
  }
  return StationaryResult{embed(pi, P, Provenance::svd), std::move(report)};
}

StationaryResult solve_stationary(const StochasticMatrix& P, SolverKind kind,
                                  const PowerOptions& opts) {
  switch (kind) {
    case SolverKind::eigen: return stationary_eigen(P);
    case SolverKind::power: return stationary_power(P, opts);
    case SolverKind::svd: return stationary_svd(P);
  }
  throw std::invalid_argument("solve_stationary: unknown solver");
}

double spectral_check(const StochasticMatrix& P) {
  P.validate();
  return P.probs.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace eigenmc
