#pragma once

#include <cstdint>
#include <vector>

#include "eigenmc/state_grid.hpp"

namespace eigenmc {

// One simulated trajectory: values[0] = S0, length horizon + 1.
using Path = std::vector<double>;

enum class Model { binomial, gbm };

// Sign convention of the variance term in the per-step exponential update.
//   plus_half:  S_t = S_{t-1} * exp((mu + sigma^2/2) dt + sigma sqrt(dt) Z)
//   minus_half: S_t = S_{t-1} * exp((mu - sigma^2/2) dt + sigma sqrt(dt) Z)
// minus_half is the Ito-corrected form whose mean grows at rate mu.
enum class DriftCorrection { plus_half, minus_half };

struct BinomialParams {
  double up_factor = 1.1;
  double down_factor = 0.9;
  double p_up = 0.5;
};

struct GbmParams {
  double mu = 0.002;
  double sigma = 0.01;
  double dt = 1.0;
  DriftCorrection drift = DriftCorrection::plus_half;
};

struct SimulationConfig {
  Model model = Model::binomial;
  double s0 = 1.0;
  int horizon = 9;                 // steps per path; path length is horizon + 1
  std::int64_t n_paths = 100000;
  std::uint64_t master_seed = 1;
  BinomialParams binomial;
  GbmParams gbm;
  StateGrid grid{0.0, 0.1, 21};
  double strike = 1.0;
  double discount = 1.0;           // in (0, 1]

  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

struct PathEnsemble {
  std::vector<Path> paths;
  SimulationConfig config;
  std::vector<std::uint64_t> seeds;  // per-path seeds actually used
};

// Single-path simulators; deterministic given seed.
Path simulate_binomial_path(const SimulationConfig& config, std::uint64_t seed);
Path simulate_gbm_path(const SimulationConfig& config, std::uint64_t seed);
Path simulate_path(const SimulationConfig& config, std::uint64_t seed);

// Simulates config.n_paths paths, path k seeded with path_seed(master_seed, k).
// Work is split over n_workers threads (0 = hardware concurrency); the result
// is identical for any worker count.
PathEnsemble simulate_ensemble(const SimulationConfig& config, unsigned n_workers = 1);

}  // namespace eigenmc
