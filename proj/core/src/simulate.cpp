#include "eigenmc/simulate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "eigenmc/rng.hpp"

namespace eigenmc {

void SimulationConfig::validate() const {
  if (!std::isfinite(s0)) throw std::invalid_argument("config: S0 must be finite");
  if (horizon < 1) throw std::invalid_argument("config: horizon must be at least 1");
  if (n_paths < 1) throw std::invalid_argument("config: n_paths must be at least 1");
  if (model == Model::binomial) {
    if (!(s0 > 0.0)) throw std::invalid_argument("config: binomial S0 must be positive");
    if (!(binomial.up_factor > 0.0))
      throw std::invalid_argument("config: up_factor must be positive");
    if (!(binomial.down_factor > 0.0))
      throw std::invalid_argument("config: down_factor must be positive");
    if (!(binomial.p_up >= 0.0 && binomial.p_up <= 1.0))
      throw std::invalid_argument("config: p_up must be in [0, 1]");
  } else {
    if (!std::isfinite(gbm.mu)) throw std::invalid_argument("config: mu must be finite");
    if (!(gbm.sigma >= 0.0)) throw std::invalid_argument("config: sigma must be nonnegative");
    if (!(gbm.dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
  }
  if (!std::isfinite(strike)) throw std::invalid_argument("config: strike must be finite");
  if (!(discount > 0.0 && discount <= 1.0))
    throw std::invalid_argument("config: discount must be in (0, 1]");
}

Path simulate_binomial_path(const SimulationConfig& config, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::bernoulli_distribution up(config.binomial.p_up);
  Path values(static_cast<std::size_t>(config.horizon) + 1);
  values[0] = config.s0;
  for (int t = 1; t <= config.horizon; ++t) {
    const double factor = up(rng) ? config.binomial.up_factor : config.binomial.down_factor;
    values[t] = values[t - 1] * factor;
  }
  return values;
}

Path simulate_gbm_path(const SimulationConfig& config, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const auto& p = config.gbm;
  const double half_var = 0.5 * p.sigma * p.sigma;
  const double drift =
      (p.drift == DriftCorrection::plus_half ? p.mu + half_var : p.mu - half_var) * p.dt;
  const double vol = p.sigma * std::sqrt(p.dt);
  Path values(static_cast<std::size_t>(config.horizon) + 1);
  values[0] = config.s0;
  for (int t = 1; t <= config.horizon; ++t) {
    values[t] = values[t - 1] * std::exp(drift + vol * z(rng));
  }
  return values;
}

Path simulate_path(const SimulationConfig& config, std::uint64_t seed) {
  return config.model == Model::binomial ? simulate_binomial_path(config, seed)
                                         : simulate_gbm_path(config, seed);
}

PathEnsemble simulate_ensemble(const SimulationConfig& config, unsigned n_workers) {
  config.validate();
  const std::int64_t n = config.n_paths;

  PathEnsemble ensemble;
  ensemble.config = config;
  ensemble.paths.resize(static_cast<std::size_t>(n));
  ensemble.seeds.resize(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    ensemble.seeds[static_cast<std::size_t>(k)] = path_seed(config.master_seed, k);
  }

  auto fill_range = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t k = lo; k < hi; ++k) {
      ensemble.paths[static_cast<std::size_t>(k)] =
          simulate_path(config, ensemble.seeds[static_cast<std::size_t>(k)]);
    }
  };

  if (n_workers == 0) n_workers = std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(
      std::min<std::int64_t>(n, static_cast<std::int64_t>(n_workers)));

  if (n_workers <= 1) {
    fill_range(0, n);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(n_workers);
    const std::int64_t chunk = (n + n_workers - 1) / n_workers;
    for (unsigned w = 0; w < n_workers; ++w) {
      const std::int64_t lo = static_cast<std::int64_t>(w) * chunk;
      const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back(fill_range, lo, hi);
    }
    for (auto& t : workers) t.join();
  }
  return ensemble;
}

}  // namespace eigenmc
