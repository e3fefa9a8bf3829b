// Command-line driver: binomial / diffusion / sweep experiments with CSV and
// manifest outputs. Flags mirror the library options; a flat key=value config
// file can preload any of them (command-line values win).

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eigenmc/experiment.hpp"
#include "eigenmc/io.hpp"
#include "eigenmc/version.hpp"

namespace {

using namespace eigenmc;

struct CliOptions {
  std::optional<std::int64_t> paths;
  std::optional<int> horizon;
  std::uint64_t seed = 1;
  std::optional<int> replications;
  std::optional<int> grid_states;
  std::optional<double> grid_lower;
  std::optional<double> grid_increment;
  std::string solver = "eigen";
  std::string repair = "restrict";
  std::string drift = "paper";
  std::string metric = "both";
  std::string baseline = "final";
  std::string out;
  std::string config_file;
  bool dump_paths = false;
  bool dump_matrix = false;
  bool exact_snapshots = false;
  std::optional<double> s0;
  std::optional<double> strike;
  double discount = 1.0;
  double p_up = 0.5;
  double up_factor = 1.1;
  double down_factor = 0.9;
  double mu = 0.002;
  double sigma = 0.01;
  double dt = 1.0;
  double power_tol = 1e-12;
  int power_max_iter = 200000;
  unsigned workers = 0;

  // sweep ranges
  std::vector<std::int64_t> sweep_paths;
  std::vector<int> sweep_horizon;
  std::vector<int> sweep_grid_states;
  std::vector<double> sweep_sigma;
  std::vector<double> sweep_mu;
  std::string model = "binomial";
};

// Every option takes the last occurrence, so config-file tokens injected
// before the real command line are overridden by explicit flags.
CLI::Option* last(CLI::Option* opt) {
  return opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void add_common_options(CLI::App* cmd, CliOptions& o) {
  last(cmd->add_option("--config", o.config_file,
                       "key=value file mirroring these flags (flags win)"));
  last(cmd->add_option("--paths", o.paths, "number of simulated paths N"));
  last(cmd->add_option("--horizon", o.horizon, "steps per path T"));
  last(cmd->add_option("--seed", o.seed, "master seed"));
  last(cmd->add_option("--replications", o.replications, "independent replications R"));
  last(cmd->add_option("--grid-states", o.grid_states, "number of grid states"));
  last(cmd->add_option("--grid-lower", o.grid_lower, "value of grid state 0"));
  last(cmd->add_option("--grid-increment", o.grid_increment, "value spacing between states"));
  last(cmd->add_option("--solver", o.solver, "steady-state solver")
           ->check(CLI::IsMember({"eigen", "power", "svd"})));
  last(cmd->add_option("--repair", o.repair, "zero-row repair strategy")
           ->check(CLI::IsMember({"restrict", "self-loop", "uniform"})));
  last(cmd->add_option("--drift-correction", o.drift, "sign of the sigma^2/2 term")
           ->check(CLI::IsMember({"paper", "standard"})));
  last(cmd->add_option("--metric", o.metric, "distance metrics to report")
           ->check(CLI::IsMember({"paper-w", "w1", "both"})));
  last(cmd->add_option("--baseline", o.baseline, "convergence-curve baseline")
           ->check(CLI::IsMember({"final", "average"})));
  last(cmd->add_option("--out", o.out, "output directory")->required());
  cmd->add_flag("--dump-paths", o.dump_paths, "write paths.csv (path_id,t,value)");
  cmd->add_flag("--dump-matrix", o.dump_matrix, "write counts.csv and probs.csv");
  cmd->add_flag("--exact-snapshots", o.exact_snapshots, "solve after every path");
  last(cmd->add_option("--s0", o.s0, "starting value"));
  last(cmd->add_option("--strike", o.strike, "call strike K"));
  last(cmd->add_option("--discount", o.discount, "discount factor in (0,1]"));
  last(cmd->add_option("--p-up", o.p_up, "binomial up-move probability"));
  last(cmd->add_option("--up-factor", o.up_factor, "binomial up factor"));
  last(cmd->add_option("--down-factor", o.down_factor, "binomial down factor"));
  last(cmd->add_option("--mu", o.mu, "gbm drift per unit time"));
  last(cmd->add_option("--sigma", o.sigma, "gbm volatility per sqrt(unit time)"));
  last(cmd->add_option("--dt", o.dt, "gbm step size"));
  last(cmd->add_option("--power-tol", o.power_tol, "power-iteration residual tolerance"));
  last(cmd->add_option("--power-max-iter", o.power_max_iter, "power-iteration cap"));
  last(cmd->add_option("--workers", o.workers, "replication worker threads (0 = auto)"));
}

// Reads a flat key=value file ('#' comments allowed) into --key=value tokens.
std::vector<std::string> config_tokens(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot read config file: " + file);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(first, end - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("config file: expected key=value, got '" + line + "'");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto kend = key.find_last_not_of(" \t");
    key = key.substr(0, kend + 1);
    const auto vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? "" : value.substr(vstart);
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

SolverKind parse_solver(const std::string& s) {
  if (s == "power") return SolverKind::power;
  if (s == "svd") return SolverKind::svd;
  return SolverKind::eigen;
}

Repair parse_repair(const std::string& s) {
  if (s == "self-loop") return Repair::self_loop;
  if (s == "uniform") return Repair::uniform_row;
  return Repair::restrict_touched;
}

ExperimentConfig build_config(const CliOptions& o, Model model) {
  ExperimentConfig cfg;
  cfg.sim.model = model;
  const bool binomial = model == Model::binomial;

  cfg.sim.n_paths = o.paths.value_or(binomial ? 100000 : 300);
  cfg.sim.horizon = o.horizon.value_or(binomial ? 9 : 30);
  cfg.sim.master_seed = o.seed;
  cfg.sim.s0 = o.s0.value_or(binomial ? 1.0 : 100.0);
  cfg.sim.strike = o.strike.value_or(binomial ? 1.0 : 110.0);
  cfg.sim.discount = o.discount;
  cfg.sim.binomial = {o.up_factor, o.down_factor, o.p_up};
  cfg.sim.gbm = {o.mu, o.sigma, o.dt,
                 o.drift == "standard" ? DriftCorrection::minus_half : DriftCorrection::plus_half};
  cfg.sim.grid = StateGrid(o.grid_lower.value_or(binomial ? 0.0 : 80.0),
                           o.grid_increment.value_or(binomial ? 0.1 : 1.0),
                           o.grid_states.value_or(binomial ? 21 : 41));

  cfg.harness.replications = o.replications.value_or(binomial ? 10 : 30);
  cfg.harness.solver = parse_solver(o.solver);
  cfg.harness.repair = parse_repair(o.repair);
  cfg.harness.baseline =
      o.baseline == "average" ? BaselineMode::snapshot_average : BaselineMode::final_matrix;
  cfg.harness.metric_paper_w = o.metric != "w1";
  cfg.harness.metric_w1 = o.metric != "paper-w";
  cfg.harness.exact_snapshots = o.exact_snapshots;
  cfg.harness.power = {o.power_tol, o.power_max_iter};
  cfg.harness.n_workers = o.workers;
  cfg.harness.dump_paths = o.dump_paths;
  cfg.harness.out_dir = o.out;
  return cfg;
}

void print_summary(const ExperimentResult& result, const std::vector<std::string>& files,
                   const std::string& out) {
  std::cout << result.kind << ": N=" << result.config.n_paths
            << " T=" << result.config.horizon << " R=" << result.options.replications
            << " solver=" << to_string(result.options.solver) << '\n';
  std::cout << "  price_classic=" << format_double(result.price_classic)
            << " price_eigen=" << format_double(result.price_eigen) << '\n';
  if (result.variance_eigen && result.variance_classic) {
    std::cout << "  variance ratio eigen/classic = " << format_double(result.variance_ratio)
              << '\n';
  }
  if (!result.non_converged_replications.empty()) {
    std::cout << "  WARNING: " << result.non_converged_replications.size()
              << " replication(s) did not converge (see manifest.json)\n";
  }
  std::cout << "  wrote " << files.size() << " file(s) to " << out << '\n';
}

int run_single(const CliOptions& o, Model model) {
  const ExperimentConfig cfg = build_config(o, model);
  const ExperimentResult result = model == Model::binomial ? run_binomial_experiment(cfg)
                                                           : run_diffusion_experiment(cfg);
  const auto files = write_outputs(result, o.out, o.dump_matrix);
  print_summary(result, files, o.out);
  return 0;
}

int run_sweep_command(const CliOptions& o) {
  const Model model = o.model == "gbm" ? Model::gbm : Model::binomial;
  SweepSpec spec;
  spec.base = build_config(o, model);
  spec.base.harness.dump_paths = false;
  spec.paths = o.sweep_paths;
  spec.horizons = o.sweep_horizon;
  spec.grid_states = o.sweep_grid_states;
  spec.sigmas = o.sweep_sigma;
  spec.mus = o.sweep_mu;

  const auto cells = run_sweep(spec);
  const auto files = write_sweep_outputs(cells, o.out, o.dump_matrix);
  int ran = 0, skipped = 0;
  for (const auto& c : cells) (c.skipped ? skipped : ran)++;
  std::cout << "sweep: " << ran << " cell(s) ran, " << skipped << " skipped; wrote "
            << files.size() << " file(s) to " << o.out << '\n';
  return 0;
}

// Splices config-file tokens in front of the remaining arguments of the
// subcommand so the command line keeps precedence.
std::vector<std::string> splice_config(int argc, char** argv) {
  std::vector<std::string> args;
  std::string config_file;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) {
      config_file = argv[i + 1];
    } else if (a.rfind("--config=", 0) == 0) {
      config_file = a.substr(9);
    }
    args.push_back(a);
  }
  if (!config_file.empty() && !args.empty()) {
    const auto file_tokens = config_tokens(config_file);
    args.insert(args.begin() + 1, file_tokens.begin(), file_tokens.end());
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("eigenmc ") + kVersion +
               " - steady-state Monte Carlo experiments"};
  app.require_subcommand(1);

  CliOptions bin_opts, diff_opts, sweep_opts;
  CLI::App* bin = app.add_subcommand("binomial", "multiplicative up/down walk experiment");
  add_common_options(bin, bin_opts);
  CLI::App* diff = app.add_subcommand("diffusion", "lognormal diffusion experiment");
  add_common_options(diff, diff_opts);
  CLI::App* sweep = app.add_subcommand("sweep", "cross-product parameter sweep");
  add_common_options(sweep, sweep_opts);
  last(sweep->add_option("--model", sweep_opts.model, "base model for every cell")
           ->check(CLI::IsMember({"binomial", "gbm"})));
  sweep->add_option("--sweep-paths", sweep_opts.sweep_paths, "N values")->delimiter(',');
  sweep->add_option("--sweep-horizon", sweep_opts.sweep_horizon, "T values")->delimiter(',');
  sweep->add_option("--sweep-grid-states", sweep_opts.sweep_grid_states, "grid sizes")
      ->delimiter(',');
  sweep->add_option("--sweep-sigma", sweep_opts.sweep_sigma, "sigma values")->delimiter(',');
  sweep->add_option("--sweep-mu", sweep_opts.sweep_mu, "mu values")->delimiter(',');

  try {
    const auto args = splice_config(argc, argv);
    std::vector<const char*> cargs{argv[0]};
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (bin->parsed()) return run_single(bin_opts, Model::binomial);
    if (diff->parsed()) return run_single(diff_opts, Model::gbm);
    return run_sweep_command(sweep_opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
