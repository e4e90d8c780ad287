#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlmcq/mc_engine.hpp"
#include "mlmcq/quantum_planner.hpp"

namespace mlmcq {

std::string_view version();

/// gbm | cev | time-decay. cev: relative vol sigma x^(exponent - 1);
/// time-decay: relative vol sigma + amplitude e^{-decay t}.
struct ModelSpec {
  std::string type = "gbm";
  double r = 0.05;
  double sigma = 0.2;
  double maturity = 1.0;
  double s0 = 100.0;
  double strike = 100.0;
  double exponent = 1.0;
  double amplitude = 0.0;
  double decay = 0.0;
};

struct PayoffSpec {
  std::string name = "european";
  std::vector<double> breaks;
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string mode = "mlmc";  // alpha-beta | mlmc | plan | bopm | greeks | strong-order
  ModelSpec model;
  std::string scheme = "milstein";
  PayoffSpec payoff;
  int l_min = 2;
  int l_max = 8;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;

  // mlmc
  double eps = 0.05;
  std::uint64_t pilot = 100;
  int max_level = 20;
  std::optional<double> alpha;
  std::string error_kind = "mse";

  // plan
  double plan_eps = 0.01;
  double plan_alpha = 1.0;
  double plan_beta = 2.0;
  double plan_gamma = 1.0;

  // bopm
  std::string lattice = "crr";
  std::uint64_t lattice_steps = 1024;
  bool exact = false;
  bool first_order = false;

  // greeks
  std::string greek = "delta";
  std::string greek_method = "malliavin";
  double h = 1.0 / 128.0;
  double bump = 0.5;

  // strong-order
  std::vector<int> step_exponents{4, 5, 6, 7, 8, 9};

  // Execution settings; not part of the manifest.
  unsigned workers = 1;
  std::string output;
};

/// Accepts a config or an emitted manifest (its "config" member). Missing keys
/// keep their defaults; unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Everything that determines the results; excludes workers and output.
nlohmann::json config_to_json(const ExperimentConfig& config);
/// {"tool", "version", "config"}.
nlohmann::json manifest(const ExperimentConfig& config);

SdeModel build_model(const ModelSpec& spec);
Payoff build_payoff(const PayoffSpec& spec, double strike);
PricingProblem build_problem(const ExperimentConfig& config);

struct LevelPoint {
  int level = 0;
  std::uint64_t n_samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
};

struct RegressionReport {
  std::vector<LevelPoint> levels;
  double beta_hat = 0.0;
  std::optional<double> alpha_hat;  // nullopt when fewer than two usable means remain
  std::vector<int> beta_levels;
  std::vector<int> alpha_levels;
  std::vector<int> dropped_levels;  // |mean| within 2 standard errors of zero
  std::vector<double> beta_residuals;
  std::vector<double> alpha_residuals;
};

/// Fits over the last four points. Throws DegenerateRegression on a zero variance.
RegressionReport regress_levels(std::vector<LevelPoint> levels);
/// Samples levels l_min..l_max (l_max >= l_min + 3) with config.seed and regresses.
RegressionReport estimate_alpha_beta(const ExperimentConfig& config);
/// Per-level statistics for l_min..l_max under config.seed.
std::vector<LevelPoint> sample_levels(const ExperimentConfig& config);
/// Merges per-seed level statistics level by level, as if from one larger run.
std::vector<LevelPoint> pool_levels(const std::vector<std::vector<LevelPoint>>& runs);

/// Dispatches on mode, writes CSVs and manifest.json into `out_dir`; returns the files written.
std::vector<std::filesystem::path> run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Reference regression estimates for the benchmark GBM setting, if the cell has one.
/// `payoff` is european or digital-appendix; nullopt where no finite value exists.
std::optional<double> reference_beta(Scheme scheme, std::string_view payoff);
std::optional<double> reference_alpha(Scheme scheme, std::string_view payoff);

struct GridConfig {
  ExperimentConfig base;
  std::vector<std::string> schemes{"euler", "milstein", "strong15", "strong2", "strong3"};
  std::vector<std::string> payoffs{"european", "digital-appendix"};
  unsigned seeds = 1;  // seeds base.seed .. base.seed + seeds - 1
};

GridConfig parse_grid(const nlohmann::json& j);
GridConfig load_grid(const std::filesystem::path& path);
nlohmann::json grid_to_json(const GridConfig& grid);

struct TableCell {
  std::string scheme;
  std::string payoff;
  std::optional<double> beta_hat;   // regression on level statistics pooled over seeds
  std::optional<double> alpha_hat;
  std::optional<double> beta_seed_mean;   // mean of per-seed estimates, where defined
  std::optional<double> alpha_seed_mean;
  std::optional<double> beta_ref;
  std::optional<double> alpha_ref;
  unsigned seeds_used = 0;
  std::string status = "ok";  // ok | degenerate (level N) | error: ...
};

/// Per-cell estimates from all seeds; failures are recorded per cell.
std::vector<TableCell> reproduce_tables(const GridConfig& grid);
/// Writes tables.csv and manifest.json.
std::vector<std::filesystem::path> write_tables(const GridConfig& grid, const std::vector<TableCell>& cells,
                                                const std::filesystem::path& out_dir);

struct CostScenario {
  std::string label;
  PricingProblem problem;
  double alpha = 1.0;
  double beta = 2.0;
  double gamma = 1.0;
};

struct CostRow {
  std::string label;
  double eps = 0.0;
  double mlmc_cost = 0.0;     // measured scheme steps
  double qamlmc_cost = 0.0;   // planned, with polylog
  double qamlmc_reduced = 0.0;  // planned, polylog divided out
};

/// Classical MLMC measured cost beside the QA-MLMC plan for each (scenario, eps).
std::vector<CostRow> compare_costs(const std::vector<double>& eps_grid, const std::vector<CostScenario>& scenarios,
                                   const RunOptions& options);

/// Shortest round-trip representation; "nan" for NaN.
std::string format_number(double x);

}  // namespace mlmcq
