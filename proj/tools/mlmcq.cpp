// mlmcq: experiment runner for multilevel and quantum-accelerated Monte Carlo studies.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mlmcq/errors.hpp"
#include "mlmcq/experiments.hpp"

namespace fs = std::filesystem;
using mlmcq::ExperimentConfig;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::string> error_kind;
};

void apply(const Globals& g, ExperimentConfig& c) {
  if (g.seed) c.seed = *g.seed;
  if (g.workers) c.workers = *g.workers;
  if (g.error_kind) c.error_kind = *g.error_kind;
}

fs::path out_dir(const Globals& g, const ExperimentConfig& c) {
  if (g.out) return *g.out;
  if (!c.output.empty()) return c.output;
  return "mlmcq-out";
}

void echo(const std::vector<fs::path>& files) {
  for (const auto& f : files) {
    if (f.extension() != ".csv") continue;
    std::ifstream in(f);
    fmt::print("# {}\n{}", f.string(), std::string(std::istreambuf_iterator<char>(in), {}));
  }
}

// Contract and model options shared by the direct subcommands.
void add_model_options(CLI::App* cmd, ExperimentConfig& c) {
  cmd->add_option("--r", c.model.r, "Risk-free rate")->capture_default_str();
  cmd->add_option("--sigma", c.model.sigma, "Volatility")->capture_default_str();
  cmd->add_option("--T", c.model.maturity, "Maturity")->capture_default_str();
  cmd->add_option("--S0", c.model.s0, "Initial price")->capture_default_str();
  cmd->add_option("--K", c.model.strike, "Strike")->capture_default_str();
  cmd->add_option("--payoff", c.payoff.name, "european|asian|digital|digital-appendix")->capture_default_str();
  cmd->add_option("--samples", c.samples, "Number of samples")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel and quantum-accelerated Monte Carlo experiments"};
  app.set_version_flag("--version", std::string(mlmcq::version()));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Override the RNG seed");
  app.add_option("--workers", g.workers, "Worker threads (results do not depend on it)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--error-kind", g.error_kind, "mse|additive guarantee for mlmc estimates");
  app.fallthrough();

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config or a manifest");
  run_cmd->add_option("config", config_path, "config.json or manifest.json")->required()->check(CLI::ExistingFile);

  std::string grid_path;
  auto* tables_cmd = app.add_subcommand("tables", "Regression tables over a scheme x payoff grid");
  tables_cmd->add_option("grid", grid_path, "grid.json")->required()->check(CLI::ExistingFile);

  ExperimentConfig plan;
  plan.mode = "plan";
  auto* plan_cmd = app.add_subcommand("plan", "QA-MLMC resource plan");
  plan_cmd->add_option("--eps", plan.plan_eps, "Target additive error")->required();
  plan_cmd->add_option("--alpha", plan.plan_alpha)->required();
  plan_cmd->add_option("--beta", plan.plan_beta)->required();
  plan_cmd->add_option("--gamma", plan.plan_gamma)->required();

  ExperimentConfig bopm;
  bopm.mode = "bopm";
  bopm.payoff.name = "digital-appendix";
  auto* bopm_cmd = app.add_subcommand("bopm", "Binomial option pricing");
  add_model_options(bopm_cmd, bopm);
  bopm_cmd->add_option("--model", bopm.lattice, "crr|jr")->capture_default_str();
  bopm_cmd->add_option("--n", bopm.lattice_steps, "Lattice steps")->capture_default_str();
  bopm_cmd->add_flag("--exact", bopm.exact, "Also sum the lattice exactly");
  bopm_cmd->add_flag("--first-order", bopm.first_order, "Linearised lattice factors");

  ExperimentConfig greeks;
  greeks.mode = "greeks";
  greeks.samples = 1000000;
  auto* greeks_cmd = app.add_subcommand("greeks", "Delta estimation");
  add_model_options(greeks_cmd, greeks);
  greeks_cmd->add_option("--type", greeks.greek, "delta|gamma|vega|theta|rho")->capture_default_str();
  greeks_cmd->add_option("--method", greeks.greek_method, "malliavin|finite-difference")->capture_default_str();
  greeks_cmd->add_option("--scheme", greeks.scheme, "euler|milstein|strong2|strong3|exact")->capture_default_str();
  greeks_cmd->add_option("--step", greeks.h, "Time step h")->capture_default_str();
  greeks_cmd->add_option("--bump", greeks.bump, "Finite-difference bump")->capture_default_str();

  ExperimentConfig strong;
  strong.mode = "strong-order";
  strong.scheme = "euler";
  auto* strong_cmd = app.add_subcommand("strong-order", "Strong-order slope against the exact GBM solution");
  add_model_options(strong_cmd, strong);
  strong_cmd->add_option("--scheme", strong.scheme, "euler|milstein|strong15|strong2|strong3")->capture_default_str();
  strong_cmd->add_option("--exponents", strong.step_exponents, "Step exponents k, h = T 2^-k");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (tables_cmd->parsed()) {
      mlmcq::GridConfig grid = mlmcq::load_grid(grid_path);
      apply(g, grid.base);
      const auto cells = mlmcq::reproduce_tables(grid);
      echo(mlmcq::write_tables(grid, cells, out_dir(g, grid.base)));
      return 0;
    }
    ExperimentConfig config;
    if (run_cmd->parsed()) config = mlmcq::load_config(config_path);
    else if (plan_cmd->parsed()) config = plan;
    else if (bopm_cmd->parsed()) config = bopm;
    else if (greeks_cmd->parsed()) config = greeks;
    else config = strong;
    apply(g, config);
    // Round-trip through JSON so direct subcommands get the same validation as configs.
    const unsigned workers = config.workers;
    const std::string output = config.output;
    config = mlmcq::parse_config(mlmcq::config_to_json(config));
    config.workers = workers;
    config.output = output;
    echo(mlmcq::run(config, out_dir(g, config)));
  } catch (const mlmcq::NotImplemented& e) {
    fmt::print(stderr, "mlmcq: not implemented: {}\n", e.what());
    return 3;
  } catch (const mlmcq::InvalidArgument& e) {
    fmt::print(stderr, "mlmcq: invalid argument: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "mlmcq: {}\n", e.what());
    return 1;
  }
  return 0;
}
