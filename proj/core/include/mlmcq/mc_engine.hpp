#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mlmcq/payoffs.hpp"
#include "mlmcq/rng.hpp"
#include "mlmcq/schemes.hpp"
#include "mlmcq/sde_model.hpp"

namespace mlmcq {

/// What to price: model, scheme, payoff and contract data.
struct PricingProblem {
  SdeModel model;
  Scheme scheme = Scheme::Milstein;
  Payoff payoff = european(100.0);
  double s0 = 100.0;
  double maturity = 1.0;
  double rate = 0.0;             // discount rate
  PathFunction noise_integrand;  // g in int g(X) dW; required by payoffs that read it
};

/// Steps at level l: n_l = 2^l, so h_l = T 2^-l.
std::uint64_t level_steps(int level);
/// Scheme steps per sample at level l: n_l + n_{l-1}, or 1 at level 0.
double level_cost(int level);

struct RunOptions {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::uint32_t replicate = 0;
  double flagged_limit = 1e-4;  // tolerated fraction of flagged samples
};

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double cost = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t flagged = 0;
};

/// Discounted payoff of one path with n steps; nullopt when the path is flagged.
std::optional<double> sample_payoff(const PricingProblem& problem, std::uint64_t n, RngStream& stream);

/// Plain Monte Carlo with step h (T/h must be an integer). Sample i uses stream
/// (level 0, sample i, replicate).
McResult plain_mc(const PricingProblem& problem, double h, std::uint64_t n_samples, const RunOptions& options);

/// P_0 at level 0, P_l - P_{l-1} on a shared Brownian path otherwise. nullopt when flagged.
std::optional<double> sample_level_difference(int level, const PricingProblem& problem, RngStream& stream);

struct LevelStats {
  int level = 0;
  std::uint64_t n_samples = 0;
  double mean = 0.0;
  double variance = 0.0;
  double unit_cost = 0.0;
  std::uint64_t flagged = 0;
};

/// Samples [first, first + count) of level l, each on stream (l, i, replicate).
LevelStats sample_level(int level, const PricingProblem& problem, std::uint64_t first, std::uint64_t count,
                        const RunOptions& options);

struct MlmcOptions {
  double eps = 0.05;                // target root-mean-square error
  std::uint64_t pilot = 100;        // samples per newly added level
  int min_level = 2;
  int max_level = 20;               // hard cap on L
  std::optional<double> alpha;      // bias decay rate; defaults to the scheme's nominal strong order
  RunOptions run;
};

struct MlmcEstimate {
  double estimate = 0.0;
  std::vector<LevelStats> levels;
  int L = 0;
  double target_eps = 0.0;
  double achieved_variance = 0.0;  // sum V_l / N_l
  double bias_proxy = 0.0;         // |mean_L| / (2^alpha - 1)
  double total_cost = 0.0;         // sum N_l C_l
  double alpha = 0.0;
};

/// N_l = ceil(lambda sqrt(V_l / C_l)), lambda = 2 eps^-2 sum sqrt(V_l C_l).
std::vector<std::uint64_t> optimal_allocation(const std::vector<double>& variances,
                                              const std::vector<double>& costs, double eps);

MlmcEstimate mlmc(const PricingProblem& problem, const MlmcOptions& options);

/// Median of k runs; run(r) must be an independent repetition for each r in [0, k).
double median_boost(const std::function<double(std::uint32_t replicate)>& run, unsigned k, unsigned workers = 1);

}  // namespace mlmcq
