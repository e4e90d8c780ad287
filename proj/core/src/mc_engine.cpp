#include "mlmcq/mc_engine.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mlmcq/errors.hpp"
#include "mlmcq/parallel.hpp"
#include "mlmcq/stats.hpp"

namespace mlmcq {
namespace {

constexpr int kMaxLevel = 40;

void check_level(int level) {
  if (level < 0 || level > kMaxLevel) throw InvalidArgument(fmt::format("level {} outside [0, {}]", level, kMaxLevel));
}

PathFunctionals functionals_for(const PricingProblem& problem) {
  PathFunctionals fn;
  if (problem.payoff.needs_time_average()) fn.time_integrand = [](double x) { return x; };
  if (problem.payoff.needs_stoch_integral()) {
    if (!problem.noise_integrand)
      throw InvalidArgument(fmt::format("payoff '{}' needs a noise integrand", problem.payoff.name()));
    fn.noise_integrand = problem.noise_integrand;
  }
  return fn;
}

std::optional<double> discounted_payoff(const PricingProblem& problem, const PathResult& path) {
  if (path.flagged) return std::nullopt;
  PathValues values{path.terminal, {}, {}};
  if (problem.payoff.needs_time_average()) values.time_average = path.time_integral / problem.maturity;
  if (problem.payoff.needs_stoch_integral()) values.stoch_integral = path.noise_integral;
  const double v = discount(problem.payoff.evaluate(values), problem.rate, problem.maturity);
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

struct Tally {
  RunningStats stats;
  std::uint64_t flagged = 0;

  void merge(const Tally& other) {
    stats.merge(other.stats);
    flagged += other.flagged;
  }
};

void check_flagged(std::uint64_t flagged, std::uint64_t attempted, double limit, int level) {
  if (attempted > 0 && static_cast<double>(flagged) > limit * static_cast<double>(attempted))
    throw FlaggedSampleLimit(fmt::format("level {}: {} of {} samples flagged (limit {:g})", level, flagged,
                                         attempted, limit));
}

}  // namespace

std::uint64_t level_steps(int level) {
  check_level(level);
  return std::uint64_t{1} << level;
}

double level_cost(int level) {
  check_level(level);
  return level == 0 ? 1.0 : static_cast<double>(level_steps(level) + level_steps(level - 1));
}

std::optional<double> sample_payoff(const PricingProblem& problem, std::uint64_t n, RngStream& stream) {
  return discounted_payoff(
      problem, simulate_path(problem.model, problem.scheme, problem.s0, problem.maturity, n, stream,
                             functionals_for(problem)));
}

McResult plain_mc(const PricingProblem& problem, double h, std::uint64_t n_samples, const RunOptions& options) {
  if (n_samples < 2) throw InvalidArgument("plain_mc: need at least two samples");
  if (!(h > 0.0) || h > problem.maturity) throw InvalidArgument("plain_mc: step must lie in (0, T]");
  const double steps = problem.maturity / h;
  const double rounded = std::round(steps);
  if (std::fabs(steps - rounded) > 1e-9 * rounded)
    throw InvalidArgument(fmt::format("plain_mc: T/h = {} is not an integer", steps));
  const auto n = static_cast<std::uint64_t>(rounded);
  const PathFunctionals fn = functionals_for(problem);

  auto chunks = parallel_chunks<Tally>(0, n_samples, options.workers, [&](std::uint64_t lo, std::uint64_t hi) {
    Tally t;
    for (std::uint64_t i = lo; i < hi; ++i) {
      RngStream stream(options.seed, StreamId{0, i, options.replicate});
      const auto v = discounted_payoff(
          problem, simulate_path(problem.model, problem.scheme, problem.s0, problem.maturity, n, stream, fn));
      if (v) t.stats.push(*v);
      else ++t.flagged;
    }
    return t;
  });
  Tally total;
  for (const auto& c : chunks) total.merge(c);
  check_flagged(total.flagged, n_samples, options.flagged_limit, 0);

  McResult r;
  r.estimate = total.stats.mean;
  r.std_error = total.stats.standard_error();
  r.n_samples = total.stats.count;
  r.flagged = total.flagged;
  r.cost = static_cast<double>(n_samples) * static_cast<double>(n);
  return r;
}

std::optional<double> sample_level_difference(int level, const PricingProblem& problem, RngStream& stream) {
  const std::uint64_t n = level_steps(level);
  if (level == 0) return sample_payoff(problem, n, stream);
  const CoupledPath path = simulate_coupled(problem.model, problem.scheme, problem.s0, problem.maturity, n,
                                            stream, functionals_for(problem));
  const auto fine = discounted_payoff(problem, path.fine);
  const auto coarse = discounted_payoff(problem, path.coarse);
  if (!fine || !coarse) return std::nullopt;
  return *fine - *coarse;
}

namespace {

Tally sample_level_tally(int level, const PricingProblem& problem, std::uint64_t first, std::uint64_t count,
                         const RunOptions& options) {
  check_level(level);
  auto chunks = parallel_chunks<Tally>(first, first + count, options.workers, [&](std::uint64_t lo, std::uint64_t hi) {
    Tally t;
    for (std::uint64_t i = lo; i < hi; ++i) {
      RngStream stream(options.seed, StreamId{static_cast<std::uint32_t>(level), i, options.replicate});
      const auto v = sample_level_difference(level, problem, stream);
      if (v) t.stats.push(*v);
      else ++t.flagged;
    }
    return t;
  });
  Tally total;
  for (const auto& c : chunks) total.merge(c);
  return total;
}

LevelStats to_stats(int level, const Tally& t) {
  return {level, t.stats.count, t.stats.mean, t.stats.variance(), level_cost(level), t.flagged};
}

}  // namespace

LevelStats sample_level(int level, const PricingProblem& problem, std::uint64_t first, std::uint64_t count,
                        const RunOptions& options) {
  const Tally t = sample_level_tally(level, problem, first, count, options);
  check_flagged(t.flagged, count, options.flagged_limit, level);
  return to_stats(level, t);
}

std::vector<std::uint64_t> optimal_allocation(const std::vector<double>& variances,
                                              const std::vector<double>& costs, double eps) {
  if (variances.size() != costs.size()) throw InvalidArgument("optimal_allocation: size mismatch");
  if (!(eps > 0.0)) throw InvalidArgument("optimal_allocation: eps must be positive");
  double sum = 0.0;
  for (std::size_t l = 0; l < variances.size(); ++l) {
    if (variances[l] < 0.0 || !(costs[l] > 0.0)) throw InvalidArgument("optimal_allocation: need V_l >= 0 and C_l > 0");
    sum += std::sqrt(variances[l] * costs[l]);
  }
  const double lambda = 2.0 / (eps * eps) * sum;
  std::vector<std::uint64_t> n(variances.size());
  for (std::size_t l = 0; l < variances.size(); ++l)
    n[l] = static_cast<std::uint64_t>(std::ceil(lambda * std::sqrt(variances[l] / costs[l])));
  return n;
}

MlmcEstimate mlmc(const PricingProblem& problem, const MlmcOptions& options) {
  if (!(options.eps > 0.0)) throw InvalidArgument("mlmc: eps must be positive");
  if (options.pilot < 2) throw InvalidArgument("mlmc: pilot must be at least 2");
  if (options.min_level < 0 || options.min_level > options.max_level || options.max_level > kMaxLevel)
    throw InvalidArgument("mlmc: need 0 <= min_level <= max_level <= 40");
  const double alpha = options.alpha.value_or(nominal_strong_order(problem.scheme));
  if (!(alpha > 0.0)) throw InvalidArgument("mlmc: alpha must be positive");
  const double eps2 = options.eps * options.eps;

  std::vector<Tally> tallies;
  std::vector<std::uint64_t> attempted;
  auto top_up = [&](int level, std::uint64_t count) {
    if (count == 0) return;
    const auto l = static_cast<std::size_t>(level);
    tallies[l].merge(sample_level_tally(level, problem, attempted[l], count, options.run));
    attempted[l] += count;
    if (tallies[l].stats.count < 2)
      throw FlaggedSampleLimit(fmt::format("level {}: fewer than two usable samples", level));
  };
  auto variances = [&] {
    std::vector<double> v;
    for (const auto& t : tallies) v.push_back(t.stats.variance());
    return v;
  };
  auto costs = [&] {
    std::vector<double> c;
    for (std::size_t l = 0; l < tallies.size(); ++l) c.push_back(level_cost(static_cast<int>(l)));
    return c;
  };
  auto achieved = [&] {
    double s = 0.0;
    for (const auto& t : tallies) s += t.stats.variance() / static_cast<double>(t.stats.count);
    return s;
  };
  // Samples until the current levels meet the allocation and the variance budget.
  auto fill = [&] {
    for (;;) {
      const auto target = optimal_allocation(variances(), costs(), options.eps);
      bool added = false;
      for (std::size_t l = 0; l < tallies.size(); ++l) {
        if (target[l] > tallies[l].stats.count) {
          top_up(static_cast<int>(l), target[l] - tallies[l].stats.count);
          added = true;
        }
      }
      if (!added && achieved() <= eps2 / 2.0) return;
      if (!added) {
        // Rounding left the budget just short; grow every level by 1%.
        for (std::size_t l = 0; l < tallies.size(); ++l)
          top_up(static_cast<int>(l), std::max<std::uint64_t>(1, tallies[l].stats.count / 100));
      }
    }
  };

  int L = options.min_level;
  for (int l = 0; l <= L; ++l) {
    tallies.emplace_back();
    attempted.push_back(0);
    top_up(l, options.pilot);
  }
  const double bias_divisor = std::exp2(alpha) - 1.0;
  double bias = 0.0;
  for (;;) {
    fill();
    bias = std::fabs(tallies.back().stats.mean) / bias_divisor;
    if (bias <= options.eps / std::sqrt(2.0)) break;
    if (L + 1 > options.max_level)
      throw LevelCapExceeded(fmt::format("mlmc: bias proxy {:g} still above {:g} at level cap {} (eps {:g}, alpha {:g})",
                                         bias, options.eps / std::sqrt(2.0), options.max_level, options.eps, alpha));
    ++L;
    tallies.emplace_back();
    attempted.push_back(0);
    top_up(L, options.pilot);
  }

  MlmcEstimate est;
  est.L = L;
  est.target_eps = options.eps;
  est.alpha = alpha;
  est.bias_proxy = bias;
  for (std::size_t l = 0; l < tallies.size(); ++l) {
    const int level = static_cast<int>(l);
    check_flagged(tallies[l].flagged, attempted[l], options.run.flagged_limit, level);
    est.levels.push_back(to_stats(level, tallies[l]));
    est.estimate += tallies[l].stats.mean;
    est.total_cost += static_cast<double>(attempted[l]) * level_cost(level);
  }
  est.achieved_variance = achieved();
  return est;
}

double median_boost(const std::function<double(std::uint32_t)>& run, unsigned k, unsigned workers) {
  if (k == 0 || k % 2 == 0) throw InvalidArgument(fmt::format("median_boost: k must be odd and positive, got {}", k));
  if (!run) throw InvalidArgument("median_boost: no estimator");
  auto values = parallel_chunks<double>(
      0, k, workers, [&](std::uint64_t lo, std::uint64_t) { return run(static_cast<std::uint32_t>(lo)); }, 1);
  std::nth_element(values.begin(), values.begin() + k / 2, values.end());
  return values[k / 2];
}

}  // namespace mlmcq
