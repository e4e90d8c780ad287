#include "mlmcq/greeks.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mlmcq/errors.hpp"
#include "mlmcq/normal.hpp"
#include "mlmcq/parallel.hpp"
#include "mlmcq/stats.hpp"

namespace mlmcq {
namespace {

std::uint64_t steps_for(const PricingProblem& problem, double h) {
  if (!(h > 0.0) || h > problem.maturity) throw InvalidArgument("greeks: step must lie in (0, T]");
  const double steps = problem.maturity / h;
  const double rounded = std::round(steps);
  if (std::fabs(steps - rounded) > 1e-9 * rounded)
    throw InvalidArgument(fmt::format("greeks: T/h = {} is not an integer", steps));
  return static_cast<std::uint64_t>(rounded);
}

void require_terminal_payoff(const Payoff& payoff) {
  if (payoff.needs_time_average() || payoff.needs_stoch_integral())
    throw InvalidArgument(fmt::format("greeks: payoff '{}' is path dependent", payoff.name()));
}

struct Tally {
  RunningStats stats;
  std::uint64_t flagged = 0;
};

DeltaEstimate finish(const std::vector<Tally>& chunks, std::uint64_t n_samples, const RunOptions& options,
                     const PricingProblem& problem, double h) {
  Tally total;
  for (const auto& c : chunks) {
    total.stats.merge(c.stats);
    total.flagged += c.flagged;
  }
  if (static_cast<double>(total.flagged) > options.flagged_limit * static_cast<double>(n_samples))
    throw FlaggedSampleLimit(
        fmt::format("greeks: {} of {} samples flagged (limit {:g})", total.flagged, n_samples, options.flagged_limit));
  return {total.stats.mean, total.stats.standard_error(), total.stats.count, total.flagged, problem.scheme, h};
}

void check_bs(double s, double strike, double sigma, double maturity) {
  if (!(s > 0.0 && strike > 0.0 && sigma > 0.0 && maturity > 0.0))
    throw InvalidArgument("Black-Scholes closed form: need s, K, sigma, T > 0");
}

double d1(double s, double strike, double r, double sigma, double maturity) {
  return (std::log(s / strike) + (r + 0.5 * sigma * sigma) * maturity) / (sigma * std::sqrt(maturity));
}

}  // namespace

DeltaEstimate delta_malliavin(const PricingProblem& problem, double h, std::uint64_t n_samples,
                              const RunOptions& options, std::optional<double> sigma_floor) {
  if (n_samples < 2) throw InvalidArgument("delta_malliavin: need at least two samples");
  require_terminal_payoff(problem.payoff);
  const std::uint64_t n = steps_for(problem, h);
  PathFunctionals fn;
  fn.tangent = true;
  fn.malliavin_weight = true;
  fn.sigma_floor = sigma_floor.value_or(1e-6 * problem.s0);
  if (!(fn.sigma_floor > 0.0)) throw InvalidArgument("delta_malliavin: sigma floor must be positive");
  const double scale = std::exp(-problem.rate * problem.maturity) / problem.maturity;

  auto chunks = parallel_chunks<Tally>(0, n_samples, options.workers, [&](std::uint64_t lo, std::uint64_t hi) {
    Tally t;
    for (std::uint64_t i = lo; i < hi; ++i) {
      RngStream stream(options.seed, StreamId{0, i, options.replicate});
      const PathResult path = simulate_path(problem.model, problem.scheme, problem.s0, problem.maturity, n, stream, fn);
      const double v = path.flagged ? NAN : scale * problem.payoff.evaluate(path.terminal) * path.weight;
      if (std::isfinite(v)) t.stats.push(v);
      else ++t.flagged;
    }
    return t;
  });
  return finish(chunks, n_samples, options, problem, h);
}

DeltaEstimate delta_finite_difference(const PricingProblem& problem, double h, std::uint64_t n_samples,
                                      const RunOptions& options, double bump) {
  if (n_samples < 2) throw InvalidArgument("delta_finite_difference: need at least two samples");
  if (!(bump > 0.0 && bump < problem.s0)) throw InvalidArgument("delta_finite_difference: need 0 < bump < S0");
  const std::uint64_t n = steps_for(problem, h);
  PricingProblem up = problem;
  PricingProblem down = problem;
  up.s0 += bump;
  down.s0 -= bump;

  auto chunks = parallel_chunks<Tally>(0, n_samples, options.workers, [&](std::uint64_t lo, std::uint64_t hi) {
    Tally t;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const StreamId id{0, i, options.replicate};
      RngStream s_up(options.seed, id);
      RngStream s_down(options.seed, id);
      const auto v_up = sample_payoff(up, n, s_up);
      const auto v_down = sample_payoff(down, n, s_down);
      if (v_up && v_down) t.stats.push((*v_up - *v_down) / (2.0 * bump));
      else ++t.flagged;
    }
    return t;
  });
  return finish(chunks, n_samples, options, problem, h);
}

GreekType parse_greek_type(std::string_view name) {
  for (GreekType t : {GreekType::Delta, GreekType::Gamma, GreekType::Vega, GreekType::Theta, GreekType::Rho})
    if (greek_name(t) == name) return t;
  throw InvalidArgument(fmt::format("unknown greek '{}' (expected delta|gamma|vega|theta|rho)", name));
}

GreekMethod parse_greek_method(std::string_view name) {
  if (name == "malliavin") return GreekMethod::Malliavin;
  if (name == "finite-difference") return GreekMethod::FiniteDifference;
  throw InvalidArgument(fmt::format("unknown greek method '{}' (expected malliavin|finite-difference)", name));
}

std::string_view greek_name(GreekType type) {
  switch (type) {
    case GreekType::Delta: return "delta";
    case GreekType::Gamma: return "gamma";
    case GreekType::Vega: return "vega";
    case GreekType::Theta: return "theta";
    case GreekType::Rho: return "rho";
  }
  return "?";
}

DeltaEstimate estimate_greek(GreekType type, GreekMethod method, const PricingProblem& problem, double h,
                             std::uint64_t n_samples, const RunOptions& options) {
  if (type != GreekType::Delta) throw NotImplemented(fmt::format("{} is not implemented", greek_name(type)));
  return method == GreekMethod::Malliavin ? delta_malliavin(problem, h, n_samples, options)
                                          : delta_finite_difference(problem, h, n_samples, options);
}

double gamma_malliavin(const PricingProblem&, double, std::uint64_t, const RunOptions&) {
  throw NotImplemented("gamma is not implemented");
}
double vega_malliavin(const PricingProblem&, double, std::uint64_t, const RunOptions&) {
  throw NotImplemented("vega is not implemented");
}
double theta_malliavin(const PricingProblem&, double, std::uint64_t, const RunOptions&) {
  throw NotImplemented("theta is not implemented");
}
double rho_malliavin(const PricingProblem&, double, std::uint64_t, const RunOptions&) {
  throw NotImplemented("rho is not implemented");
}

double bs_delta_closed_form(double s, double strike, double r, double sigma, double maturity) {
  check_bs(s, strike, sigma, maturity);
  return normal_cdf(d1(s, strike, r, sigma, maturity));
}

double bs_call_price(double s, double strike, double r, double sigma, double maturity) {
  check_bs(s, strike, sigma, maturity);
  const double a = d1(s, strike, r, sigma, maturity);
  const double b = a - sigma * std::sqrt(maturity);
  return s * normal_cdf(a) - strike * std::exp(-r * maturity) * normal_cdf(b);
}

double bs_digital_price(double s, double strike, double r, double sigma, double maturity) {
  check_bs(s, strike, sigma, maturity);
  const double b = d1(s, strike, r, sigma, maturity) - sigma * std::sqrt(maturity);
  return std::exp(-r * maturity) * normal_cdf(b);
}

double bs_digital_delta(double s, double strike, double r, double sigma, double maturity) {
  check_bs(s, strike, sigma, maturity);
  const double b = d1(s, strike, r, sigma, maturity) - sigma * std::sqrt(maturity);
  return std::exp(-r * maturity) * normal_pdf(b) / (s * sigma * std::sqrt(maturity));
}

}  // namespace mlmcq
