#include "mlmcq/error_semantics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mlmcq/errors.hpp"
#include "mlmcq/mc_engine.hpp"

namespace mlmcq {
namespace {

constexpr double kSingleRunFailure = 0.25;
constexpr double kTargetFailure = 0.01;

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("error guarantee: epsilon must be positive and finite");
}

}  // namespace

ErrorKind parse_error_kind(std::string_view name) {
  if (name == "mse") return ErrorKind::Mse;
  if (name == "additive") return ErrorKind::Additive;
  throw InvalidArgument(fmt::format("unknown error kind '{}' (expected mse|additive)", name));
}

std::string_view error_kind_name(ErrorKind kind) { return kind == ErrorKind::Mse ? "mse" : "additive"; }

double binomial_upper_tail(unsigned k, double p, unsigned threshold) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binomial_upper_tail: p must lie in [0, 1]");
  double sum = 0.0;
  for (unsigned j = threshold; j <= k; ++j) {
    const double log_c = std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0);
    sum += std::exp(log_c) * std::pow(p, j) * std::pow(1.0 - p, k - j);
  }
  return sum;
}

unsigned powering_repeats(double p_fail, double target) {
  if (!(p_fail >= 0.0 && p_fail < 0.5)) throw InvalidArgument("powering_repeats: need 0 <= p_fail < 1/2");
  if (!(target > 0.0 && target < 1.0)) throw InvalidArgument("powering_repeats: target must lie in (0, 1)");
  for (unsigned k = 1;; k += 2)
    if (binomial_upper_tail(k, p_fail, (k + 1) / 2) <= target) return k;
}

unsigned odd_at_least(unsigned k) { return k % 2 == 1 ? k : k + 1; }

ErrorGuarantee mse_to_additive(double mse_eps) {
  check_eps(mse_eps);
  return {ErrorKind::Additive, 3.0 * mse_eps, 0.99, powering_repeats(kSingleRunFailure, kTargetFailure)};
}

ErrorGuarantee additive_to_mse(double add_eps, double confidence, double c) {
  check_eps(add_eps);
  if (!(add_eps < 1.0)) throw InvalidArgument("additive_to_mse: epsilon must be below 1");
  if (!(confidence > 0.5 && confidence < 1.0)) throw InvalidArgument("additive_to_mse: confidence must lie in (1/2, 1)");
  if (!(c > 0.0)) throw InvalidArgument("additive_to_mse: c must be positive");
  const auto repeats = static_cast<unsigned>(std::max(1.0, std::ceil(c * std::log2(1.0 / add_eps))));
  return {ErrorKind::Mse, std::sqrt(2.0) * add_eps, 1.0, repeats};
}

double boosted(const ErrorGuarantee& g, const std::function<double(std::uint32_t)>& run, unsigned workers) {
  return median_boost(run, odd_at_least(g.repeats), workers);
}

std::string describe(const ErrorGuarantee& g) {
  if (g.kind == ErrorKind::Mse) return fmt::format("mse {:g}^2 ({} runs)", g.epsilon, g.repeats);
  return fmt::format("additive {:g} @ {:g} ({} runs)", g.epsilon, g.confidence, g.repeats);
}

}  // namespace mlmcq
