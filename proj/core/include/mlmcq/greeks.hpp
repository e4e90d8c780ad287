#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "mlmcq/mc_engine.hpp"

namespace mlmcq {

struct DeltaEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t flagged = 0;
  Scheme scheme = Scheme::Euler;
  double h = 0.0;
};

/// Delta of the discounted price from e^{-rT} E[(1/T) P(X_T) sum_k Y_k sigma(X_k)^-1 dW_k],
/// with the tangent Y stepped by the scheme's own derivative map. The model must
/// have no explicit time dependence. Paths where |sigma| drops below sigma_floor
/// (default 1e-6 S0) are flagged. Sample i uses stream (0, i, replicate).
DeltaEstimate delta_malliavin(const PricingProblem& problem, double h, std::uint64_t n_samples,
                              const RunOptions& options, std::optional<double> sigma_floor = std::nullopt);

/// Central difference (V(S0 + bump) - V(S0 - bump)) / (2 bump) with common random numbers.
DeltaEstimate delta_finite_difference(const PricingProblem& problem, double h, std::uint64_t n_samples,
                                      const RunOptions& options, double bump = 0.5);

enum class GreekType { Delta, Gamma, Vega, Theta, Rho };
enum class GreekMethod { Malliavin, FiniteDifference };

GreekType parse_greek_type(std::string_view name);
GreekMethod parse_greek_method(std::string_view name);
std::string_view greek_name(GreekType type);

/// Dispatch by type; only Delta is available, the rest throw NotImplemented.
DeltaEstimate estimate_greek(GreekType type, GreekMethod method, const PricingProblem& problem, double h,
                             std::uint64_t n_samples, const RunOptions& options);

double gamma_malliavin(const PricingProblem& problem, double h, std::uint64_t n_samples, const RunOptions& options);
double vega_malliavin(const PricingProblem& problem, double h, std::uint64_t n_samples, const RunOptions& options);
double theta_malliavin(const PricingProblem& problem, double h, std::uint64_t n_samples, const RunOptions& options);
double rho_malliavin(const PricingProblem& problem, double h, std::uint64_t n_samples, const RunOptions& options);

// Black-Scholes closed forms.

/// Phi(d1), d1 = (ln(s/K) + (r + sigma^2/2) T) / (sigma sqrt T).
double bs_delta_closed_form(double s, double strike, double r, double sigma, double maturity);
double bs_call_price(double s, double strike, double r, double sigma, double maturity);
/// e^{-rT} Phi(d2): discounted price of the plain digital.
double bs_digital_price(double s, double strike, double r, double sigma, double maturity);
/// e^{-rT} phi(d2) / (s sigma sqrt T).
double bs_digital_delta(double s, double strike, double r, double sigma, double maturity);

}  // namespace mlmcq
