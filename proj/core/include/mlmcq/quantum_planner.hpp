#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mlmcq {

/// Amplitude-estimation query count for standard deviation bound sigma, error eps
/// and failure probability delta. All logs base 2; log-log factor floored at 1;
/// never below 1.
std::uint64_t qamc_queries(double sigma, double eps, double delta);

enum class Regime { A, B, C };  // beta/2 > gamma, beta/2 == gamma, beta/2 < gamma

std::string_view regime_name(Regime r);
Regime select_regime(double beta, double gamma);

/// Resource plan for quantum-accelerated MLMC. Never executes anything.
struct QaPlan {
  double eps = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double beta_hat = 0.0;
  Regime regime = Regime::A;
  int L = 0;
  double delta = 0.0;
  std::vector<double> eps_l;
  std::vector<double> n_l;         // ceil(2^{-beta_hat l} / eps_l)
  std::vector<double> level_cost;  // n_l 2^{gamma l}
  double base_cost = 0.0;          // sum of level_cost
  double polylog = 0.0;            // log(1/delta) (log 1/eps)^{3/2} max(1, loglog 1/eps)
  double total_cost = 0.0;         // base_cost * polylog
};

/// Requires 0 < eps < 1/e and alpha >= min(beta/2, gamma). Both error budgets
/// (2^{-alpha L} <= eps/2 and sum eps_l <= eps/2) are certified with directed
/// rounding before the plan is returned.
QaPlan plan_qamlmc(double eps, double alpha, double beta, double gamma);

/// Polylog factor of the QA-MLMC cost bound for this plan's regime: the
/// applied factor, times (L+1)^2 in the boundary regime.
double stated_polylog(const QaPlan& plan);
/// total_cost / stated_polylog.
double reduced_cost(const QaPlan& plan);

struct PlanCertificate {
  bool level_bias_ok = false;  // 2^{-alpha L} <= eps/2
  bool budget_ok = false;      // sum eps_l <= eps/2
  bool ok() const { return level_bias_ok && budget_ok; }
};

/// Upper-rounded multiple-precision check of both error budgets.
PlanCertificate certify(const QaPlan& plan);

enum class Method { MC, MLMC, QaMc, QaMlmc, Bopm, QaBopm };
enum class PayoffClass { Any, GloballyLipschitz, PiecewiseLipschitz };

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// Cost ~ eps^{-exponent} times log(1/eps)^log_power; o1 marks an arbitrarily small extra exponent.
struct CostExponent {
  Method method = Method::MC;
  double r = 0.0;
  PayoffClass payoff_class = PayoffClass::Any;
  double exponent = 0.0;
  double log_power = 0.0;
  bool o1 = false;
  std::string log_factor;
};

/// Exponent of 1/eps for a method with a strong-order-r scheme. MC and QA-MC
/// accept any payoff class; MLMC and QA-MLMC need a specific class; BOPM and
/// QA-BOPM ignore r.
CostExponent asymptotic_exponents(Method method, double r, PayoffClass payoff_class);

/// Classical MLMC cost exponent in terms of (alpha, beta, gamma).
CostExponent mlmc_complexity_exponent(double alpha, double beta, double gamma);
/// QA-MLMC cost exponent in terms of (alpha, beta, gamma), beta_hat = beta/2.
CostExponent qamlmc_complexity_exponent(double alpha, double beta, double gamma);

}  // namespace mlmcq
