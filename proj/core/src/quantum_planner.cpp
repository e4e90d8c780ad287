#include "mlmcq/quantum_planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <mpfr.h>

#include "mlmcq/errors.hpp"

namespace mlmcq {
namespace {

constexpr mpfr_prec_t kPrec = 256;

class Mpfr {
 public:
  Mpfr() { mpfr_init2(v_, kPrec); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

}  // namespace

std::uint64_t qamc_queries(double sigma, double eps, double delta) {
  if (!(sigma > 0.0)) throw InvalidArgument("qamc_queries: sigma must be positive");
  if (!(eps > 0.0)) throw InvalidArgument("qamc_queries: eps must be positive");
  if (!(eps < sigma)) throw InvalidArgument("qamc_queries: need eps < sigma");
  if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("qamc_queries: need 0 < delta < 1/2");
  const double ratio = sigma / eps;
  const double lg = std::log2(ratio);
  const double loglog = std::max(1.0, std::log2(lg));
  const double q = std::ceil(ratio * std::pow(lg, 1.5) * loglog * std::ceil(std::log2(1.0 / delta)));
  return static_cast<std::uint64_t>(std::max(1.0, q));
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::A: return "a";
    case Regime::B: return "b";
    case Regime::C: return "c";
  }
  return "?";
}

Regime select_regime(double beta, double gamma) {
  const double beta_hat = beta / 2.0;
  if (beta_hat > gamma) return Regime::A;
  if (beta_hat == gamma) return Regime::B;
  return Regime::C;
}

PlanCertificate certify(const QaPlan& plan) {
  PlanCertificate cert;
  Mpfr half_eps, bias, sum;
  mpfr_set_d(half_eps.get(), plan.eps, MPFR_RNDN);
  mpfr_div_2ui(half_eps.get(), half_eps.get(), 1, MPFR_RNDN);  // exact

  // 2^{-alpha L}, rounded up.
  mpfr_set_d(bias.get(), plan.alpha, MPFR_RNDN);
  mpfr_mul_si(bias.get(), bias.get(), -plan.L, MPFR_RNDN);  // exact at this precision
  mpfr_exp2(bias.get(), bias.get(), MPFR_RNDU);
  cert.level_bias_ok = mpfr_lessequal_p(bias.get(), half_eps.get()) != 0;

  std::vector<Mpfr> terms(plan.eps_l.size());
  std::vector<mpfr_ptr> ptrs;
  for (std::size_t i = 0; i < plan.eps_l.size(); ++i) {
    mpfr_set_d(terms[i].get(), plan.eps_l[i], MPFR_RNDN);
    ptrs.push_back(terms[i].get());
  }
  mpfr_sum(sum.get(), ptrs.data(), static_cast<unsigned long>(ptrs.size()), MPFR_RNDU);
  cert.budget_ok = mpfr_lessequal_p(sum.get(), half_eps.get()) != 0;
  return cert;
}

QaPlan plan_qamlmc(double eps, double alpha, double beta, double gamma) {
  if (!(eps > 0.0 && eps < 1.0 / std::numbers::e))
    throw InvalidArgument(fmt::format("plan_qamlmc: need 0 < eps < 1/e, got eps = {}", eps));
  if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta) ||
      !std::isfinite(gamma))
    throw InvalidArgument("plan_qamlmc: alpha, beta, gamma must be positive and finite");
  if (!(alpha >= std::min(beta / 2.0, gamma)))
    throw InvalidArgument(fmt::format("plan_qamlmc: alpha >= min(beta/2, gamma) violated ({} < min({}, {}))", alpha,
                                      beta / 2.0, gamma));

  QaPlan p;
  p.eps = eps;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.beta_hat = beta / 2.0;
  p.regime = select_regime(beta, gamma);
  p.L = static_cast<int>(std::ceil(std::log2(2.0 / eps) / alpha));
  p.L = std::max(p.L, 0);
  // Rounding in the ceiling argument can leave 2^{-alpha L} a hair above eps/2.
  for (;;) {
    p.eps_l.clear();
    if (certify(p).level_bias_ok) break;
    ++p.L;
  }
  p.delta = 1.0 / (100.0 * (p.L + 1));

  const double d = std::fabs(p.beta_hat - gamma);
  const double q = 1.0 - std::exp2(-d / 2.0);
  for (int l = 0; l <= p.L; ++l) {
    double e = 0.0;
    switch (p.regime) {
      case Regime::A: e = eps / 2.0 * q * std::exp2(-d * l / 2.0); break;
      case Regime::B: e = eps / (2.0 * (p.L + 1)); break;
      case Regime::C: e = eps / 2.0 * std::exp2(-d * p.L / 2.0) * q * std::exp2(d * l / 2.0); break;
    }
    p.eps_l.push_back(e);
  }
  // The geometric bounds are strict, so a relative shrink absorbs double rounding.
  for (int attempt = 0; !certify(p).budget_ok; ++attempt) {
    if (attempt == 60) throw std::logic_error("plan_qamlmc: could not certify the error budget");
    for (double& e : p.eps_l) e *= 1.0 - 1e-15 * std::exp2(attempt);
  }

  for (int l = 0; l <= p.L; ++l) {
    const double n = std::ceil(std::exp2(-p.beta_hat * l) / p.eps_l[static_cast<std::size_t>(l)]);
    p.n_l.push_back(n);
    p.level_cost.push_back(n * std::exp2(gamma * l));
    p.base_cost += p.level_cost.back();
  }
  const double log_inv_eps = std::log2(1.0 / eps);
  p.polylog = std::log2(1.0 / p.delta) * std::pow(log_inv_eps, 1.5) * std::max(1.0, std::log2(log_inv_eps));
  p.total_cost = p.base_cost * p.polylog;
  return p;
}

double stated_polylog(const QaPlan& plan) {
  const double extra = plan.regime == Regime::B ? static_cast<double>(plan.L + 1) * (plan.L + 1) : 1.0;
  return plan.polylog * extra;
}

double reduced_cost(const QaPlan& plan) { return plan.total_cost / stated_polylog(plan); }

std::string_view method_name(Method m) {
  switch (m) {
    case Method::MC: return "mc";
    case Method::MLMC: return "mlmc";
    case Method::QaMc: return "qa-mc";
    case Method::QaMlmc: return "qa-mlmc";
    case Method::Bopm: return "bopm";
    case Method::QaBopm: return "qa-bopm";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::MC, Method::MLMC, Method::QaMc, Method::QaMlmc, Method::Bopm, Method::QaBopm})
    if (method_name(m) == name) return m;
  throw InvalidArgument(fmt::format("unknown method '{}'", name));
}

CostExponent mlmc_complexity_exponent(double alpha, double beta, double gamma) {
  CostExponent c;
  c.method = Method::MLMC;
  if (beta > gamma) {
    c.exponent = 2.0;
  } else if (beta == gamma) {
    c.exponent = 2.0;
    c.log_power = 2.0;
    c.log_factor = "(log 1/eps)^2";
  } else {
    c.exponent = 2.0 + (gamma - beta) / alpha;
  }
  return c;
}

CostExponent qamlmc_complexity_exponent(double alpha, double beta, double gamma) {
  CostExponent c;
  c.method = Method::QaMlmc;
  const double beta_hat = beta / 2.0;
  c.log_power = 1.5;
  c.log_factor = "(log 1/eps)^{3/2} (loglog 1/eps)^2";
  if (beta_hat > gamma) {
    c.exponent = 1.0;
  } else if (beta_hat == gamma) {
    c.exponent = 1.0;
    c.log_power = 3.5;
    c.log_factor = "(log 1/eps)^{7/2} (loglog 1/eps)^2";
  } else {
    c.exponent = 1.0 + (gamma - beta_hat) / alpha;
  }
  return c;
}

CostExponent asymptotic_exponents(Method method, double r, PayoffClass payoff_class) {
  const bool r_used = method != Method::Bopm && method != Method::QaBopm;
  if (r_used && !(r > 0.0 && std::isfinite(r))) throw InvalidArgument("asymptotic_exponents: r must be positive");
  CostExponent c;
  c.method = method;
  c.r = r;
  c.payoff_class = payoff_class;
  const bool lipschitz = payoff_class == PayoffClass::GloballyLipschitz;
  const auto need_class = [&] {
    if (payoff_class == PayoffClass::Any)
      throw InvalidArgument(fmt::format("asymptotic_exponents: {} needs a payoff class", method_name(method)));
  };
  switch (method) {
    case Method::MC: c.exponent = 2.0 + 1.0 / r; break;
    case Method::QaMc:
      c.exponent = 1.0 + 1.0 / r;
      c.log_factor = "polylog";
      break;
    case Method::Bopm: c.exponent = 2.0; break;
    case Method::QaBopm:
      c.exponent = 1.0;
      c.log_factor = "polylog";
      break;
    case Method::MLMC:
      need_class();
      if (lipschitz) {
        if (r > 0.5) {
          c.exponent = 2.0;
        } else if (r == 0.5) {
          c.exponent = 2.0;
          c.log_power = 2.0;
          c.log_factor = "(log 1/eps)^2";
        } else {
          c.exponent = 1.0 / r;
        }
      } else if (r > 1.0) {
        c.exponent = 2.0;
      } else {
        c.exponent = 1.0 + 1.0 / r;
        c.o1 = true;
      }
      break;
    case Method::QaMlmc:
      need_class();
      c.log_power = 1.5;
      c.log_factor = "(log 1/eps)^{3/2} (loglog 1/eps)^2";
      if (lipschitz) {
        if (r > 1.0) {
          c.exponent = 1.0;
        } else if (r == 1.0) {
          c.exponent = 1.0;
          c.log_power = 3.5;
          c.log_factor = "(log 1/eps)^{7/2} (loglog 1/eps)^2";
        } else {
          c.exponent = 1.0 / r;
        }
      } else if (r > 2.0) {
        c.exponent = 1.0;
      } else {
        c.exponent = 0.5 + 1.0 / r;
        c.o1 = true;
      }
      break;
  }
  return c;
}

}  // namespace mlmcq
