#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mlmcq/integrals.hpp"
#include "mlmcq/rng.hpp"
#include "mlmcq/sde_model.hpp"

namespace mlmcq {

enum class Scheme {
  Euler,       // strong order 1/2
  Milstein,    // 1
  Strong15,    // 3/2, Taylor-Ito
  Strong2Gbm,  // 2, Taylor-Stratonovich specialised to GBM
  Strong3Gbm,  // 3, Taylor-Stratonovich specialised to GBM
  ExactGbm,    // closed-form GBM transition; reference sampler, no bias
};

struct SchemeInfo {
  Scheme scheme;
  std::string_view name;
  double nominal_order;  // +inf for ExactGbm
  bool gbm_only;
};

const SchemeInfo& scheme_info(Scheme scheme);
double nominal_strong_order(Scheme scheme);
std::string_view scheme_name(Scheme scheme);
/// euler | milstein | strong15 | strong2 | strong3 | exact
Scheme parse_scheme(std::string_view name);

// Single steps. Every step maps zero drift and zero noise to x unchanged.

double step_euler(const SdeModel& model, double x, double t, double h, double dw);
double step_milstein(const SdeModel& model, double x, double t, double h, double dw);
/// Drift h^2/2 coefficient is mu mu' + sigma^2 mu''/2 (second drift derivative).
double step_strong15(const SdeModel& model, double x, double t, const ItoIntegrals15& I);
/// strat must be built from j1 = dW of this step.
double step_strong2_gbm(const GbmParams& p, double x, double h, const StratIntegrals& strat);
double step_strong3_gbm(const GbmParams& p, double x, double h, const StratIntegrals& strat);

/// Optional quantities integrated along a path.
struct PathFunctionals {
  PathFunction time_integrand;   // Y = sum f(X_k) h
  PathFunction noise_integrand;  // Z = sum g(X_k) dW_k (left point)
  bool tangent = false;          // step Y_t = dX_t/dX_0 with the scheme's own derivative map
  bool malliavin_weight = false; // W = sum tangent_k / sigma(X_k, t_k) dW_k (implies tangent)
  double sigma_floor = 0.0;      // |sigma| below this flags the sample when malliavin_weight is on
};

struct PathResult {
  double terminal = 0.0;
  double time_integral = 0.0;
  double noise_integral = 0.0;
  double tangent = 1.0;
  double weight = 0.0;
  double brownian = 0.0;  // W_T, sum of the increments used
  std::uint64_t steps = 0;
  bool flagged = false;   // non-finite state or volatility-floor hit; other fields unusable
};

/// n uniform steps of size T/n from s0.
PathResult simulate_path(const SdeModel& model, Scheme scheme, double s0, double maturity,
                         std::uint64_t n, RngStream& stream, const PathFunctionals& functionals = {});
PathResult simulate_path(const AugmentedSystem& system, Scheme scheme, double s0, double maturity,
                         std::uint64_t n, RngStream& stream);
PathResult simulate_path(const TangentSystem& system, Scheme scheme, double s0, double maturity,
                         std::uint64_t n, RngStream& stream);

struct CoupledPath {
  PathResult fine;
  PathResult coarse;
};

/// Fine path with n_fine steps and coarse path with n_fine/2 steps on the same
/// Brownian path: coarse increments are pairwise sums of the fine ones. The
/// fine path consumes the stream exactly as simulate_path(n_fine) would.
CoupledPath simulate_coupled(const SdeModel& model, Scheme scheme, double s0, double maturity,
                             std::uint64_t n_fine, RngStream& stream,
                             const PathFunctionals& functionals = {});

struct StrongOrderReport {
  std::vector<double> step_sizes;
  std::vector<double> mean_abs_errors;
  double slope = 0.0;  // least-squares slope of log2(error) on log2(h)
};

/// Strong order against the closed-form GBM solution on the same Brownian path.
/// Uses h = maturity * 2^-k for each k in step_exponents (at least 3 of them).
StrongOrderReport estimate_strong_order(Scheme scheme, const GbmParams& params, double s0,
                                        double maturity, std::span<const int> step_exponents,
                                        std::uint64_t samples, std::uint64_t seed,
                                        unsigned workers = 1);

}  // namespace mlmcq
