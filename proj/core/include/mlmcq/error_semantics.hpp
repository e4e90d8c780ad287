#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace mlmcq {

enum class ErrorKind { Mse, Additive };

ErrorKind parse_error_kind(std::string_view name);  // mse | additive
std::string_view error_kind_name(ErrorKind kind);

/// mse: E(Y - a)^2 <= epsilon^2. additive: |Y - a| <= epsilon with probability >= confidence.
struct ErrorGuarantee {
  ErrorKind kind = ErrorKind::Mse;
  double epsilon = 0.0;
  double confidence = 1.0;  // 1 for mse guarantees
  unsigned repeats = 1;     // runs of the underlying estimator per output
};

/// P(Bin(k, p) >= threshold), summed exactly in double.
double binomial_upper_tail(unsigned k, double p, unsigned threshold);

/// Smallest odd k whose median fails with probability <= target when each run
/// fails independently with probability p_fail < 1/2.
unsigned powering_repeats(double p_fail, double target);

/// Next odd integer >= k.
unsigned odd_at_least(unsigned k);

/// Additive 3 eps at confidence 0.99 from an MSE eps^2 estimator. A single run is
/// within 2 eps with probability >= 3/4 by Chebyshev; the median of `repeats` runs
/// lifts that to 0.99.
ErrorGuarantee mse_to_additive(double mse_eps);

/// MSE 2 eps^2 from an additive (eps, confidence) estimator with bounded
/// (2+delta)-moment, by a median over ceil(c log2(1/eps)) runs.
ErrorGuarantee additive_to_mse(double add_eps, double confidence = 0.99, double c = 4.0);

/// Median over odd_at_least(g.repeats) runs; run(r) is the r-th independent repetition.
double boosted(const ErrorGuarantee& g, const std::function<double(std::uint32_t)>& run, unsigned workers = 1);

/// e.g. "additive 0.15 @ 0.99 (19 runs)".
std::string describe(const ErrorGuarantee& g);

}  // namespace mlmcq
