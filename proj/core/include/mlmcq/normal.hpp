#pragma once

namespace mlmcq {

/// Quantile of the standard normal (Wichura, AS 241, PPND16). p in (0,1).
double inverse_normal_cdf(double p) noexcept;

double normal_cdf(double x) noexcept;
double normal_pdf(double x) noexcept;

}  // namespace mlmcq
