#pragma once

#include <span>
#include <vector>

namespace mlmcq {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

/// Ordinary least squares y = intercept + slope * x. Needs two distinct x values.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace mlmcq
