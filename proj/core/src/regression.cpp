#include "mlmcq/regression.hpp"

#include "mlmcq/errors.hpp"

namespace mlmcq {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("fit_line: x and y differ in length");
  if (x.size() < 2) throw InvalidArgument("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_line: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.residuals.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) fit.residuals.push_back(y[i] - (fit.intercept + fit.slope * x[i]));
  return fit;
}

}  // namespace mlmcq
