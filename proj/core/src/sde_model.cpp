#include "mlmcq/sde_model.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "mlmcq/errors.hpp"

namespace mlmcq {

SdeModel gbm(double r, double sigma) {
  if (!(sigma >= 0.0)) throw InvalidArgument("gbm: sigma must be non-negative");
  SdeModel m;
  m.drift = [r](double x, double) { return r * x; };
  m.volatility = [sigma](double x, double) { return sigma * x; };
  m.drift_dx = [r](double, double) { return r; };
  m.drift_dxx = [](double, double) { return 0.0; };
  m.volatility_dx = [sigma](double, double) { return sigma; };
  m.volatility_dxx = [](double, double) { return 0.0; };
  m.lipschitz_constant = std::fabs(r) + sigma;
  m.label = fmt::format("gbm(r={}, sigma={})", r, sigma);
  m.gbm = GbmParams{r, sigma};
  return m;
}

LocalVolFunction constant_vol(double level) {
  return {[level](double, double) { return level; }, [](double, double) { return 0.0; },
          [](double, double) { return 0.0; }, fmt::format("constant({})", level)};
}

LocalVolFunction time_decay_vol(double base, double amplitude, double decay) {
  return {[=](double, double t) { return base + amplitude * std::exp(-decay * t); },
          [](double, double) { return 0.0; }, [](double, double) { return 0.0; },
          fmt::format("time-decay({}, {}, {})", base, amplitude, decay)};
}

LocalVolFunction cev_vol(double scale, double exponent) {
  return {[=](double x, double) { return scale * std::pow(x, exponent); },
          [=](double x, double) { return scale * exponent * std::pow(x, exponent - 1.0); },
          [=](double x, double) {
            return scale * exponent * (exponent - 1.0) * std::pow(x, exponent - 2.0);
          },
          fmt::format("cev({}, {})", scale, exponent)};
}

SdeModel local_vol(double r, LocalVolFunction fn) {
  if (!fn.value || !fn.dx || !fn.dxx) throw InvalidArgument("local_vol: volatility function and derivatives required");
  SdeModel m;
  m.drift = [r](double x, double) { return r * x; };
  m.drift_dx = [r](double, double) { return r; };
  m.drift_dxx = [](double, double) { return 0.0; };
  m.volatility = [s = fn.value](double x, double t) { return s(x, t) * x; };
  m.volatility_dx = [s = fn.value, ds = fn.dx](double x, double t) {
    return ds(x, t) * x + s(x, t);
  };
  m.volatility_dxx = [ds = fn.dx, dds = fn.dxx](double x, double t) {
    return dds(x, t) * x + 2.0 * ds(x, t);
  };
  m.label = fmt::format("local-vol(r={}, {})", r, fn.label);
  return m;
}

double gbm_exact_terminal(double s, double r, double sigma, double tau, double w) {
  if (!(s > 0.0)) throw InvalidArgument("gbm_exact_terminal: initial price must be positive");
  if (!(tau >= 0.0)) throw InvalidArgument("gbm_exact_terminal: tau must be non-negative");
  return s * std::exp(sigma * w + (r - 0.5 * sigma * sigma) * tau);
}

AugmentedSystem augment_path_dependent(SdeModel model, PathFunction f, PathFunction g) {
  if (!f) f = [](double) { return 0.0; };
  if (!g) g = [](double) { return 0.0; };
  return AugmentedSystem{std::move(model), std::move(f), std::move(g)};
}

TangentSystem tangent_system(SdeModel model) {
  if (!model.drift_dx || !model.volatility_dx)
    throw InvalidArgument("tangent_system: model must supply drift and volatility derivatives");
  return TangentSystem{std::move(model), 1.0};
}

}  // namespace mlmcq
