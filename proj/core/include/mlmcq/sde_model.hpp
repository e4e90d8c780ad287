#pragma once

#include <functional>
#include <optional>
#include <string>

namespace mlmcq {

/// Coefficient function of state x and time t.
using Coefficient = std::function<double(double x, double t)>;
/// Function of the state only (path functionals f, g).
using PathFunction = std::function<double(double x)>;

struct GbmParams {
  double rate = 0.0;
  double sigma = 0.0;
};

/// Scalar SDE dX = mu(X,t) dt + sigma(X,t) dW with the spatial derivatives the
/// higher-order schemes need. Immutable once built.
struct SdeModel {
  Coefficient drift;
  Coefficient volatility;
  Coefficient drift_dx;
  Coefficient drift_dxx;
  Coefficient volatility_dx;
  Coefficient volatility_dxx;
  /// Caller-asserted global Lipschitz constant; never verified.
  double lipschitz_constant = 0.0;
  std::string label;
  /// Present only for models built by gbm(); the GBM-specialised schemes require it,
  /// and path simulation evaluates the coefficients from it directly.
  std::optional<GbmParams> gbm;

  double mu(double x, double t) const { return drift(x, t); }
  double sigma(double x, double t) const { return volatility(x, t); }
  double mu_x(double x, double t) const { return drift_dx(x, t); }
  double mu_xx(double x, double t) const { return drift_dxx(x, t); }
  double sigma_x(double x, double t) const { return volatility_dx(x, t); }
  double sigma_xx(double x, double t) const { return volatility_dxx(x, t); }
};

/// dS = r S dt + sigma S dW.
SdeModel gbm(double r, double sigma);

/// Relative volatility s(x,t) together with its first two x-derivatives.
struct LocalVolFunction {
  Coefficient value;
  Coefficient dx;
  Coefficient dxx;
  std::string label;
};

LocalVolFunction constant_vol(double level);
/// s(x,t) = base + amplitude * exp(-decay * t)
LocalVolFunction time_decay_vol(double base, double amplitude, double decay);
/// s(x,t) = scale * x^exponent (CEV-style elasticity)
LocalVolFunction cev_vol(double scale, double exponent);

/// dS = r S dt + s(S,t) S dW, derivatives by the product rule.
SdeModel local_vol(double r, LocalVolFunction fn);

/// Closed-form GBM terminal value s * exp(sigma w + (r - sigma^2/2) tau).
double gbm_exact_terminal(double s, double r, double sigma, double tau, double w);

/// (X, Y = int f(X) dt, Z = int g(X) dW), with Y_0 = Z_0 = 0.
struct AugmentedSystem {
  SdeModel base;
  PathFunction f;
  PathFunction g;
  static constexpr int dimension = 3;
};

/// f and g must be globally Lipschitz; that is the caller's promise.
AugmentedSystem augment_path_dependent(SdeModel model, PathFunction f, PathFunction g);

/// Joint system for X and its tangent Y_t = dX_t/dX_0:
/// dY = mu'(X) Y dt + sigma'(X) Y dW, Y_0 = 1.
struct TangentSystem {
  SdeModel base;
  double initial_tangent = 1.0;
};

TangentSystem tangent_system(SdeModel model);

}  // namespace mlmcq
