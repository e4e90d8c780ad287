#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mlmcq {

enum class Smoothness { GloballyLipschitz, PiecewiseLipschitz, PiecewiseConstant };

std::string_view smoothness_name(Smoothness s);

/// Path quantities a payoff may read.
struct PathValues {
  double terminal = 0.0;
  std::optional<double> time_average;    // (1/T) int X dt
  std::optional<double> stoch_integral;  // int g(X) dW
};

struct European {
  double strike;
};
struct Asian {
  double strike;
};
/// H(S_T - K) with H(0) = 1.
struct Digital {
  double strike;
};
/// 5 (1 + H(S_T - K)), undiscounted.
struct DigitalAppendix {
  double strike;
};
/// breaks S_0 < ... < S_m; values = {psi_L, psi_1, ..., psi_m, psi_R} (m + 2 entries).
/// Interval j covers [S_{j-1}, S_j); psi_L applies below S_0 and psi_R from S_m up.
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> values;
};
struct Custom {
  std::function<double(const PathValues&)> fn;
  Smoothness smoothness = Smoothness::PiecewiseLipschitz;
  bool needs_time_average = false;
  bool needs_stoch_integral = false;
  std::string label = "custom";
};

using PayoffVariant = std::variant<European, Asian, Digital, DigitalAppendix, PiecewiseConstant, Custom>;

/// Validated payoff value. Construct through the factory functions.
class Payoff {
 public:
  explicit Payoff(PayoffVariant v);

  const PayoffVariant& variant() const noexcept { return v_; }
  Smoothness smoothness() const noexcept;
  bool needs_time_average() const noexcept;
  bool needs_stoch_integral() const noexcept;
  /// european | asian | digital | digital-appendix | piecewise-constant | custom label
  std::string name() const;

  double operator()(const PathValues& path) const { return evaluate(path); }
  double evaluate(const PathValues& path) const;
  double evaluate(double terminal) const { return evaluate(PathValues{terminal, {}, {}}); }

 private:
  PayoffVariant v_;
};

Payoff european(double strike);
Payoff asian(double strike);
Payoff digital(double strike);
Payoff digital_appendix(double strike);
Payoff piecewise_constant(std::vector<double> breaks, std::vector<double> values);
Payoff custom(std::function<double(const PathValues&)> fn, Smoothness smoothness,
              bool needs_time_average = false, bool needs_stoch_integral = false);

/// Name-based construction for configs. piecewise-constant needs breaks and values.
Payoff make_payoff(std::string_view name, double strike, std::vector<double> breaks = {},
                   std::vector<double> values = {});

/// e^{-r tau} value. tau must be non-negative.
double discount(double value, double r, double tau);

/// Two-valued digital payoffs as a piecewise-constant table; nullopt for other variants.
std::optional<PiecewiseConstant> as_piecewise_constant(const Payoff& payoff);

/// Table lookup on a validated piecewise-constant payoff.
double lookup(const PiecewiseConstant& pc, double x);

}  // namespace mlmcq
