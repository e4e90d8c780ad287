#include "mlmcq/payoffs.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mlmcq/errors.hpp"

namespace mlmcq {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_strike(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidArgument(fmt::format("strike must be positive, got {}", k));
}

void validate(const PayoffVariant& v) {
  std::visit(Overloaded{
                 [](const European& p) { check_strike(p.strike); },
                 [](const Asian& p) { check_strike(p.strike); },
                 [](const Digital& p) { check_strike(p.strike); },
                 [](const DigitalAppendix& p) { check_strike(p.strike); },
                 [](const PiecewiseConstant& p) {
                   if (p.breaks.empty()) throw InvalidArgument("piecewise-constant payoff needs at least one break");
                   if (p.values.size() != p.breaks.size() + 1)
                     throw InvalidArgument(fmt::format("piecewise-constant payoff with {} breaks needs {} values, got {}",
                                                       p.breaks.size(), p.breaks.size() + 1, p.values.size()));
                   for (std::size_t i = 0; i < p.breaks.size(); ++i) {
                     if (!std::isfinite(p.breaks[i])) throw InvalidArgument("payoff breaks must be finite");
                     if (i > 0 && !(p.breaks[i] > p.breaks[i - 1]))
                       throw InvalidArgument("payoff breaks must be strictly ascending");
                   }
                 },
                 [](const Custom& p) {
                   if (!p.fn) throw InvalidArgument("custom payoff needs a function");
                 },
             },
             v);
}

double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

}  // namespace

std::string_view smoothness_name(Smoothness s) {
  switch (s) {
    case Smoothness::GloballyLipschitz: return "globally-lipschitz";
    case Smoothness::PiecewiseLipschitz: return "piecewise-lipschitz";
    case Smoothness::PiecewiseConstant: return "piecewise-constant";
  }
  return "unknown";
}

Payoff::Payoff(PayoffVariant v) : v_(std::move(v)) { validate(v_); }

Smoothness Payoff::smoothness() const noexcept {
  return std::visit(Overloaded{
                        [](const European&) { return Smoothness::GloballyLipschitz; },
                        [](const Asian&) { return Smoothness::GloballyLipschitz; },
                        [](const Custom& c) { return c.smoothness; },
                        [](const auto&) { return Smoothness::PiecewiseConstant; },
                    },
                    v_);
}

bool Payoff::needs_time_average() const noexcept {
  if (std::holds_alternative<Asian>(v_)) return true;
  if (const auto* c = std::get_if<Custom>(&v_)) return c->needs_time_average;
  return false;
}

bool Payoff::needs_stoch_integral() const noexcept {
  if (const auto* c = std::get_if<Custom>(&v_)) return c->needs_stoch_integral;
  return false;
}

std::string Payoff::name() const {
  return std::visit(Overloaded{
                        [](const European&) { return std::string("european"); },
                        [](const Asian&) { return std::string("asian"); },
                        [](const Digital&) { return std::string("digital"); },
                        [](const DigitalAppendix&) { return std::string("digital-appendix"); },
                        [](const PiecewiseConstant&) { return std::string("piecewise-constant"); },
                        [](const Custom& c) { return c.label; },
                    },
                    v_);
}

double Payoff::evaluate(const PathValues& path) const {
  if (needs_time_average() && !path.time_average)
    throw InvalidArgument(fmt::format("payoff '{}' needs the path time average", name()));
  if (needs_stoch_integral() && !path.stoch_integral)
    throw InvalidArgument(fmt::format("payoff '{}' needs the path stochastic integral", name()));
  const double s = path.terminal;
  return std::visit(Overloaded{
                        [&](const European& p) { return std::max(s - p.strike, 0.0); },
                        [&](const Asian& p) { return std::max(*path.time_average - p.strike, 0.0); },
                        [&](const Digital& p) { return heaviside(s - p.strike); },
                        [&](const DigitalAppendix& p) { return 5.0 * (1.0 + heaviside(s - p.strike)); },
                        [&](const PiecewiseConstant& p) { return lookup(p, s); },
                        [&](const Custom& p) { return p.fn(path); },
                    },
                    v_);
}

Payoff european(double strike) { return Payoff(European{strike}); }
Payoff asian(double strike) { return Payoff(Asian{strike}); }
Payoff digital(double strike) { return Payoff(Digital{strike}); }
Payoff digital_appendix(double strike) { return Payoff(DigitalAppendix{strike}); }

Payoff piecewise_constant(std::vector<double> breaks, std::vector<double> values) {
  return Payoff(PiecewiseConstant{std::move(breaks), std::move(values)});
}

Payoff custom(std::function<double(const PathValues&)> fn, Smoothness smoothness, bool needs_time_average,
              bool needs_stoch_integral) {
  return Payoff(Custom{std::move(fn), smoothness, needs_time_average, needs_stoch_integral, "custom"});
}

Payoff make_payoff(std::string_view name, double strike, std::vector<double> breaks, std::vector<double> values) {
  if (name == "european") return european(strike);
  if (name == "asian") return asian(strike);
  if (name == "digital") return digital(strike);
  if (name == "digital-appendix") return digital_appendix(strike);
  if (name == "piecewise-constant") return piecewise_constant(std::move(breaks), std::move(values));
  throw InvalidArgument(fmt::format(
      "unknown payoff '{}' (expected european|asian|digital|digital-appendix|piecewise-constant)", name));
}

double discount(double value, double r, double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("discount: tau must be non-negative");
  return std::exp(-r * tau) * value;
}

std::optional<PiecewiseConstant> as_piecewise_constant(const Payoff& payoff) {
  return std::visit(Overloaded{
                        [](const Digital& p) -> std::optional<PiecewiseConstant> {
                          return PiecewiseConstant{{p.strike}, {0.0, 1.0}};
                        },
                        [](const DigitalAppendix& p) -> std::optional<PiecewiseConstant> {
                          return PiecewiseConstant{{p.strike}, {5.0, 10.0}};
                        },
                        [](const PiecewiseConstant& p) -> std::optional<PiecewiseConstant> { return p; },
                        [](const auto&) -> std::optional<PiecewiseConstant> { return std::nullopt; },
                    },
                    payoff.variant());
}

double lookup(const PiecewiseConstant& pc, double x) {
  const auto it = std::upper_bound(pc.breaks.begin(), pc.breaks.end(), x);
  return pc.values[static_cast<std::size_t>(it - pc.breaks.begin())];
}

}  // namespace mlmcq
