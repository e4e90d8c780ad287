#include "mlmcq/schemes.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mlmcq/errors.hpp"
#include "mlmcq/parallel.hpp"
#include "mlmcq/regression.hpp"
#include "mlmcq/stats.hpp"

namespace mlmcq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<SchemeInfo, 6> kSchemes{{
    {Scheme::Euler, "euler", 0.5, false},
    {Scheme::Milstein, "milstein", 1.0, false},
    {Scheme::Strong15, "strong15", 1.5, false},
    {Scheme::Strong2Gbm, "strong2", 2.0, true},
    {Scheme::Strong3Gbm, "strong3", 3.0, true},
    {Scheme::ExactGbm, "exact", kInf, true},
}};

// Brownian input of one step. `ito` is filled only for Strong15.
struct Increment {
  double dw = 0.0;
  ItoIntegrals15 ito;
};

Increment draw_increment(Scheme scheme, double h, RngStream& stream) {
  Increment inc;
  if (scheme == Scheme::Strong15) {
    const auto [u1, u2] = stream.normal_pair();
    inc.ito = ito_integrals_15(h, u1, u2);
    inc.dw = inc.ito.I1;
  } else {
    inc.dw = std::sqrt(h) * stream.normal();
  }
  return inc;
}

Increment join(Scheme scheme, const Increment& a, const Increment& b) {
  Increment inc;
  if (scheme == Scheme::Strong15) {
    inc.ito = join_steps(a.ito, b.ito);
    inc.dw = inc.ito.I1;
  } else {
    inc.dw = a.dw + b.dw;
  }
  return inc;
}

double strong2_increment(const GbmParams& p, double h, const StratIntegrals& J) {
  const double s = p.sigma;
  const double m = p.rate - 0.5 * s * s;
  const double s2 = s * s;
  return m * h + s * J.J1 + s2 * J.J11 + m * s * h * J.J1 + 0.5 * m * m * h * h + s2 * s * J.J111 +
         m * s2 * h * J.J11 + s2 * s2 * J.J1111;
}

double strong3_increment(const GbmParams& p, double h, const StratIntegrals& J) {
  const double s = p.sigma;
  const double m = p.rate - 0.5 * s * s;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double s4 = s2 * s2;
  const double hh = 0.5 * h * h;
  return strong2_increment(p, h, J) + m * m * s * hh * J.J1 + m * s3 * h * J.J111 + s4 * s * J.J11111 +
         m * m * m * h * h * h / 6.0 + s3 * s3 * J.J111111 + m * m * s2 * hh * J.J11 +
         m * s4 * h * J.J1111;
}

double euler_update(double x, double m, double s, double h, double dw) { return x + m * h + s * dw; }

double milstein_update(double x, double m, double s, double s1, double h, double dw) {
  return x + m * h + s * dw + 0.5 * s * s1 * (dw * dw - h);
}

double strong15_update(double x, double m, double m1, double m2, double s, double s1, double s2,
                       const ItoIntegrals15& I) {
  const double h = I.h;
  return x + m * h + s * I.I1 + s * s1 * I.I11 + s * m1 * I.I10 + (m * m1 + 0.5 * s * s * m2) * 0.5 * h * h +
         (m * s1 + 0.5 * s * s * s2) * I.I01 + s * (s * s2 + s1 * s1) * I.I111;
}

void require_gbm(const SdeModel& model, Scheme scheme) {
  if (scheme_info(scheme).gbm_only && !model.gbm)
    throw InvalidArgument(fmt::format("scheme '{}' requires a GBM model", scheme_name(scheme)));
}

// Advances one path, integrating the requested functionals at the left point.
class PathStepper {
 public:
  PathStepper(const SdeModel& model, Scheme scheme, double s0, const PathFunctionals& fn)
      : model_(model),
        gbm_(model.gbm ? &*model.gbm : nullptr),
        scheme_(scheme),
        fn_(fn),
        track_tangent_(fn.tangent || fn.malliavin_weight) {
    if (track_tangent_ && scheme == Scheme::Strong15)
      throw InvalidArgument("tangent process is not available for the strong15 scheme");
    state_.terminal = s0;
  }

  void step(double t, double h, const Increment& inc) {
    if (state_.flagged) return;
    const double x = state_.terminal;
    if (fn_.time_integrand) state_.time_integral += fn_.time_integrand(x) * h;
    if (fn_.noise_integrand) state_.noise_integral += fn_.noise_integrand(x) * inc.dw;
    if (fn_.malliavin_weight) {
      const double s = sigma(x, t);
      if (!(std::fabs(s) >= fn_.sigma_floor) || s == 0.0) {
        state_.flagged = true;
        return;
      }
      state_.weight += state_.tangent / s * inc.dw;
    }

    double next = x;
    switch (scheme_) {
      case Scheme::Euler:
        next = euler_update(x, mu(x, t), sigma(x, t), h, inc.dw);
        if (track_tangent_) state_.tangent *= 1.0 + mu_x(x, t) * h + sigma_x(x, t) * inc.dw;
        break;
      case Scheme::Milstein: {
        const double s = sigma(x, t);
        const double sx = sigma_x(x, t);
        next = milstein_update(x, mu(x, t), s, sx, h, inc.dw);
        if (track_tangent_) {
          const double ss_x = sx * sx + s * sigma_xx(x, t);
          state_.tangent *= 1.0 + mu_x(x, t) * h + sx * inc.dw + 0.5 * ss_x * (inc.dw * inc.dw - h);
        }
        break;
      }
      case Scheme::Strong15:
        next = strong15_update(x, mu(x, t), mu_x(x, t), mu_xx(x, t), sigma(x, t), sigma_x(x, t), sigma_xx(x, t),
                               inc.ito);
        break;
      case Scheme::Strong2Gbm:
      case Scheme::Strong3Gbm:
      case Scheme::ExactGbm: {
        const GbmParams& p = *model_.gbm;
        double growth;
        if (scheme_ == Scheme::ExactGbm) {
          growth = std::expm1((p.rate - 0.5 * p.sigma * p.sigma) * h + p.sigma * inc.dw);
        } else {
          const StratIntegrals J = strat_integrals(inc.dw);
          growth = scheme_ == Scheme::Strong2Gbm ? strong2_increment(p, h, J) : strong3_increment(p, h, J);
        }
        next = x + x * growth;
        if (track_tangent_) state_.tangent += state_.tangent * growth;
        break;
      }
    }
    state_.brownian += inc.dw;
    ++state_.steps;
    state_.terminal = next;
    if (!std::isfinite(next) || !std::isfinite(state_.tangent)) state_.flagged = true;
  }

  const PathResult& result() const { return state_; }

 private:
  // GBM coefficients are evaluated inline; other models go through the model's functions.
  double mu(double x, double t) const { return gbm_ ? gbm_->rate * x : model_.mu(x, t); }
  double sigma(double x, double t) const { return gbm_ ? gbm_->sigma * x : model_.sigma(x, t); }
  double mu_x(double x, double t) const { return gbm_ ? gbm_->rate : model_.mu_x(x, t); }
  double mu_xx(double x, double t) const { return gbm_ ? 0.0 : model_.mu_xx(x, t); }
  double sigma_x(double x, double t) const { return gbm_ ? gbm_->sigma : model_.sigma_x(x, t); }
  double sigma_xx(double x, double t) const { return gbm_ ? 0.0 : model_.sigma_xx(x, t); }

  const SdeModel& model_;
  const GbmParams* gbm_;
  Scheme scheme_;
  const PathFunctionals& fn_;
  bool track_tangent_;
  PathResult state_;
};

void check_path_args(double maturity, std::uint64_t n) {
  if (n < 1) throw InvalidArgument("simulate_path: need at least one step");
  if (!(maturity > 0.0)) throw InvalidArgument("simulate_path: maturity must be positive");
}

}  // namespace

const SchemeInfo& scheme_info(Scheme scheme) {
  for (const auto& info : kSchemes)
    if (info.scheme == scheme) return info;
  throw InvalidArgument("unknown scheme");
}

double nominal_strong_order(Scheme scheme) { return scheme_info(scheme).nominal_order; }
std::string_view scheme_name(Scheme scheme) { return scheme_info(scheme).name; }

Scheme parse_scheme(std::string_view name) {
  for (const auto& info : kSchemes)
    if (info.name == name) return info.scheme;
  throw InvalidArgument(fmt::format("unknown scheme '{}' (expected euler|milstein|strong15|strong2|strong3|exact)", name));
}

double step_euler(const SdeModel& model, double x, double t, double h, double dw) {
  return euler_update(x, model.mu(x, t), model.sigma(x, t), h, dw);
}

double step_milstein(const SdeModel& model, double x, double t, double h, double dw) {
  return milstein_update(x, model.mu(x, t), model.sigma(x, t), model.sigma_x(x, t), h, dw);
}

double step_strong15(const SdeModel& model, double x, double t, const ItoIntegrals15& I) {
  return strong15_update(x, model.mu(x, t), model.mu_x(x, t), model.mu_xx(x, t), model.sigma(x, t),
                         model.sigma_x(x, t), model.sigma_xx(x, t), I);
}

double step_strong2_gbm(const GbmParams& p, double x, double h, const StratIntegrals& strat) {
  return x + x * strong2_increment(p, h, strat);
}

double step_strong3_gbm(const GbmParams& p, double x, double h, const StratIntegrals& strat) {
  return x + x * strong3_increment(p, h, strat);
}

PathResult simulate_path(const SdeModel& model, Scheme scheme, double s0, double maturity,
                         std::uint64_t n, RngStream& stream, const PathFunctionals& functionals) {
  check_path_args(maturity, n);
  require_gbm(model, scheme);
  const double h = maturity / static_cast<double>(n);
  PathStepper path(model, scheme, s0, functionals);
  for (std::uint64_t k = 0; k < n && !path.result().flagged; ++k)
    path.step(static_cast<double>(k) * h, h, draw_increment(scheme, h, stream));
  return path.result();
}

PathResult simulate_path(const AugmentedSystem& system, Scheme scheme, double s0, double maturity,
                         std::uint64_t n, RngStream& stream) {
  PathFunctionals fn;
  fn.time_integrand = system.f;
  fn.noise_integrand = system.g;
  return simulate_path(system.base, scheme, s0, maturity, n, stream, fn);
}

PathResult simulate_path(const TangentSystem& system, Scheme scheme, double s0, double maturity,
                         std::uint64_t n, RngStream& stream) {
  PathFunctionals fn;
  fn.tangent = true;
  PathResult r = simulate_path(system.base, scheme, s0, maturity, n, stream, fn);
  r.tangent *= system.initial_tangent;
  return r;
}

CoupledPath simulate_coupled(const SdeModel& model, Scheme scheme, double s0, double maturity,
                             std::uint64_t n_fine, RngStream& stream, const PathFunctionals& functionals) {
  check_path_args(maturity, n_fine);
  if (n_fine % 2 != 0) throw InvalidArgument("simulate_coupled: fine step count must be even");
  require_gbm(model, scheme);
  const double h_fine = maturity / static_cast<double>(n_fine);
  const double h_coarse = maturity / static_cast<double>(n_fine / 2);
  PathStepper fine(model, scheme, s0, functionals);
  PathStepper coarse(model, scheme, s0, functionals);
  for (std::uint64_t k = 0; k < n_fine / 2; ++k) {
    const Increment a = draw_increment(scheme, h_fine, stream);
    const Increment b = draw_increment(scheme, h_fine, stream);
    fine.step(static_cast<double>(2 * k) * h_fine, h_fine, a);
    fine.step(static_cast<double>(2 * k + 1) * h_fine, h_fine, b);
    coarse.step(static_cast<double>(k) * h_coarse, h_coarse, join(scheme, a, b));
  }
  return {fine.result(), coarse.result()};
}

StrongOrderReport estimate_strong_order(Scheme scheme, const GbmParams& params, double s0,
                                        double maturity, std::span<const int> step_exponents,
                                        std::uint64_t samples, std::uint64_t seed, unsigned workers) {
  if (step_exponents.size() < 3) throw InvalidArgument("estimate_strong_order: need at least 3 step sizes");
  if (samples < 1) throw InvalidArgument("estimate_strong_order: need at least one sample");
  const SdeModel model = gbm(params.rate, params.sigma);
  StrongOrderReport report;
  std::vector<double> log_h, log_err;
  for (const int k : step_exponents) {
    if (k < 0 || k > 40) throw InvalidArgument("estimate_strong_order: step exponent out of range");
    const std::uint64_t n = std::uint64_t{1} << k;
    const double h = maturity / static_cast<double>(n);
    auto chunks = parallel_chunks<RunningStats>(0, samples, workers, [&](std::uint64_t lo, std::uint64_t hi) {
      RunningStats acc;
      for (std::uint64_t i = lo; i < hi; ++i) {
        RngStream stream(seed, StreamId{static_cast<std::uint32_t>(k), i, 0});
        const PathResult path = simulate_path(model, scheme, s0, maturity, n, stream);
        if (path.flagged) throw FlaggedSampleLimit("estimate_strong_order: non-finite path");
        const double exact = gbm_exact_terminal(s0, params.rate, params.sigma, maturity, path.brownian);
        acc.push(std::fabs(path.terminal - exact));
      }
      return acc;
    });
    RunningStats total;
    for (const auto& c : chunks) total.merge(c);
    report.step_sizes.push_back(h);
    report.mean_abs_errors.push_back(total.mean);
    log_h.push_back(std::log2(h));
    log_err.push_back(std::log2(total.mean));
  }
  report.slope = fit_line(log_h, log_err).slope;
  return report;
}

}  // namespace mlmcq
