#include "mlmcq/bopm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "mlmcq/errors.hpp"
#include "mlmcq/parallel.hpp"
#include "mlmcq/stats.hpp"

namespace mlmcq {

LatticeModel parse_lattice_model(std::string_view name) {
  if (name == "crr") return LatticeModel::CRR;
  if (name == "jr") return LatticeModel::JR;
  throw InvalidArgument(fmt::format("unknown lattice model '{}' (expected crr|jr)", name));
}

StepParams crr_params(double r, double sigma, double h, LatticeFlavor flavor) {
  if (!(h > 0.0)) throw InvalidArgument("crr_params: h must be positive");
  if (!(sigma > 0.0)) throw InvalidArgument("crr_params: sigma must be positive");
  if (r != 0.0 && h > sigma * sigma / (r * r))
    throw InvalidArgument(fmt::format("crr_params: step {} exceeds sigma^2/r^2 = {}", h, sigma * sigma / (r * r)));
  StepParams s;
  const double a = sigma * std::sqrt(h);
  if (flavor == LatticeFlavor::Exact) {
    s.U = std::exp(a);
    s.D = std::exp(-a);
    s.p = (std::exp(r * h) - s.D) / (s.U - s.D);
  } else {
    s.U = 1.0 + a;
    s.D = 1.0 - a;
    s.p = (1.0 + r * h - s.D) / (s.U - s.D);
  }
  if (!(s.D > 0.0)) throw InvalidArgument("crr_params: down factor must be positive");
  if (!(s.p > 0.0 && s.p < 1.0)) throw InvalidArgument(fmt::format("crr_params: p = {} outside (0, 1)", s.p));
  return s;
}

StepParams jr_params(double r, double sigma, double h, LatticeFlavor flavor) {
  if (!(h > 0.0)) throw InvalidArgument("jr_params: h must be positive");
  if (!(sigma >= 0.0)) throw InvalidArgument("jr_params: sigma must be non-negative");
  const double drift = (r - 0.5 * sigma * sigma) * h;
  const double a = sigma * std::sqrt(h);
  StepParams s;
  if (flavor == LatticeFlavor::Exact) {
    s.U = std::exp(drift + a);
    s.D = std::exp(drift - a);
  } else {
    s.U = 1.0 + drift + a;
    s.D = 1.0 + drift - a;
  }
  if (!(s.D > 0.0)) throw InvalidArgument("jr_params: down factor must be positive");
  s.p = 0.5;
  return s;
}

double BinomialLattice::node_price(std::uint64_t k) const {
  const double lu = std::log(U);
  const double ld = std::log(D);
  return s0 * std::exp(static_cast<double>(n) * ld + static_cast<double>(k) * (lu - ld));
}

BinomialLattice make_lattice(LatticeModel model, double r, double sigma, double maturity, std::uint64_t n,
                             double s0, LatticeFlavor flavor) {
  if (n < 1) throw InvalidArgument("make_lattice: need at least one step");
  if (!(maturity > 0.0)) throw InvalidArgument("make_lattice: maturity must be positive");
  if (!(s0 > 0.0)) throw InvalidArgument("make_lattice: S0 must be positive");
  const double h = maturity / static_cast<double>(n);
  const StepParams s = model == LatticeModel::CRR ? crr_params(r, sigma, h, flavor) : jr_params(r, sigma, h, flavor);
  return {s.U, s.D, s.p, n, s0, h};
}

double ThresholdTable::lookup(std::uint64_t k) const {
  const auto it = std::upper_bound(cutoffs.begin(), cutoffs.end(), k);
  return values[static_cast<std::size_t>(it - cutoffs.begin())];
}

ThresholdTable build_thresholds(const PiecewiseConstant& payoff, const BinomialLattice& lattice) {
  if (!(lattice.U > lattice.D)) throw InvalidArgument("build_thresholds: need U > D");
  const std::uint64_t n = lattice.n;
  const double lu = std::log(lattice.U);
  const double ld = std::log(lattice.D);
  ThresholdTable table;
  table.values = payoff.values;
  for (const double b : payoff.breaks) {
    // Smallest k with node_price(k) >= b.
    const double k_real = (std::log(b / lattice.s0) - static_cast<double>(n) * ld) / (lu - ld);
    std::uint64_t c;
    if (!(k_real > 0.0)) c = 0;
    else if (k_real > static_cast<double>(n) + 1.0) c = n + 1;
    else c = static_cast<std::uint64_t>(std::ceil(k_real));
    while (c > 0 && lattice.node_price(c - 1) >= b) --c;
    while (c <= n && lattice.node_price(c) < b) ++c;
    table.cutoffs.push_back(c);
  }
  return table;
}

namespace {

std::uint64_t binomial_inversion(std::uint64_t n, double p, RngStream& stream) {
  const double q = 1.0 - p;
  const double qn = std::exp(static_cast<double>(n) * std::log(q));
  const double np = static_cast<double>(n) * p;
  const double bound = std::min(static_cast<double>(n), np + 10.0 * std::sqrt(np * q + 1.0));
  std::uint64_t x = 0;
  double px = qn;
  double u = stream.uniform();
  while (u > px) {
    ++x;
    if (static_cast<double>(x) > bound) {
      x = 0;
      px = qn;
      u = stream.uniform();
    } else {
      u -= px;
      px = (static_cast<double>(n - x + 1) * p * px) / (static_cast<double>(x) * q);
    }
  }
  return x;
}

// Kachitvichyanukul & Schmeiser BTPE, for p <= 1/2 and n p >= 30.
std::uint64_t binomial_btpe(std::uint64_t n_u, double p, RngStream& stream) {
  const double n = static_cast<double>(n_u);
  const double r = p;
  const double q = 1.0 - r;
  const double fm = n * r + r;
  const double m = std::floor(fm);
  const double p1 = std::floor(2.195 * std::sqrt(n * r * q) - 4.6 * q) + 0.5;
  const double xm = m + 0.5;
  const double xl = xm - p1;
  const double xr = xm + p1;
  const double c = 0.134 + 20.5 / (15.3 + m);
  double a = (fm - xl) / (fm - xl * r);
  const double laml = a * (1.0 + a / 2.0);
  a = (xr - fm) / (xr * q);
  const double lamr = a * (1.0 + a / 2.0);
  const double p2 = p1 * (1.0 + 2.0 * c);
  const double p3 = p2 + c / laml;
  const double p4 = p3 + c / lamr;
  const double nrq = n * r * q;

  for (;;) {
    const double u = stream.uniform() * p4;
    double v = stream.uniform();
    double y;
    if (u <= p1) {
      // Triangular region: accept immediately.
      return static_cast<std::uint64_t>(std::floor(xm - p1 * v + u));
    }
    if (u <= p2) {
      const double x = xl + (u - p1) / c;
      v = v * c + 1.0 - std::fabs(m - x + 0.5) / p1;
      if (v > 1.0) continue;
      y = std::floor(x);
    } else if (u <= p3) {
      y = std::floor(xl + std::log(v) / laml);
      if (y < 0.0) continue;
      v = v * (u - p2) * laml;
    } else {
      y = std::floor(xr - std::log(v) / lamr);
      if (y > n) continue;
      v = v * (u - p3) * lamr;
    }

    const double k = std::fabs(y - m);
    if (k <= 20.0 || k >= nrq / 2.0 - 1.0) {
      // Explicit pmf ratio f(y)/f(m).
      const double s = r / q;
      const double aa = s * (n + 1.0);
      double f = 1.0;
      if (m < y) {
        for (double i = m + 1.0; i <= y; i += 1.0) f *= (aa / i - s);
      } else if (m > y) {
        for (double i = y + 1.0; i <= m; i += 1.0) f /= (aa / i - s);
      }
      if (v > f) continue;
      return static_cast<std::uint64_t>(y);
    }

    // Squeeze, then Stirling-corrected log pmf ratio.
    const double rho = (k / nrq) * ((k * (k / 3.0 + 0.625) + 0.16666666666666666) / nrq + 0.5);
    const double t = -k * k / (2.0 * nrq);
    const double A = std::log(v);
    if (A < t - rho) return static_cast<std::uint64_t>(y);
    if (A > t + rho) continue;

    const double x1 = y + 1.0;
    const double f1 = m + 1.0;
    const double z = n + 1.0 - m;
    const double w = n - y + 1.0;
    const double x2 = x1 * x1;
    const double f2 = f1 * f1;
    const double z2 = z * z;
    const double w2 = w * w;
    const auto stirling = [](double v1, double v2) {
      return (13680.0 - (462.0 - (132.0 - (99.0 - 140.0 / v2) / v2) / v2) / v2) / v1 / 166320.0;
    };
    const double bound = xm * std::log(f1 / x1) + (n - m + 0.5) * std::log(z / w) +
                         (y - m) * std::log(w * r / (x1 * q)) + stirling(f1, f2) + stirling(z, z2) +
                         stirling(x1, x2) + stirling(w, w2);
    if (A > bound) continue;
    return static_cast<std::uint64_t>(y);
  }
}

constexpr std::uint64_t kInversionMaxN = 64;
constexpr double kInversionMaxMean = 30.0;

}  // namespace

std::uint64_t sample_terminal_count(std::uint64_t n, double p, RngStream& stream) {
  if (n < 1) throw InvalidArgument("sample_terminal_count: n must be at least 1");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("sample_terminal_count: p must lie in (0, 1)");
  const bool flip = p > 0.5;
  const double r = flip ? 1.0 - p : p;
  const std::uint64_t k = (n < kInversionMaxN || static_cast<double>(n) * r < kInversionMaxMean)
                              ? binomial_inversion(n, r, stream)
                              : binomial_btpe(n, r, stream);
  return flip ? n - k : k;
}

namespace {

struct BopmTally {
  RunningStats stats;
  std::uint64_t draws = 0;
};

}  // namespace

BopmEstimate bopm_estimate(const Payoff& payoff, const BinomialLattice& lattice, std::uint64_t n_samples,
                           std::uint64_t seed, unsigned workers, std::uint32_t replicate) {
  if (n_samples < 2) throw InvalidArgument("bopm_estimate: need at least two samples");
  if (payoff.needs_time_average() || payoff.needs_stoch_integral())
    throw InvalidArgument(fmt::format("bopm_estimate: payoff '{}' is path dependent", payoff.name()));
  const auto pc = as_piecewise_constant(payoff);
  ThresholdTable table;
  if (pc) table = build_thresholds(*pc, lattice);

  auto chunks =
      parallel_chunks<BopmTally>(0, n_samples, workers, [&](std::uint64_t lo, std::uint64_t hi) {
        BopmTally t;
        for (std::uint64_t i = lo; i < hi; ++i) {
          RngStream stream(seed, StreamId{0, i, replicate});
          const std::uint64_t k = sample_terminal_count(lattice.n, lattice.p, stream);
          t.stats.push(pc ? table.lookup(k) : payoff.evaluate(lattice.node_price(k)));
          t.draws += stream.draws();
        }
        return t;
      });
  BopmTally total;
  for (const auto& c : chunks) {
    total.stats.merge(c.stats);
    total.draws += c.draws;
  }
  return {total.stats.mean, total.stats.standard_error(), total.stats.count, total.draws};
}

double binomial_pmf(std::uint64_t n, double p, std::uint64_t k) {
  if (k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double log_c = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
  return std::exp(log_c + kd * std::log(p) + (nd - kd) * std::log1p(-p));
}

double bopm_exact(const Payoff& payoff, const BinomialLattice& lattice) {
  if (lattice.n > 1'000'000) throw InvalidArgument("bopm_exact: n above 10^6");
  if (payoff.needs_time_average() || payoff.needs_stoch_integral())
    throw InvalidArgument(fmt::format("bopm_exact: payoff '{}' is path dependent", payoff.name()));
  double sum = 0.0;
  for (std::uint64_t k = 0; k <= lattice.n; ++k) {
    const double w = binomial_pmf(lattice.n, lattice.p, k);
    if (w == 0.0) continue;
    sum += w * payoff.evaluate(lattice.node_price(k));
  }
  return sum;
}

}  // namespace mlmcq
