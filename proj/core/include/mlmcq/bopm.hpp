#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mlmcq/payoffs.hpp"
#include "mlmcq/rng.hpp"

namespace mlmcq {

enum class LatticeModel { CRR, JR };
/// Exact uses exponentials; FirstOrder linearises them in h.
enum class LatticeFlavor { Exact, FirstOrder };

LatticeModel parse_lattice_model(std::string_view name);  // crr | jr

struct StepParams {
  double U = 1.0;
  double D = 1.0;
  double p = 0.5;
};

/// U = e^{sigma sqrt h}, D = 1/U, p = (e^{rh} - D)/(U - D). Requires h <= sigma^2/r^2 and p in (0,1).
StepParams crr_params(double r, double sigma, double h, LatticeFlavor flavor = LatticeFlavor::Exact);
/// U, D = e^{(r - sigma^2/2) h +- sigma sqrt h}, p = 1/2.
StepParams jr_params(double r, double sigma, double h, LatticeFlavor flavor = LatticeFlavor::Exact);

struct BinomialLattice {
  double U = 1.0;
  double D = 1.0;
  double p = 0.5;
  std::uint64_t n = 1;
  double s0 = 100.0;
  double h = 1.0;

  /// S0 U^k D^{n-k}, evaluated in log space.
  double node_price(std::uint64_t k) const;
};

BinomialLattice make_lattice(LatticeModel model, double r, double sigma, double maturity, std::uint64_t n,
                             double s0, LatticeFlavor flavor = LatticeFlavor::Exact);

/// Integer cutoffs for a piecewise-constant payoff on a lattice: the payoff at
/// terminal count k is values[#{j : cutoffs[j] <= k}].
struct ThresholdTable {
  std::vector<std::uint64_t> cutoffs;  // nondecreasing, each in [0, n+1]
  std::vector<double> values;

  double lookup(std::uint64_t k) const;
};

/// Agrees with direct evaluation at every node; requires U > D.
ThresholdTable build_thresholds(const PiecewiseConstant& payoff, const BinomialLattice& lattice);

/// Binomial(n, p) draw: inversion for small n or small n min(p, 1-p), BTPE otherwise.
std::uint64_t sample_terminal_count(std::uint64_t n, double p, RngStream& stream);

struct BopmEstimate {
  double estimate = 0.0;   // undiscounted
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t rng_draws = 0;  // 64-bit words over all samples
};

/// Monte Carlo over terminal counts; sample i uses stream (0, i, replicate).
/// Piecewise-constant payoffs go through a threshold table, others are evaluated
/// at the sampled node.
BopmEstimate bopm_estimate(const Payoff& payoff, const BinomialLattice& lattice, std::uint64_t n_samples,
                           std::uint64_t seed, unsigned workers = 1, std::uint32_t replicate = 0);

/// sum_k C(n,k) p^k (1-p)^{n-k} psi(S0 U^k D^{n-k}), undiscounted, n <= 10^6.
double bopm_exact(const Payoff& payoff, const BinomialLattice& lattice);

/// Exact Binomial(n, p) probability mass, via log-gamma.
double binomial_pmf(std::uint64_t n, double p, std::uint64_t k);

}  // namespace mlmcq
