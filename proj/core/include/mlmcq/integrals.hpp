#pragma once

#include <span>
#include <vector>

namespace mlmcq {

/// Multiple Ito integrals over one step of length h, as consumed by the
/// order-1.5 Taylor-Ito scheme. Only I1 and I10 carry randomness; the rest
/// follow from exact identities.
struct ItoIntegrals15 {
  double h = 0.0;
  double I1 = 0.0;
  double I11 = 0.0;
  double I10 = 0.0;
  double I01 = 0.0;
  double I111 = 0.0;

  static ItoIntegrals15 from_increments(double h, double I1, double I10) noexcept;
};

/// I1 = sqrt(h) u1, I10 = h^{3/2} (u1 + u2/sqrt(3)) / 2 for independent N(0,1) u1, u2.
ItoIntegrals15 ito_integrals_15(double h, double u1, double u2);

/// Joins two consecutive steps into one step of twice the length.
/// I10 over [t0,t2] = I10_first + h_first * I1_first + I10_second.
ItoIntegrals15 join_steps(const ItoIntegrals15& first, const ItoIntegrals15& second) noexcept;

/// Repeated Stratonovich integrals J_(1,...,1) with k ones equal J1^k / k!.
struct StratIntegrals {
  double J1 = 0.0;
  double J11 = 0.0;
  double J111 = 0.0;
  double J1111 = 0.0;
  double J11111 = 0.0;
  double J111111 = 0.0;
};

StratIntegrals strat_integrals(double j1) noexcept;

/// coarse[k] = fine[2k] + fine[2k+1]. Throws on odd length.
std::vector<double> couple_increments(std::span<const double> fine);

}  // namespace mlmcq
