#include "mlmcq/integrals.hpp"

#include <cmath>
#include <numbers>

#include "mlmcq/errors.hpp"

namespace mlmcq {

ItoIntegrals15 ItoIntegrals15::from_increments(double h, double I1, double I10) noexcept {
  ItoIntegrals15 out;
  out.h = h;
  out.I1 = I1;
  out.I10 = I10;
  out.I11 = 0.5 * (I1 * I1 - h);
  out.I01 = h * I1 - I10;
  out.I111 = 0.5 * (I1 * I1 / 3.0 - h) * I1;
  return out;
}

ItoIntegrals15 ito_integrals_15(double h, double u1, double u2) {
  if (!(h > 0.0)) throw InvalidArgument("ito_integrals_15: step h must be positive");
  const double root_h = std::sqrt(h);
  const double I1 = root_h * u1;
  const double I10 = 0.5 * h * root_h * (u1 + u2 * std::numbers::inv_sqrt3);
  return ItoIntegrals15::from_increments(h, I1, I10);
}

ItoIntegrals15 join_steps(const ItoIntegrals15& first, const ItoIntegrals15& second) noexcept {
  const double I1 = first.I1 + second.I1;
  const double I10 = first.I10 + first.h * first.I1 + second.I10;
  return ItoIntegrals15::from_increments(first.h + second.h, I1, I10);
}

StratIntegrals strat_integrals(double j1) noexcept {
  StratIntegrals s;
  s.J1 = j1;
  s.J11 = j1 * j1 / 2.0;
  s.J111 = s.J11 * j1 / 3.0;
  s.J1111 = s.J111 * j1 / 4.0;
  s.J11111 = s.J1111 * j1 / 5.0;
  s.J111111 = s.J11111 * j1 / 6.0;
  return s;
}

std::vector<double> couple_increments(std::span<const double> fine) {
  if (fine.size() % 2 != 0) throw InvalidArgument("couple_increments: fine increments must have even length");
  std::vector<double> coarse(fine.size() / 2);
  for (std::size_t k = 0; k < coarse.size(); ++k) coarse[k] = fine[2 * k] + fine[2 * k + 1];
  return coarse;
}

}  // namespace mlmcq
