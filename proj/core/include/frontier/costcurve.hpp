#pragma once

#include <array>
#include <vector>

namespace frontier {

// Quartic total cost over continuous quantity, C(q) = b0 + b1 q + ... + b4 q^4,
// with the implied average and marginal cost curves.
struct CostCurve {
  std::array<double, 5> beta{};

  double total(double q) const;
  double ac(double q) const;
  double mc(double q) const;
  double ac_prime(double q) const;
  double mc_prime(double q) const;

  // shape constraints on a discrete quantity grid q(1)..q(H):
  //   AC weakly decreasing up to mes-1 with MC(q(mes-1)) <= AC(q(mes-1)),
  //   AC(q(mes)) <= MC(q(mes)) and MC weakly increasing from mes on,
  //   AC and MC positive throughout.
  // Returns the total constraint violation (0 when feasible).
  double shape_violation(const std::vector<double>& q_grid, int mes) const;
};

}  // namespace frontier
