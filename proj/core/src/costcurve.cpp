#include "frontier/costcurve.hpp"

#include <algorithm>
#include <cmath>

namespace frontier {

double CostCurve::total(double q) const {
  return beta[0] + q * (beta[1] + q * (beta[2] + q * (beta[3] + q * beta[4])));
}

double CostCurve::ac(double q) const {
  return beta[0] / q + beta[1] + q * (beta[2] + q * (beta[3] + q * beta[4]));
}

double CostCurve::mc(double q) const {
  return beta[1] + q * (2.0 * beta[2] + q * (3.0 * beta[3] + q * 4.0 * beta[4]));
}

double CostCurve::ac_prime(double q) const {
  return -beta[0] / (q * q) + beta[2] + q * (2.0 * beta[3] + q * 3.0 * beta[4]);
}

double CostCurve::mc_prime(double q) const {
  return 2.0 * beta[2] + q * (6.0 * beta[3] + q * 12.0 * beta[4]);
}

double CostCurve::shape_violation(const std::vector<double>& q_grid, int mes) const {
  const int H = static_cast<int>(q_grid.size());
  double viol = 0;
  auto q_at = [&](int h) { return q_grid[h - 1]; };
  for (int h = 1; h <= H; ++h) {
    viol += std::max(0.0, 1e-6 - ac(q_at(h)));
    viol += std::max(0.0, 1e-6 - mc(q_at(h)));
  }
  // AC(q(mes-1)) <= ... <= AC(q(1))
  for (int h = 1; h <= mes - 2; ++h) {
    viol += std::max(0.0, ac(q_at(h + 1)) - ac(q_at(h)));
  }
  if (mes >= 2) viol += std::max(0.0, mc(q_at(mes - 1)) - ac(q_at(mes - 1)));
  // AC(q(mes)) <= MC(q(mes)) <= ... <= MC(q(H))
  viol += std::max(0.0, ac(q_at(mes)) - mc(q_at(mes)));
  for (int h = mes; h <= H - 1; ++h) {
    viol += std::max(0.0, mc(q_at(h)) - mc(q_at(h + 1)));
  }
  return viol;
}

}  // namespace frontier
