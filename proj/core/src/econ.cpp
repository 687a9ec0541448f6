#include "frontier/econ.hpp"

#include <cmath>

#include "frontier/error.hpp"

namespace frontier {

double elasticity(const CostCurve& curve, double q) {
  if (!(q > 0)) throw UserError("elasticity: q must be positive");
  const double ac = curve.ac(q);
  const double mc = curve.mc(q);
  const double acp = curve.ac_prime(q);
  const double mcp = curve.mc_prime(q);
  if (!(ac > 0) || !(mc > 0)) throw UserError("elasticity: AC/MC not positive at q");
  if (mcp == 0.0) {
    throw UserError("elasticity: MC'(q) = 0 (flat marginal cost; the elasticity "
                    "diverges here)");
  }
  return (acp / ac) / (mcp / mc);
}

std::vector<IsoquantPoint> isoquant(const CostCurve& curve, const QuantityTable& qtable) {
  std::vector<IsoquantPoint> pts;
  for (int h = 1; h <= qtable.H; ++h) {
    const double q = qtable.at(h);
    IsoquantPoint p;
    p.height = h;
    p.land = 1.0 / q;
    p.capital = curve.total(q) / q;
    pts.push_back(p);
  }
  return pts;
}

ConsolidationResult consolidation_counterfactual(const Panel& panel, const CostCurve& curve,
                                                 const QuantityTable& qtable, int band_lo,
                                                 int band_hi, int target_h) {
  if (band_lo > band_hi) throw UserError("consolidation: empty height band");
  if (target_h < 1 || target_h > qtable.H) {
    throw UserError("consolidation: target height outside the cost frontier range");
  }
  double buildings = 0, floors = 0, cost_before = 0;
  for (const auto& g : panel.groups) {
    if (g.height < band_lo || g.height > band_hi) continue;
    const double n = static_cast<double>(g.n_buildings());
    buildings += n;
    floors += n * g.height;
    cost_before += n * curve.total(qtable.at(g.height));
  }
  if (buildings == 0) throw UserError("consolidation: no buildings in the height band");

  const double buildings_after = floors / static_cast<double>(target_h);
  const double cost_after = buildings_after * curve.total(qtable.at(target_h));

  ConsolidationResult r;
  r.buildings_before = buildings;
  r.buildings_after = buildings_after;
  r.land_delta_pct = 100.0 * (buildings_after - buildings) / buildings;
  r.nonland_cost_delta_pct = 100.0 * (cost_after - cost_before) / cost_before;
  return r;
}

}  // namespace frontier
