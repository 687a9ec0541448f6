#pragma once

#include <vector>

#include "frontier/costcurve.hpp"
#include "frontier/hedonic.hpp"
#include "frontier/types.hpp"

namespace frontier {

// Elasticity of substitution of land for capital, sigma = dlnAC/dlnMC,
// evaluated from the quartic derivatives. Throws UserError at the flat-MC
// singularity (MC'(q) = 0).
double elasticity(const CostCurve& curve, double q);

struct IsoquantPoint {
  int height = 0;
  double land = 0;     // land per unit of housing, 1/q(h)
  double capital = 0;  // non-land cost per unit of housing, C(q(h))/q(h)
};

// One-unit-of-housing isoquant traced over h = 1..H.
std::vector<IsoquantPoint> isoquant(const CostCurve& curve, const QuantityTable& qtable);

struct ConsolidationResult {
  double land_delta_pct = 0;          // change in building count
  double nonland_cost_delta_pct = 0;  // change in total C(q(h))
  double buildings_before = 0;
  double buildings_after = 0;
};

// Rebuilds every apartment in buildings with heights in [band_lo, band_hi]
// into target_h-story buildings, conserving floor-units; fractional building
// counts allowed. Costs are C(q(h)) per building from the cost curve.
ConsolidationResult consolidation_counterfactual(const Panel& panel, const CostCurve& curve,
                                                 const QuantityTable& qtable, int band_lo,
                                                 int band_hi, int target_h);

}  // namespace frontier
