#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "frontier/frontier_fit.hpp"
#include "frontier/truncnorm.hpp"
#include "frontier/types.hpp"

namespace frontier {

// Frontier levels in price space, with the beyond-top-height policy: the
// quartic cost curve supplies G(H+1)/MC(q(H+1)) when present, otherwise the
// last observed level is carried forward and flagged.
struct FrontierLevels {
  int mes = 1;
  int H = 0;
  double min_ac = 0;          // AC at the minimum-efficient-scale quantity
  std::vector<double> G;      // levels, index h-1 for h = 1..H
  std::optional<CostCurve> curve;
  std::vector<double> q;      // q(h), h = 1..H (present when a table was given)
  bool top_carried_forward = false;

  double level(int h) const;
  double mc_next(int h) const;  // MC(q(h+1)), the marginal cost of one more floor
  double g_next(int h) const;   // frontier level at h+1 (used by the bound)
};

FrontierLevels make_levels(const FrontierEstimate& est, const QuantityTable* qtable);

// Regulatory tax in currency at an error-free price level:
//   h < MES:  price - AC(q(MES))
//   h >= MES: max{0, price - MC(q(h+1))}
double rt_level(double price_level, int h, const FrontierLevels& levels);

// A building (or single apartment) entering the tax stage.
struct TaxUnit {
  std::string building_id;
  std::string city_id;
  int height = 0;
  double mean_log_price = 0;  // adjusted log price (building mean)
  std::size_t n_apartments = 1;
  bool is_building = true;    // false: apartment-level unit, sigma_eta uses full sigma_v
  std::optional<double> x, y;
  double time_coord = 0;      // years since the deflator base
};

std::vector<TaxUnit> collect_units(const Panel& panel, bool building_level);

struct RateResult {
  double rate = 0;   // expected RT / price
  double se = 0;     // Monte Carlo standard error
  int draws = 0;
};

// Monte Carlo posterior expectation of RT(G(h)U, h)/(G(h)U) with ln U drawn
// from the deviation posterior.
RateResult expected_rt_rate(const TaxUnit& unit, const FrontierLevels& levels,
                            const FrontierEstimate& est, int draws, std::uint64_t seed);

// Period/cohort regression on existing-home transactions. kappa_T = delta/(1+delta)
// with delta the ratio of the construction-year-squared to transaction-year-squared
// coefficients; parcel fixed effects absorbed.
struct PeriodEffects {
  double gamma1 = 0, gamma2 = 0;  // log index gamma(t) = gamma1 t + gamma2 t^2
  double delta = 0, delta_se = 0;
  double kappa_T = 0, kappa_T_se = 0;
  double alpha1 = 0, alpha2 = 0;  // age effects
  int base_year = 0;

  double log_index(double t_years) const { return gamma1 * t_years + gamma2 * t_years * t_years; }
};

PeriodEffects fit_kappa_T(const std::vector<Transaction>& existing_home_txs);

// Price deflator between two unit time coordinates, T_ij = exp(gamma(t_i) - gamma(t_j)).
struct TimeDeflator {
  std::function<double(double)> log_index;
  bool fallback = false;  // true when built from the detrending polynomial

  double factor(double t_i, double t_j) const {
    return std::exp(log_index(t_i) - log_index(t_j));
  }
};

TimeDeflator deflator_from_period_effects(const PeriodEffects& pe);

// Radius neighbor sets over planar coordinates (uniform grid buckets with an
// exact distance filter). Units without coordinates are excluded and counted.
struct NeighborSet {
  double radius = 0;
  std::vector<std::vector<std::size_t>> neighbors;  // i -> sorted js, i excluded
  std::size_t n_missing_coords = 0;
};

NeighborSet build_neighbors(const std::vector<TaxUnit>& units, double radius);

// Exact minimizer over kappa in [0,1] of max_j max(0, a_j + b_j kappa):
// convex piecewise-linear; the upper envelope of the affine pieces is built
// once and the minimum read off its breakpoints.
struct RampMinResult {
  double value = 0;
  double kappa = 0;
};
RampMinResult min_max_affine_ramps(const std::vector<double>& a,
                                   const std::vector<double>& b);

struct BoundResult {
  double bound_level = 0;  // mean over draws, currency
  double bound_rate = 0;   // divided by the unit's mean drawn price
  double kappa_S_mean = 0;
  double se = 0;
  int draws = 0;
  bool empty_neighbors = false;
};

// Monte Carlo lower bound for the regulatory tax of unit i from nearby
// buildings: independent posterior draws for i and each neighbor, the inner
// worst-case kappa_S minimization solved exactly per draw.
BoundResult rt_lower_bound(std::size_t i, const std::vector<TaxUnit>& units,
                           const NeighborSet& nbrs, const FrontierLevels& levels,
                           const FrontierEstimate& est, double kappa_T,
                           const TimeDeflator& deflator, int draws, std::uint64_t seed);

}  // namespace frontier
