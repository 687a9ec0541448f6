#pragma once

#include <map>
#include <string>
#include <vector>

#include "frontier/types.hpp"

namespace frontier {

enum class HedonicSpec { kRestricted, kSaturated };

// Floor/height premium model, ln(price) = ln p + ln m(f,h). The restricted
// design carries a linear floor term, ground..third-floor dummies with
// above-4-floor interactions for the first..third floors, a linear-floor
// interaction with heights above 10, a linear height term, penthouse and
// penultimate-floor dummies and their common height interaction. Premia are
// normalized so that ln m(2,4) = 0; adjusted prices represent a second-floor
// apartment in a 4-floor building at the given location.
struct HedonicModel {
  HedonicSpec spec = HedonicSpec::kRestricted;
  int max_height = 0;

  std::vector<std::string> names;   // premium-design coefficient names
  std::vector<double> coef;
  std::vector<double> se;           // heteroskedasticity-robust

  double coef_year_before = 0, se_year_before = 0;
  double coef_year_after = 0, se_year_after = 0;

  // calendar-day polynomial (degree 9) over the fitted date range
  double day_lo = 0, day_hi = 1;
  std::vector<double> day_coef;     // Chebyshev basis coefficients

  std::string legal_base;
  std::map<std::string, double> legal_coef;

  // saturated mode only: estimated cells keyed by (f, h)
  std::map<std::pair<int, int>, double> cell_table;

  // ln m(f,h), normalized at (2,4). Throws UserError outside the fitted range
  // (f > h, h < 1, or a saturated cell that was never observed).
  double log_premium(int floor, int height) const;

  // timing adjustment for a sale relative to the construction year
  double timing_effect(int transaction_year, int construction_year) const;
};

// Fixed-effects least squares with parcel dummies absorbed by the within
// transformation; robust (HC1) standard errors. Throws UserError on rank
// deficiency, naming the offending effects.
HedonicModel fit_hedonic(const std::vector<Transaction>& txs, HedonicSpec spec);

// Fills log_price_adj = log_price - ln m(f,h) - timing effect. The calendar
// polynomial and legal-status effects are left in (they are handled by the
// variance stage's time detrending).
void adjust_prices(std::vector<Transaction>& txs, const HedonicModel& model);

struct QuantityTable {
  std::vector<double> q;  // q[h-1] = sum_{f=1..h} m(f,h), h = 1..H
  int H = 0;

  double at(int h) const;
  // smallest h with q(h) >= quantity (so h(q(h)) == h)
  int height_for(double quantity) const;
  double sanity_ratio(int h) const { return (at(h) - h) / h; }
};

// Requires m(f,h) > 0 on 1..H; throws UserError naming the heights where the
// implied q would fail to increase.
QuantityTable quantity_table(const HedonicModel& model, int H);

std::string hedonic_to_json(const HedonicModel& m);
HedonicModel hedonic_from_json(const std::string& json_text);

}  // namespace frontier
