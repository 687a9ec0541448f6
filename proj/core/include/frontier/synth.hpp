#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "frontier/types.hpp"

namespace frontier {

// Equilibrium simulator: parcel-level step inverse supply against continuous
// decreasing inverse demand, with regulation entering as markups on the jump
// prices and occasional height caps.

struct DemandConfig {
  // linear inverse demand P = a - b x, (a, b) uniform draws
  double a_lo = 0, a_hi = 0;
  double b_lo = 0, b_hi = 0;
};

struct RegulationConfig {
  double frontier_prob = 0.3;        // whole-market unregulated draw
  double cap_prob = 0.5;             // given regulated: a height cap binds
  double base_markup_zero_prob = 0.3;  // given regulated: entry markup is 0
  double markup_log_mean = 0;        // lognormal markup parameters
  double markup_log_sd = 0.5;
};

struct MarketConfig {
  std::vector<double> q;   // q(h), h = 1..H; defaults to h when empty
  std::vector<double> ac;  // frontier average cost levels AC(q(h))
  DemandConfig demand;
  RegulationConfig regulation;

  // derived by finalize()
  int H = 0;
  int mes = 1;
  double min_ac = 0;
  std::vector<double> mc;  // discrete marginal cost (C(q(h))-C(q(h-1)))/(q(h)-q(h-1))

  // Validates the U shape (AC weakly decreasing to MES, MC weakly increasing
  // and >= AC after) and fills the derived fields.
  void finalize();

  // frontier jump price at h: AC below/at MES, MC above (identification target)
  double frontier_level(int h) const;
};

MarketConfig default_market_config();

// JSON form of the simulator configuration (the CLI's --market-config).
MarketConfig market_config_from_json(const std::string& json_text);
std::string market_config_to_json(const MarketConfig& cfg);

enum class Regime { kInterior, kIndifference, kMinAcMixing, kNoBuild };

struct EquilibriumOutcome {
  double price = 0;
  int height = 0;     // built height (0 = no build)
  double alpha = 0;   // fraction of parcels at the lower branch of a mixing regime
  Regime regime = Regime::kInterior;
  double x_clearing = 0;  // parcel-level quantity demanded at the price
};

struct RegulationDraw {
  bool frontier = true;
  int cap = 0;          // height cap (H when slack)
  double entry_markup = 0;
  std::vector<double> markups;  // per height, applied to MC jumps above entry
};

RegulationDraw draw_regulation(const MarketConfig& cfg, std::mt19937_64& rng);

// Unique crossing of demand and the drawn supply correspondence. Throws
// UserError when demand is not decreasing.
EquilibriumOutcome solve_equilibrium(const MarketConfig& cfg, double demand_a,
                                     double demand_b, const RegulationDraw& reg);

struct MarketOutcome {
  EquilibriumOutcome eq;
  bool frontier_draw = false;
  int cap = 0;
};

std::vector<MarketOutcome> simulate_markets(const MarketConfig& cfg, int n,
                                            std::uint64_t seed);

// Heights observed in an outcome with their observation shares: interior
// yields {h}, indifference {h-1, h}, min-AC mixing {entry height}.
std::vector<std::pair<int, double>> observed_heights(const EquilibriumOutcome& eq);

// ---- panel generation --------------------------------------------------

struct ShapeBloc {
  std::vector<int> apartments_per_building;  // each >= 2
};

struct ShapeHeight {
  int height = 0;
  std::vector<ShapeBloc> blocs;
};

using PanelShape = std::vector<ShapeHeight>;

// Builds a shape hitting aggregate counts: blocs, buildings and apartments at
// one height, with share_single_bloc of blocs holding exactly one building.
ShapeHeight shape_from_counts(int height, int blocs, int buildings, int apartments,
                              double share_single_bloc, std::uint64_t seed);

// A realistic large-market shape (35 heights, ~7.4k blocs, ~270k apartments)
// used by stress and acceptance runs.
PanelShape reference_market_shape(std::uint64_t seed = 17);

struct GeneratedPanel {
  Panel panel;
  std::vector<HeightParams> truth;
};

// Exact model draw y = g(h) + u_k + w_ki + v_kij with u truncated normal per
// bloc, w normal per building, v normal per apartment.
GeneratedPanel generate_panel(const std::vector<HeightParams>& truth,
                              const PanelShape& shape, std::uint64_t seed);

// ---- transaction emission (dog-fooding the ingestion pipeline) ----------

struct EmitConfig {
  // true premium design coefficients (restricted layout)
  std::vector<double> premium_coef;  // 13 entries
  double year_before = -0.0037, year_after = 0.0030;
  double calendar_amplitude = 0.03;  // smooth calendar drift of log prices
  double legal_effect_sd = 0.004;
  double cpi_annual = 0.02;          // index growth rates for the emitted series
  double cost_annual = 0.015;
  int base_year = 2017;
  int first_year = 1999, last_year = 2016;
  double multi_building_parcel_share = 0.03;
  int n_cities = 5;
  double city_extent_m = 8000;       // bloc coordinates drawn in a city box
};

EmitConfig default_emit_config();

struct EmittedMarket {
  std::vector<Transaction> transactions;  // nominal prices, schema-complete
  PriceIndexSeries cpi, cost_index;
  std::vector<HeightParams> truth;
};

// Expands a generated panel into apartment transactions with floor premia,
// timing/cohort effects, calendar drift and nominal index inflation applied,
// so the full ingest -> hedonic -> frontier pipeline can be exercised
// end-to-end against known truth.
EmittedMarket emit_transactions(const GeneratedPanel& gen, const EmitConfig& cfg,
                                std::uint64_t seed);

}  // namespace frontier
