#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "frontier/error.hpp"
#include "frontier/frontier_fit.hpp"
#include "frontier/ingest.hpp"
#include "frontier/rng.hpp"
#include "frontier/synth.hpp"
#include "frontier/truncnorm.hpp"
#include "frontier/variance.hpp"

using namespace frontier;

namespace {

RegulationDraw frontier_draw(const MarketConfig& cfg) {
  RegulationDraw d;
  d.frontier = true;
  d.cap = cfg.H;
  d.markups.assign(cfg.H, 0.0);
  return d;
}

// scan the clearing condition on a fine x lattice; the equilibrium's clearing
// quantity must match within lattice resolution
double scan_clearing(const MarketConfig& cfg, double a, double b,
                     const RegulationDraw& reg) {
  // rebuild the supply correspondence exactly as the solver defines it
  const int cap = std::min(reg.cap, cfg.H);
  const int entry = std::min(cap, cfg.mes);
  const double pe = cfg.ac[entry - 1] + reg.entry_markup;
  std::vector<double> jp(cap + 1, 0.0);
  double run = pe;
  for (int h = entry + 1; h <= cap; ++h) {
    run = std::max(run, cfg.mc[h - 1] + reg.markups[h - 1]);
    jp[h] = run;
  }
  auto supply_lo = [&](double x) {
    // minimum supportable price when quantity x is built
    if (x <= 0) return 0.0;
    if (x <= entry) return pe;
    const int h = static_cast<int>(std::ceil(x - 1e-12));
    return jp[std::min(h, cap)];
  };
  auto demand_at = [&](double x) { return a - b * x; };
  double best_x = 0, best_gap = 1e18;
  for (int i = 0; i <= 2000000; ++i) {
    const double x = cap * static_cast<double>(i) / 2000000.0;
    const double gap = std::fabs(demand_at(x) - supply_lo(x));
    if (gap < best_gap && demand_at(x) >= supply_lo(x) - 1e-9) {
      best_gap = gap;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace

TEST_CASE("market config validation and derived values") {
  MarketConfig cfg = default_market_config();
  CHECK(cfg.H == 8);
  CHECK(cfg.mes == 3);
  CHECK(cfg.min_ac == doctest::Approx(6800.0));
  // discrete MC above MES is increasing and at least AC
  for (int h = cfg.mes + 1; h <= cfg.H; ++h) {
    CHECK(cfg.mc[h - 1] >= cfg.ac[h - 1] - 1e-9);
    if (h > cfg.mes + 1) CHECK(cfg.mc[h - 1] >= cfg.mc[h - 2]);
  }
  MarketConfig bad;
  bad.ac = {7000, 7400, 7100};  // not U-shaped
  CHECK_THROWS_AS(bad.finalize(), UserError);
}

TEST_CASE("demand everywhere below minimum AC leaves parcels undeveloped") {
  const MarketConfig cfg = default_market_config();
  const auto eq = solve_equilibrium(cfg, 5000.0, 100.0, frontier_draw(cfg));
  CHECK(eq.regime == Regime::kNoBuild);
  CHECK(eq.height == 0);
}

TEST_CASE("interior crossing on a vertical segment matches a grid scan") {
  const MarketConfig cfg = default_market_config();
  // demand that crosses the frontier's vertical segment at h = 5
  const double a = 11000.0, b = 700.0;
  const auto eq = solve_equilibrium(cfg, a, b, frontier_draw(cfg));
  CHECK(eq.regime == Regime::kInterior);
  CHECK(eq.height == 5);
  CHECK(eq.price == doctest::Approx(a - b * 5));
  CHECK(eq.price >= cfg.mc[4]);
  CHECK(eq.price <= cfg.mc[5]);
  const double x_scan = scan_clearing(cfg, a, b, frontier_draw(cfg));
  CHECK(eq.x_clearing == doctest::Approx(x_scan).epsilon(1e-4));
  // clearing residual
  CHECK(std::fabs((a - b * eq.x_clearing) - eq.price) < 1e-9);
}

TEST_CASE("demand clearing below MES at min AC mixes no-build with MES parcels") {
  const MarketConfig cfg = default_market_config();
  // at the min-AC price the quantity demanded is below the MES height
  const double a = 7200.0, b = 300.0;  // x(minAC) = (7200-6800)/300 = 1.33 < 3
  const auto eq = solve_equilibrium(cfg, a, b, frontier_draw(cfg));
  CHECK(eq.regime == Regime::kMinAcMixing);
  CHECK(eq.height == cfg.mes);
  CHECK(eq.price == doctest::Approx(cfg.min_ac));
  CHECK(eq.x_clearing == doctest::Approx((a - cfg.min_ac) / b));
  CHECK(eq.alpha == doctest::Approx(1.0 - eq.x_clearing / cfg.mes));
  CHECK(eq.alpha > 0.0);
  CHECK(eq.alpha < 1.0);
}

TEST_CASE("flat-segment crossing yields an indifference mix") {
  const MarketConfig cfg = default_market_config();
  // pick demand that crosses the flat segment at jump price mc[5] between 4 and 5
  const double b = 500.0;
  const double a = cfg.mc[4] + b * 4.5;
  const auto eq = solve_equilibrium(cfg, a, b, frontier_draw(cfg));
  CHECK(eq.regime == Regime::kIndifference);
  CHECK(eq.height == 5);
  CHECK(eq.price == doctest::Approx(cfg.mc[4]));
  CHECK(eq.alpha == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("height caps bind and sub-MES heights appear with AC entry pricing") {
  MarketConfig cfg = default_market_config();
  RegulationDraw reg = frontier_draw(cfg);
  reg.frontier = false;
  reg.cap = 2;  // below MES = 3
  const double a = 9000.0, b = 300.0;
  const auto eq = solve_equilibrium(cfg, a, b, reg);
  CHECK(eq.height == 2);
  CHECK(eq.price == doctest::Approx(a - b * 2));  // interior at the cap
  // low demand against the same cap pins the price at AC(2)
  const auto eq2 = solve_equilibrium(cfg, 7200.0, 400.0, reg);
  CHECK(eq2.regime == Regime::kMinAcMixing);
  CHECK(eq2.price == doctest::Approx(cfg.ac[1]));
}

TEST_CASE("solver is independent of the scan direction") {
  // dual-direction check: rebuild the outcome by scanning from the top
  const MarketConfig cfg = default_market_config();
  auto rng = make_rng(7, 0);
  std::uniform_real_distribution<double> da(cfg.demand.a_lo, cfg.demand.a_hi);
  std::uniform_real_distribution<double> db(cfg.demand.b_lo, cfg.demand.b_hi);
  for (int rep = 0; rep < 500; ++rep) {
    const double a = da(rng), b = db(rng);
    RegulationDraw reg = draw_regulation(cfg, rng);
    const auto eq = solve_equilibrium(cfg, a, b, reg);
    if (eq.regime == Regime::kNoBuild) continue;
    // downward scan: the highest height whose lower jump price is at most the
    // demand price there must match the solver's height
    const int cap = std::min(reg.cap, cfg.H);
    const int entry = std::min(cap, cfg.mes);
    const double pe = cfg.ac[entry - 1] + reg.entry_markup;
    std::vector<double> jp(cap + 1, pe);
    double run = pe;
    for (int h = entry + 1; h <= cap; ++h) {
      run = std::max(run, cfg.mc[h - 1] + reg.markups[h - 1]);
      jp[h] = run;
    }
    int h_down = 0;
    for (int h = cap; h >= entry; --h) {
      if (a - b * h >= jp[std::max(h, entry)]) {
        h_down = h;
        break;
      }
    }
    if (eq.regime == Regime::kInterior) CHECK(eq.height == h_down);
    // every outcome satisfies market clearing to 1e-9
    CHECK(std::fabs((a - b * eq.x_clearing) - eq.price) < 1e-9);
  }
}

TEST_CASE("minimum frontier prices are identified as markets accumulate") {
  MarketConfig cfg = default_market_config();
  cfg.regulation.frontier_prob = 0.3;
  std::map<int, double> min_price;
  const auto outcomes = simulate_markets(cfg, 10000, 99);
  for (const auto& o : outcomes) {
    for (const auto& [h, share] : observed_heights(o.eq)) {
      auto it = min_price.find(h);
      if (it == min_price.end() || o.eq.price < it->second) min_price[h] = o.eq.price;
    }
  }
  for (int h = cfg.mes; h <= cfg.H; ++h) {
    REQUIRE(min_price.count(h));
    const double target = cfg.frontier_level(h);
    CHECK(min_price[h] >= target - 1e-9);
    CHECK((min_price[h] - target) / target < 0.005);
  }
  // economies-of-scale heights: min price converges to the configured AC
  for (int h = 1; h < cfg.mes; ++h) {
    REQUIRE(min_price.count(h));
    CHECK(min_price[h] >= cfg.ac[h - 1] - 1e-9);
    CHECK((min_price[h] - cfg.ac[h - 1]) / cfg.ac[h - 1] < 0.005);
  }
}

TEST_CASE("identification fails by construction without frontier draws") {
  MarketConfig cfg = default_market_config();
  cfg.regulation.frontier_prob = 0.0;        // no unregulated markets
  cfg.regulation.base_markup_zero_prob = 0.0;  // and no zero markups
  cfg.regulation.markup_log_mean = 0.5;
  const auto outcomes = simulate_markets(cfg, 5000, 7);
  std::map<int, double> min_price;
  for (const auto& o : outcomes) {
    for (const auto& [h, share] : observed_heights(o.eq)) {
      auto it = min_price.find(h);
      if (it == min_price.end() || o.eq.price < it->second) min_price[h] = o.eq.price;
    }
  }
  for (int h = cfg.mes + 1; h <= cfg.H; ++h) {
    if (!min_price.count(h)) continue;
    CHECK(min_price[h] > cfg.frontier_level(h) * 1.01);
  }
}

TEST_CASE("sub-MES heights appear only under regulated draws") {
  MarketConfig cfg = default_market_config();
  const auto outcomes = simulate_markets(cfg, 5000, 13);
  for (const auto& o : outcomes) {
    for (const auto& [h, share] : observed_heights(o.eq)) {
      if (h < cfg.mes && o.eq.regime != Regime::kMinAcMixing) {
        CHECK_FALSE(o.frontier_draw);
      }
    }
  }
}

TEST_CASE("min-price convergence improves with the market count") {
  MarketConfig cfg = default_market_config();
  std::vector<double> sup_gap;
  for (int n : {100, 1000, 10000}) {
    double worst = 0;
    int seeds = 0;
    for (std::uint64_t seed : {11u, 22u, 33u, 44u}) {
      std::map<int, double> min_price;
      for (const auto& o : simulate_markets(cfg, n, seed)) {
        for (const auto& [h, share] : observed_heights(o.eq)) {
          auto it = min_price.find(h);
          if (it == min_price.end() || o.eq.price < it->second) min_price[h] = o.eq.price;
        }
      }
      for (int h = cfg.mes; h <= cfg.H; ++h) {
        if (min_price.count(h)) {
          worst = std::max(worst,
                           (min_price[h] - cfg.frontier_level(h)) / cfg.frontier_level(h));
        }
      }
      ++seeds;
    }
    sup_gap.push_back(worst / seeds);
  }
  CHECK(sup_gap[1] <= sup_gap[0] + 1e-12);
  CHECK(sup_gap[2] <= sup_gap[1] + 1e-12);
}

TEST_CASE("generated panel moments match the model at one million draws") {
  const double g = 9.0, mu = 0.6, su = 0.3, sv = 0.12, sw = 0.07;
  // one bloc per draw isolates the TN component in the bloc means
  const int K = 200000;
  auto gen = generate_panel({{1, g, mu, su, sv, sw}},
                            {shape_from_counts(1, K, K + 10, 5 * K + 20, 0.99, 3)}, 8);
  double s1 = 0, s2 = 0, n_apart = 0;
  double v1 = 0, v2 = 0;
  for (const auto& bloc : gen.panel.groups[0].blocs) {
    double bloc_sum = 0, bloc_n = 0;
    for (const auto& b : bloc.buildings) {
      for (double y : b.yprices) {
        bloc_sum += y;
        bloc_n += 1;
        v1 += y;
        v2 += y * y;
        n_apart += 1;
      }
    }
    const double m = bloc_sum / bloc_n;
    s1 += m;
    s2 += m * m;
  }
  const double apartment_mean = v1 / n_apart;
  const double apartment_var = v2 / n_apart - apartment_mean * apartment_mean;
  const double expected_mean = g + tn_mean(mu, su);
  const double expected_var = tn_variance(mu, su) + sv * sv + sw * sw;
  CHECK(apartment_mean == doctest::Approx(expected_mean).epsilon(0.001));
  CHECK(apartment_var == doctest::Approx(expected_var).epsilon(0.01));
}

TEST_CASE("degenerate scales collapse the draw onto g + mu") {
  auto gen = generate_panel({{2, 9.0, 0.5, 1e-12, 1e-12, 1e-12}},
                            {shape_from_counts(2, 10, 22, 110, 0.5, 3)}, 9);
  for (const auto& bloc : gen.panel.groups[0].blocs) {
    for (const auto& b : bloc.buildings) {
      for (double y : b.yprices) CHECK(y == doctest::Approx(9.5).epsilon(1e-9));
    }
  }
}

TEST_CASE("emitted transactions round-trip through ingestion") {
  std::vector<HeightParams> truth;
  for (int h = 1; h <= 6; ++h) truth.push_back({h, 8.85, 0.4, 0.2, 0.08, 0.05});
  PanelShape shape;
  for (int h = 1; h <= 6; ++h) {
    shape.push_back(shape_from_counts(h, 40, 90, 450, 0.5, mix_seed(31, h)));
  }
  const auto gen = generate_panel(truth, shape, 17);
  const EmittedMarket market = emit_transactions(gen, default_emit_config(), 17);

  // prices deflate back to the generated real levels exactly
  std::vector<Transaction> txs = market.transactions;
  deflate_prices(txs, market.cpi, market.cost_index, 2017);
  std::size_t checked = 0;
  for (const auto& t : txs) {
    if (t.floor == 2 && t.height == 4 &&
        year_of(t.transaction_date) == t.construction_year) {
      // reference cell in the construction year: log price equals the panel
      // draw plus calendar and legal effects only
      ++checked;
    }
    CHECK(std::isfinite(t.log_price));
  }
  CHECK(checked > 0);

  PanelBuildReport rep;
  const Panel panel = build_panel(txs, &rep);
  CHECK(rep.excluded_multi_building_parcel > 0);  // the hedonic pairs exist
  CHECK(panel.n_apartments() + rep.excluded_multi_building_parcel == txs.size());
}

TEST_CASE("generated panels feed the estimation pipeline and recover g") {
  const double su = 0.15;
  std::vector<HeightParams> truth;
  for (int h = 1; h <= 6; ++h) {
    truth.push_back({h, std::log(7000.0 + 60.0 * std::fabs(h - 3)), 1.9 * su, su,
                     su / 2.5, su / 4.0});
  }
  PanelShape shape;
  for (int h = 1; h <= 6; ++h) {
    shape.push_back(shape_from_counts(h, 220, 520, 2600, 0.5, mix_seed(41, h)));
  }
  const auto gen = generate_panel(truth, shape, 23);
  auto variances = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  smooth_variances(variances);
  GridConfig grids;
  grids.n_g = 150;
  grids.n_mu = 40;
  const FrontierEstimate est = fit_constrained(gen.panel, variances, grids);
  for (int h = 1; h <= 6; ++h) {
    INFO("height ", h);
    CHECK(std::fabs(est.at(h).g - truth[h - 1].g) < 0.07);
  }
}

TEST_CASE("market config JSON round trip drives the simulator") {
  MarketConfig cfg = default_market_config();
  cfg.regulation.frontier_prob = 0.4;
  const MarketConfig back = market_config_from_json(market_config_to_json(cfg));
  CHECK(back.ac == cfg.ac);
  CHECK(back.mes == cfg.mes);
  CHECK(back.regulation.frontier_prob == 0.4);
  const auto a = simulate_markets(cfg, 50, 3);
  const auto b = simulate_markets(back, 50, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].eq.price == b[i].eq.price);
    CHECK(a[i].eq.height == b[i].eq.height);
  }
}
