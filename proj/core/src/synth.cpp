#include "frontier/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "frontier/error.hpp"
#include "frontier/rng.hpp"
#include "frontier/truncnorm.hpp"

namespace frontier {

void MarketConfig::finalize() {
  H = static_cast<int>(ac.size());
  if (H < 2) throw UserError("market config: need at least 2 heights");
  if (q.empty()) {
    q.resize(H);
    for (int h = 1; h <= H; ++h) q[h - 1] = h;
  }
  if (static_cast<int>(q.size()) != H) throw UserError("market config: q/ac size mismatch");

  mes = 1;
  for (int h = 2; h <= H; ++h) {
    if (ac[h - 1] < ac[mes - 1]) mes = h;
  }
  min_ac = ac[mes - 1];

  mc.resize(H);
  mc[0] = ac[0];  // C(q(0)) = 0
  for (int h = 2; h <= H; ++h) {
    const double dc = ac[h - 1] * q[h - 1] - ac[h - 2] * q[h - 2];
    mc[h - 1] = dc / (q[h - 1] - q[h - 2]);
  }
  for (int h = 2; h <= mes; ++h) {
    if (ac[h - 1] > ac[h - 2]) {
      throw UserError("market config: AC must be weakly decreasing up to the minimum");
    }
  }
  for (int h = mes + 1; h <= H; ++h) {
    if (ac[h - 1] < ac[h - 2]) {
      throw UserError("market config: AC must be weakly increasing above the minimum");
    }
    if (h > mes + 1 && mc[h - 1] < mc[h - 2] - 1e-9) {
      throw UserError("market config: MC must be weakly increasing above the minimum");
    }
  }
}

double MarketConfig::frontier_level(int h) const {
  if (h < 1 || h > H) throw UserError("frontier_level: height out of range");
  return h <= mes ? ac[h - 1] : mc[h - 1];
}

MarketConfig default_market_config() {
  MarketConfig cfg;
  // gentle economies of scale to MES = 3, then rising marginal costs
  cfg.ac = {7400, 7000, 6800, 6850, 6975, 7130, 7315, 7520};
  cfg.demand.a_lo = 5500;
  cfg.demand.a_hi = 13000;
  cfg.demand.b_lo = 80;
  cfg.demand.b_hi = 450;
  cfg.finalize();
  return cfg;
}

MarketConfig market_config_from_json(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  MarketConfig cfg;
  cfg.ac = j.at("ac").get<std::vector<double>>();
  if (j.contains("q")) cfg.q = j.at("q").get<std::vector<double>>();
  if (j.contains("demand")) {
    const auto& d = j.at("demand");
    cfg.demand.a_lo = d.value("a_lo", cfg.demand.a_lo);
    cfg.demand.a_hi = d.value("a_hi", cfg.demand.a_hi);
    cfg.demand.b_lo = d.value("b_lo", cfg.demand.b_lo);
    cfg.demand.b_hi = d.value("b_hi", cfg.demand.b_hi);
  }
  if (j.contains("regulation")) {
    const auto& r = j.at("regulation");
    cfg.regulation.frontier_prob = r.value("frontier_prob", cfg.regulation.frontier_prob);
    cfg.regulation.cap_prob = r.value("cap_prob", cfg.regulation.cap_prob);
    cfg.regulation.base_markup_zero_prob =
        r.value("base_markup_zero_prob", cfg.regulation.base_markup_zero_prob);
    cfg.regulation.markup_log_mean = r.value("markup_log_mean", cfg.regulation.markup_log_mean);
    cfg.regulation.markup_log_sd = r.value("markup_log_sd", cfg.regulation.markup_log_sd);
  }
  cfg.finalize();
  return cfg;
}

std::string market_config_to_json(const MarketConfig& cfg) {
  nlohmann::json j;
  j["ac"] = cfg.ac;
  j["q"] = cfg.q;
  j["demand"] = {{"a_lo", cfg.demand.a_lo},
                 {"a_hi", cfg.demand.a_hi},
                 {"b_lo", cfg.demand.b_lo},
                 {"b_hi", cfg.demand.b_hi}};
  j["regulation"] = {{"frontier_prob", cfg.regulation.frontier_prob},
                     {"cap_prob", cfg.regulation.cap_prob},
                     {"base_markup_zero_prob", cfg.regulation.base_markup_zero_prob},
                     {"markup_log_mean", cfg.regulation.markup_log_mean},
                     {"markup_log_sd", cfg.regulation.markup_log_sd}};
  return j.dump(2);
}

RegulationDraw draw_regulation(const MarketConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RegulationDraw d;
  d.cap = cfg.H;
  d.markups.assign(cfg.H, 0.0);
  if (unif(rng) < cfg.regulation.frontier_prob) {
    d.frontier = true;
    return d;
  }
  d.frontier = false;
  if (unif(rng) < cfg.regulation.cap_prob) {
    std::uniform_int_distribution<int> cap_dist(1, cfg.H - 1);
    d.cap = cap_dist(rng);
  }
  std::normal_distribution<double> lgn(cfg.regulation.markup_log_mean,
                                       cfg.regulation.markup_log_sd);
  d.entry_markup = unif(rng) < cfg.regulation.base_markup_zero_prob
                       ? 0.0
                       : cfg.min_ac * 0.15 * std::exp(lgn(rng));
  for (int h = 0; h < cfg.H; ++h) {
    d.markups[h] = unif(rng) < cfg.regulation.base_markup_zero_prob
                       ? 0.0
                       : cfg.min_ac * 0.15 * std::exp(lgn(rng));
  }
  return d;
}

EquilibriumOutcome solve_equilibrium(const MarketConfig& cfg, double demand_a,
                                     double demand_b, const RegulationDraw& reg) {
  if (!(demand_b > 0)) throw UserError("solve_equilibrium: demand must be decreasing");
  const int cap = std::max(1, std::min(reg.cap, cfg.H));
  const int entry = std::min(cap, cfg.mes);
  const double pe = cfg.ac[entry - 1] + reg.entry_markup;

  // nondecreasing jump prices above the entry height
  std::vector<double> jp(cap + 1, 0.0);
  double run = pe;
  for (int h = entry + 1; h <= cap; ++h) {
    run = std::max(run, cfg.mc[h - 1] + reg.markups[h - 1]);
    jp[h] = run;
  }

  auto demand_at = [&](double x) { return demand_a - demand_b * x; };
  auto demand_inv = [&](double p) { return (demand_a - p) / demand_b; };

  EquilibriumOutcome out;
  if (demand_at(0.0) < pe) {
    out.regime = Regime::kNoBuild;
    out.height = 0;
    out.price = demand_at(0.0);
    out.x_clearing = 0.0;
    return out;
  }
  if (demand_at(entry) <= pe) {
    // price pinned at the entry level; parcels split between no-build and entry
    out.regime = Regime::kMinAcMixing;
    out.height = entry;
    out.price = pe;
    out.x_clearing = demand_inv(pe);
    out.alpha = 1.0 - out.x_clearing / static_cast<double>(entry);
    return out;
  }
  for (int h = entry; h <= cap; ++h) {
    if (h > entry && demand_at(h) < jp[h]) {
      out.regime = Regime::kIndifference;
      out.height = h;
      out.price = jp[h];
      out.x_clearing = demand_inv(jp[h]);
      out.alpha = static_cast<double>(h) - out.x_clearing;  // share built at h-1
      return out;
    }
    const double hi = h < cap ? jp[h + 1] : std::numeric_limits<double>::infinity();
    if (demand_at(h) <= hi) {
      out.regime = Regime::kInterior;
      out.height = h;
      out.price = demand_at(h);
      out.x_clearing = static_cast<double>(h);
      return out;
    }
  }
  throw InternalError("solve_equilibrium: no crossing found");
}

std::vector<MarketOutcome> simulate_markets(const MarketConfig& cfg, int n,
                                            std::uint64_t seed) {
  std::vector<MarketOutcome> out(n);
  for (int i = 0; i < n; ++i) {
    auto rng = make_rng(seed, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> da(cfg.demand.a_lo, cfg.demand.a_hi);
    std::uniform_real_distribution<double> db(cfg.demand.b_lo, cfg.demand.b_hi);
    const double a = da(rng);
    const double b = db(rng);
    const RegulationDraw reg = draw_regulation(cfg, rng);
    out[i].eq = solve_equilibrium(cfg, a, b, reg);
    out[i].frontier_draw = reg.frontier;
    out[i].cap = reg.cap;
  }
  return out;
}

std::vector<std::pair<int, double>> observed_heights(const EquilibriumOutcome& eq) {
  switch (eq.regime) {
    case Regime::kNoBuild:
      return {};
    case Regime::kInterior:
      return {{eq.height, 1.0}};
    case Regime::kMinAcMixing: {
      const double built = 1.0 - eq.alpha;
      if (built <= 0) return {};
      return {{eq.height, built}};
    }
    case Regime::kIndifference: {
      std::vector<std::pair<int, double>> v;
      if (eq.alpha > 0 && eq.height >= 2) v.push_back({eq.height - 1, eq.alpha});
      if (eq.alpha < 1) v.push_back({eq.height, 1.0 - eq.alpha});
      return v;
    }
  }
  return {};
}

ShapeHeight shape_from_counts(int height, int blocs, int buildings, int apartments,
                              double share_single_bloc, std::uint64_t seed) {
  if (blocs < 1 || buildings < blocs || apartments < 2 * buildings) {
    throw UserError("shape_from_counts: infeasible counts at height " +
                    std::to_string(height));
  }
  auto rng = make_rng(seed, static_cast<std::uint64_t>(height));

  int singles;
  if (buildings == blocs) {
    singles = blocs;
  } else {
    singles = static_cast<int>(std::lround(share_single_bloc * blocs));
    singles = std::max(singles, 2 * blocs - buildings);
    singles = std::clamp(singles, 0, blocs - 1);
  }
  const int rest_blocs = blocs - singles;
  const int rest_buildings = buildings - singles;

  ShapeHeight sh;
  sh.height = height;
  sh.blocs.resize(blocs);
  std::vector<int> per_bloc(blocs, 1);
  if (rest_blocs > 0) {
    for (int i = 0; i < rest_blocs; ++i) per_bloc[singles + i] = 2;
    int extra = rest_buildings - 2 * rest_blocs;
    std::uniform_int_distribution<int> pick(singles, blocs - 1);
    while (extra > 0) {
      per_bloc[pick(rng)] += 1;
      --extra;
    }
  }

  std::vector<int> per_building(buildings, 2);
  int extra_apartments = apartments - 2 * buildings;
  std::uniform_int_distribution<int> pickb(0, buildings - 1);
  while (extra_apartments > 0) {
    per_building[pickb(rng)] += 1;
    --extra_apartments;
  }

  int b = 0;
  for (int k = 0; k < blocs; ++k) {
    for (int i = 0; i < per_bloc[k]; ++i) {
      sh.blocs[k].apartments_per_building.push_back(per_building[b++]);
    }
  }
  // shuffle bloc order so single-building blocs are not clustered
  std::shuffle(sh.blocs.begin(), sh.blocs.end(), rng);
  return sh;
}

PanelShape reference_market_shape(std::uint64_t seed) {
  struct Row {
    int h, blocs, buildings, apartments;
    double single;
  };
  static const Row rows[] = {
      {1, 182, 319, 1453, 0.74},   {2, 629, 1661, 8068, 0.53},
      {3, 606, 1394, 10310, 0.57}, {4, 874, 2968, 28266, 0.45},
      {5, 866, 2562, 27642, 0.47}, {6, 826, 2315, 27336, 0.49},
      {7, 663, 1639, 24725, 0.51}, {8, 572, 1340, 24086, 0.53},
      {9, 472, 1137, 24384, 0.52}, {10, 341, 674, 15682, 0.55},
      {11, 202, 331, 9214, 0.68},  {12, 155, 253, 7517, 0.64},
      {13, 154, 207, 7303, 0.76},  {14, 121, 202, 6369, 0.69},
      {15, 112, 185, 7434, 0.66},  {16, 93, 142, 6024, 0.68},
      {17, 80, 145, 6825, 0.62},   {18, 76, 122, 4060, 0.71},
      {19, 61, 97, 3407, 0.66},    {20, 62, 90, 3744, 0.73},
      {21, 49, 67, 3894, 0.71},    {22, 42, 69, 2373, 0.69},
      {23, 25, 40, 1623, 0.68},    {24, 36, 45, 1930, 0.78},
      {25, 21, 22, 1252, 0.95},    {26, 18, 26, 902, 0.78},
      {27, 12, 14, 766, 0.83},     {28, 15, 21, 925, 0.67},
      {29, 14, 19, 730, 0.71},     {30, 14, 16, 659, 0.86},
      {31, 7, 9, 309, 0.71},       {32, 7, 7, 205, 1.00},
      {33, 5, 6, 267, 0.80},       {34, 6, 8, 267, 0.83},
      {35, 11, 17, 603, 0.64},
  };
  PanelShape shape;
  for (const auto& r : rows) {
    shape.push_back(shape_from_counts(r.h, r.blocs, r.buildings, r.apartments, r.single,
                                      mix_seed(seed, r.h)));
  }
  return shape;
}

GeneratedPanel generate_panel(const std::vector<HeightParams>& truth,
                              const PanelShape& shape, std::uint64_t seed) {
  GeneratedPanel out;
  out.truth = truth;
  auto params_for = [&](int h) -> const HeightParams& {
    for (const auto& p : truth) {
      if (p.height == h) return p;
    }
    throw UserError("generate_panel: no truth parameters for height " + std::to_string(h));
  };

  const DayNumber day_lo = days_from_civil(2000, 1, 1);
  const DayNumber day_hi = days_from_civil(2017, 12, 31);

  for (const auto& sh : shape) {
    const HeightParams& p = params_for(sh.height);
    if (!(p.sigma_u > 0) || !(p.sigma_v > 0) || !(p.sigma_w > 0)) {
      throw UserError("generate_panel: scales must be positive at height " +
                      std::to_string(sh.height));
    }
    auto rng = make_rng(seed, static_cast<std::uint64_t>(sh.height));
    std::normal_distribution<double> nv(0.0, p.sigma_v), nw(0.0, p.sigma_w);
    std::uniform_int_distribution<int> day_dist(day_lo, day_hi);
    std::uniform_real_distribution<double> coord(0.0, 10000.0);

    HeightGroup group;
    group.height = sh.height;
    for (std::size_t k = 0; k < sh.blocs.size(); ++k) {
      PanelBloc bloc;
      bloc.bloc_id = "h" + std::to_string(sh.height) + "_k" + std::to_string(k);
      const double u = tn_sample(p.mu_u, p.sigma_u, rng);
      const double bx = coord(rng), by = coord(rng);
      std::normal_distribution<double> jitter(0.0, 100.0);
      for (std::size_t i = 0; i < sh.blocs[k].apartments_per_building.size(); ++i) {
        PanelBuilding bud;
        bud.building_id = bloc.bloc_id + "_b" + std::to_string(i);
        bud.parcel_id = bud.building_id;
        bud.city_id = "city" + std::to_string(k % 5);
        bud.x = bx + jitter(rng);
        bud.y = by + jitter(rng);
        const double w = nw(rng);
        const int J = sh.blocs[k].apartments_per_building[i];
        for (int j = 0; j < J; ++j) {
          bud.yprices.push_back(p.g + u + w + nv(rng));
          bud.days.push_back(static_cast<double>(day_dist(rng)));
        }
        bud.mean_day = std::accumulate(bud.days.begin(), bud.days.end(), 0.0) /
                       static_cast<double>(bud.days.size());
        bloc.buildings.push_back(std::move(bud));
      }
      group.blocs.push_back(std::move(bloc));
    }
    out.panel.groups.push_back(std::move(group));
  }
  std::sort(out.panel.groups.begin(), out.panel.groups.end(),
            [](const HeightGroup& a, const HeightGroup& b) { return a.height < b.height; });
  return out;
}

EmitConfig default_emit_config() {
  EmitConfig cfg;
  // reference premium calibration; small plausible values for the
  // unreported cells
  cfg.premium_coef = {0.0088,   // floor
                      -0.020,   // ground
                      -0.010,   // first
                      0.004,    // second
                      0.006,    // third
                      -0.003,   // first x above4
                      -0.002,   // second x above4
                      -0.001,   // third x above4
                      0.0005,   // floor x above10
                      -0.0006,  // height
                      0.0361,   // penthouse
                      0.0058,   // penthouse-1
                      0.0027};  // penthouse x height
  return cfg;
}

namespace {

double restricted_premium(const std::vector<double>& c, int f, int h) {
  auto term = [&](int ff, int hh) {
    double x[13];
    x[0] = ff;
    x[1] = ff == 0;
    x[2] = ff == 1;
    x[3] = ff == 2;
    x[4] = ff == 3;
    x[5] = ff == 1 && hh > 4;
    x[6] = ff == 2 && hh > 4;
    x[7] = ff == 3 && hh > 4;
    x[8] = hh > 10 ? ff : 0;
    x[9] = hh;
    x[10] = ff == hh;
    x[11] = ff == hh - 1;
    x[12] = (x[10] + x[11]) * hh;
    double s = 0;
    for (int j = 0; j < 13; ++j) s += c[j] * x[j];
    return s;
  };
  return term(f, h) - term(2, 4);
}

PriceIndexSeries monthly_index(int y0, int y1, int base_year, double annual_rate) {
  PriceIndexSeries s;
  for (int y = y0; y <= y1; ++y) {
    for (int m = 1; m <= 12; ++m) {
      const double t = (y - base_year) + (m - 1) / 12.0;
      s.points.emplace_back(days_from_civil(y, m, 1),
                            100.0 * std::pow(1.0 + annual_rate, t));
    }
  }
  return s;
}

}  // namespace

EmittedMarket emit_transactions(const GeneratedPanel& gen, const EmitConfig& cfg,
                                std::uint64_t seed) {
  if (cfg.premium_coef.size() != 13) {
    throw UserError("emit_transactions: premium_coef must have 13 entries");
  }
  EmittedMarket out;
  out.truth = gen.truth;
  out.cpi = monthly_index(cfg.first_year - 2, cfg.last_year + 2, cfg.base_year,
                          cfg.cpi_annual);
  out.cost_index = monthly_index(cfg.first_year - 2, cfg.last_year + 2, cfg.base_year,
                                 cfg.cost_annual);
  const DayNumber base_day = days_from_civil(cfg.base_year, 7, 1);
  const double cpi_base = out.cpi.at(base_day);
  const double cost_base = out.cost_index.at(base_day);

  auto rng = make_rng(seed, 0xE317u);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_real_distribution<double> area_dist(55.0, 140.0);
  std::normal_distribution<double> legal_fx(0.0, cfg.legal_effect_sd);
  std::vector<double> legal_effects(8);
  for (auto& e : legal_effects) e = legal_fx(rng);

  // pair a share of buildings into two-building parcels spanning different
  // heights; these identify the hedonic height effects
  struct Ref {
    std::size_t gi, ki, bi;
  };
  std::vector<Ref> refs;
  for (std::size_t gi = 0; gi < gen.panel.groups.size(); ++gi) {
    const auto& g = gen.panel.groups[gi];
    for (std::size_t ki = 0; ki < g.blocs.size(); ++ki) {
      for (std::size_t bi = 0; bi < g.blocs[ki].buildings.size(); ++bi) {
        refs.push_back({gi, ki, bi});
      }
    }
  }
  std::vector<std::string> parcel_override(refs.size());
  const std::size_t want_pairs =
      static_cast<std::size_t>(cfg.multi_building_parcel_share * refs.size() / 2.0);
  std::vector<std::size_t> shuffled(refs.size());
  std::iota(shuffled.begin(), shuffled.end(), 0);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::size_t made = 0;
  for (std::size_t s = 0; s + 1 < shuffled.size() && made < want_pairs; s += 2) {
    const auto& r1 = refs[shuffled[s]];
    const auto& r2 = refs[shuffled[s + 1]];
    if (gen.panel.groups[r1.gi].height == gen.panel.groups[r2.gi].height) continue;
    const std::string pid = "mp" + std::to_string(made);
    parcel_override[shuffled[s]] = pid;
    parcel_override[shuffled[s + 1]] = pid;
    ++made;
  }

  std::uniform_int_distribution<int> cyear_dist(cfg.first_year, cfg.last_year);
  std::uniform_int_distribution<int> delta_year(-1, 1);
  std::uniform_int_distribution<int> month_dist(1, 12);
  std::uniform_int_distribution<int> dom_dist(1, 28);
  std::uniform_int_distribution<int> legal_dist(0, 7);

  const double two_pi = 2.0 * M_PI;
  for (std::size_t ri = 0; ri < refs.size(); ++ri) {
    const auto& r = refs[ri];
    const auto& group = gen.panel.groups[r.gi];
    const auto& bloc = group.blocs[r.ki];
    const auto& bud = bloc.buildings[r.bi];
    const int h = group.height;
    const int cyear = cyear_dist(rng);
    const int floor_start = static_cast<int>(rng() % static_cast<std::uint64_t>(h + 1));
    for (std::size_t j = 0; j < bud.yprices.size(); ++j) {
      Transaction tx;
      tx.parcel_id = parcel_override[ri].empty() ? bud.parcel_id : parcel_override[ri];
      tx.building_id = bud.building_id;
      tx.bloc_id = bloc.bloc_id;
      tx.city_id = bud.city_id;
      tx.height = h;
      tx.floor = (floor_start + static_cast<int>(j)) % (h + 1);
      tx.construction_year = cyear;
      const int ty = cyear + delta_year(rng);
      tx.transaction_date = days_from_civil(ty, month_dist(rng), dom_dist(rng));
      const int legal = legal_dist(rng);
      tx.legal_status = "L" + std::to_string(legal);
      tx.area = std::round(area_dist(rng) * 10.0) / 10.0;
      tx.asset_fraction = 1.0;
      tx.property_type = "apartment";
      tx.x = bud.x;
      tx.y = bud.y;

      const double yf = year_fraction(tx.transaction_date) - cfg.base_year;
      const double calendar = cfg.calendar_amplitude * std::sin(two_pi * yf / 9.0);
      const int tyear = year_of(tx.transaction_date);
      const double timing = tyear == cyear - 1   ? cfg.year_before
                            : tyear == cyear + 1 ? cfg.year_after
                                                 : 0.0;
      const double log_real_m2 = bud.yprices[j] +
                                 restricted_premium(cfg.premium_coef, tx.floor, h) +
                                 timing + calendar + legal_effects[legal];
      const double nominal_m2 = std::exp(log_real_m2) *
                                (out.cpi.at(tx.transaction_date) / cpi_base) *
                                (out.cost_index.at(tx.transaction_date) / cost_base);
      tx.price = nominal_m2 * tx.area;
      out.transactions.push_back(std::move(tx));
    }
  }
  return out;
}

}  // namespace frontier
