#include "frontier/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "frontier/csv.hpp"
#include "frontier/rng.hpp"
#include "frontier/econ.hpp"
#include "frontier/error.hpp"
#include "frontier/hedonic.hpp"
#include "frontier/ingest.hpp"
#include "frontier/synth.hpp"
#include "frontier/tax.hpp"

namespace frontier {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string opath(const PipelineConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

Panel load_panel(const PipelineConfig& cfg) {
  const std::string path = opath(cfg, "transactions_adjusted.csv");
  require_artifact(path, "hedonic");
  auto txs = read_clean_transactions(path);
  return build_panel(txs);
}

VarianceEstimates load_variances(const PipelineConfig& cfg, const Panel& panel) {
  const std::string path = opath(cfg, "variances.csv");
  require_artifact(path, "variances");
  const CsvTable t = CsvTable::read_file(path);
  VarianceEstimates est;
  auto opt = [&](std::size_t r, const char* col) -> std::optional<double> {
    const std::string& s = t.cell(r, t.column(col));
    if (s == "NA" || s.empty()) return std::nullopt;
    return std::stod(s);
  };
  for (std::size_t r = 0; r < t.rows(); ++r) {
    HeightVariances hv;
    hv.height = std::stoi(t.cell(r, t.column("height")));
    hv.varV = opt(r, "varV");
    hv.varW = opt(r, "varW");
    hv.varU_moment_final = opt(r, "varU_moment");
    hv.varV_smooth = opt(r, "varV_smooth");
    hv.varW_smooth = opt(r, "varW_smooth");
    hv.dofV = std::stod(t.cell(r, t.column("dofV")));
    hv.dofW = std::stod(t.cell(r, t.column("dofW")));
    if (const auto* g = panel.group_at(hv.height)) hv.n_blocs = g->n_blocs();
    est.heights.push_back(std::move(hv));
  }
  return est;
}

FrontierEstimate load_frontier(const PipelineConfig& cfg) {
  // prefer the quartic fit when present (it defines levels beyond the top
  // height), else the constrained fit
  const std::string quartic = opath(cfg, "frontier_quartic.json");
  const std::string constrained = opath(cfg, "frontier_constrained.json");
  if (fs::exists(quartic)) return frontier_from_json(read_text_file(quartic));
  require_artifact(constrained, "frontier");
  return frontier_from_json(read_text_file(constrained));
}

QuantityTable load_quantities(const PipelineConfig& cfg, int H) {
  const std::string path = opath(cfg, "hedonic_model.json");
  require_artifact(path, "hedonic");
  const HedonicModel model = hedonic_from_json(read_text_file(path));
  // one height past the top so MC(q(H+1)) is available downstream
  return quantity_table(model, H + 1);
}

double resolve_kappa_T(const PipelineConfig& cfg, TimeDeflator& deflator,
                       std::string& source) {
  if (cfg.kappa_T != "estimate") {
    source = "fixed";
    return std::stod(cfg.kappa_T);
  }
  if (cfg.existing_homes_csv.empty()) {
    throw UserError("kappa_T=estimate requires an existing-homes transactions file "
                    "(config inputs.existing_homes)");
  }
  LoadResult res = load_transactions(cfg.existing_homes_csv, cfg.schema);
  // existing-home sales only need deflation, not the new-construction filters
  PriceIndexSeries cpi = load_index_csv(cfg.cpi_csv);
  PriceIndexSeries cost = load_index_csv(cfg.cost_index_csv);
  deflate_prices(res.transactions, cpi, cost, cfg.base_year);
  const PeriodEffects pe = fit_kappa_T(res.transactions);
  deflator = deflator_from_period_effects(pe);
  source = "estimated";
  json j = {{"delta", pe.delta},       {"delta_se", pe.delta_se},
            {"kappa_T", pe.kappa_T},   {"kappa_T_se", pe.kappa_T_se},
            {"gamma1", pe.gamma1},     {"gamma2", pe.gamma2},
            {"alpha1", pe.alpha1},     {"alpha2", pe.alpha2},
            {"base_year", pe.base_year}};
  write_text_file(opath(cfg, "kappa_T.json"), j.dump(2));
  return pe.kappa_T;
}

}  // namespace

void stage_ingest(const PipelineConfig& cfg) {
  if (cfg.transactions_csv.empty()) throw UserError("ingest: no transactions file configured");
  LoadResult res = load_transactions(cfg.transactions_csv, cfg.schema);
  write_rejects_csv(opath(cfg, "rejects.csv"), res.rejects);

  FilterReport rep;
  auto kept = apply_sample_filters(res.transactions, cfg.filters, &rep);

  PriceIndexSeries cpi = load_index_csv(cfg.cpi_csv);
  PriceIndexSeries cost = load_index_csv(cfg.cost_index_csv);
  deflate_prices(kept, cpi, cost, cfg.base_year);

  write_transactions_csv(opath(cfg, "transactions_clean.csv"), kept, cfg);
  json j = {{"input", rep.input},
            {"dropped_trim", rep.dropped_trim},
            {"dropped_year_window", rep.dropped_year_window},
            {"dropped_partial_asset", rep.dropped_partial_asset},
            {"dropped_single_family", rep.dropped_single_family},
            {"dropped_missing", rep.dropped_missing},
            {"dropped_single_transaction", rep.dropped_single_transaction},
            {"output", rep.output},
            {"rejects", res.rejects.size()}};
  write_text_file(opath(cfg, "filter_report.json"), j.dump(2));
  std::cout << "ingest: kept " << rep.output << "/" << rep.input << " rows, "
            << res.rejects.size() << " rejects\n";
}

void stage_hedonic(const PipelineConfig& cfg) {
  const std::string clean = opath(cfg, "transactions_clean.csv");
  require_artifact(clean, "ingest");
  auto txs = read_clean_transactions(clean);
  const HedonicSpec spec =
      cfg.hedonic_spec == "saturated" ? HedonicSpec::kSaturated : HedonicSpec::kRestricted;
  const HedonicModel model = fit_hedonic(txs, spec);
  adjust_prices(txs, model);
  write_text_file(opath(cfg, "hedonic_model.json"), hedonic_to_json(model));
  write_transactions_csv(opath(cfg, "transactions_adjusted.csv"), txs, cfg);

  // quantity table and sanity ratios
  const QuantityTable qt = quantity_table(model, model.max_height);
  CsvTable t({"height", "quantity", "sanity_ratio"});
  t.add_comment(artifact_stamp(cfg));
  for (int h = 1; h <= qt.H; ++h) {
    t.append_row({std::to_string(h), format_double(qt.at(h)),
                  format_double(qt.sanity_ratio(h))});
  }
  t.write_file(opath(cfg, "quantities.csv"));
  std::cout << "hedonic: fitted " << (spec == HedonicSpec::kSaturated ? "saturated" : "restricted")
            << " spec on " << txs.size() << " rows\n";
}

void stage_variances(const PipelineConfig& cfg) {
  const Panel panel = load_panel(cfg);
  const DetrendResult detrend = time_detrend(panel, 12, 10, cfg.seed);
  VarianceEstimates est = estimate_variances(panel, detrend);
  smooth_variances(est);
  write_variances_csv(opath(cfg, "variances.csv"), est, cfg);

  json dj = {{"degree", detrend.degree},
             {"coef", detrend.trend.coefficients()},
             {"day_lo", detrend.trend.x_lo()},
             {"day_hi", detrend.trend.x_hi()}};
  write_text_file(opath(cfg, "detrend.json"), dj.dump(2));
  std::cout << "variances: " << est.heights.size() << " heights, detrend degree "
            << detrend.degree << "\n";
}

void stage_frontier(const PipelineConfig& cfg, const std::string& mode) {
  const Panel panel = load_panel(cfg);
  VarianceEstimates variances = load_variances(cfg, panel);

  const auto profiles = compute_profiles(panel, variances, cfg.grids);
  if (mode == "constrained" || mode == "per_height") {
    const FrontierEstimate est =
        mode == "constrained" ? fit_constrained(profiles) : fit_per_height(profiles);
    write_text_file(opath(cfg, "frontier_" + mode + ".json"), frontier_to_json(est, cfg));
    if (mode == "constrained") {
      // side-by-side estimates table (levels, by-height fit, min and mean prices)
      const FrontierEstimate by_height = fit_per_height(profiles);
      CsvTable t({"height", "quantity", "mle", "mle_by_height", "minimum", "mean"});
      t.add_comment(artifact_stamp(cfg));
      QuantityTable qt;
      const std::string model_path = opath(cfg, "hedonic_model.json");
      if (fs::exists(model_path)) {
        qt = quantity_table(hedonic_from_json(read_text_file(model_path)),
                            panel.max_height());
      }
      for (const auto& fh : est.heights) {
        const auto* g = panel.group_at(fh.height);
        double mn = 0, mean = 0;
        if (g) {
          double lo = std::numeric_limits<double>::infinity(), s = 0;
          std::size_t n = 0;
          for (const auto& bloc : g->blocs) {
            for (const auto& b : bloc.buildings) {
              lo = std::min(lo, b.mean_log_price());
              s += b.mean_log_price();
              ++n;
            }
          }
          mn = std::exp(lo);
          mean = std::exp(s / static_cast<double>(n));
        }
        t.append_row({std::to_string(fh.height),
                      qt.H >= fh.height ? format_double(qt.at(fh.height)) : "NA",
                      format_double(std::exp(fh.g)),
                      format_double(std::exp(by_height.at(fh.height).g)),
                      g ? format_double(mn) : "NA", g ? format_double(mean) : "NA"});
      }
      t.write_file(opath(cfg, "frontier_table.csv"));
    }
    std::cout << "frontier(" << mode << "): MES=" << est.mes
              << " loglik=" << est.total_loglik << "\n";
  } else if (mode == "quartic") {
    const std::string cpath = opath(cfg, "frontier_constrained.json");
    require_artifact(cpath, "frontier --mode constrained");
    const FrontierEstimate init = frontier_from_json(read_text_file(cpath));
    const QuantityTable qt = load_quantities(cfg, panel.max_height());
    const FrontierEstimate est =
        fit_quartic(panel, variances, qt, init, cfg.quartic);
    write_text_file(opath(cfg, "frontier_quartic.json"), frontier_to_json(est, cfg));
    std::cout << "frontier(quartic): MES=" << est.mes << " beta=[";
    for (int i = 0; i < 5; ++i) std::cout << (i ? "," : "") << est.curve->beta[i];
    std::cout << "]\n";
  } else {
    throw UserError("frontier: unknown mode '" + mode + "'");
  }
}

void stage_bootstrap(const PipelineConfig& cfg) {
  const Panel panel = load_panel(cfg);
  const std::string cpath = opath(cfg, "frontier_constrained.json");
  require_artifact(cpath, "frontier --mode constrained");
  FrontierEstimate est = frontier_from_json(read_text_file(cpath));
  est.bands = bootstrap_ci(est, panel, cfg.bootstrap_replicates, cfg.band_level,
                           cfg.seed, cfg.grids);
  write_text_file(cpath, frontier_to_json(est, cfg));

  CsvTable t({"height", "g", "lower", "upper"});
  t.add_comment(artifact_stamp(cfg));
  for (std::size_t i = 0; i < est.bands->heights.size(); ++i) {
    const int h = est.bands->heights[i];
    t.append_row({std::to_string(h), format_double(est.at(h).g),
                  format_double(est.bands->lower[i]), format_double(est.bands->upper[i])});
  }
  t.write_file(opath(cfg, "frontier_bands.csv"));
  std::cout << "bootstrap: " << cfg.bootstrap_replicates << " replicates, level "
            << cfg.band_level << "\n";
}

void stage_tax(const PipelineConfig& cfg) {
  const Panel panel = load_panel(cfg);
  const FrontierEstimate est = load_frontier(cfg);
  QuantityTable qt;
  const QuantityTable* qtp = nullptr;
  if (est.curve) {
    qt = load_quantities(cfg, est.H);
    qtp = &qt;
  }
  const FrontierLevels levels = make_levels(est, qtp);
  auto units = collect_units(panel, !cfg.apartment_level);

  CsvTable t({"building_id", "h", "rate", "se", "bound_250", "bound_500", "bound_1000",
              "kappa_S_mean", "draws", "seed"});
  t.add_comment(artifact_stamp(cfg));
  for (const auto& u : units) {
    const RateResult r = expected_rt_rate(u, levels, est, cfg.draws, cfg.seed);
    t.append_row({u.building_id, std::to_string(u.height), format_double(r.rate),
                  format_double(r.se), "NA", "NA", "NA", "NA",
                  std::to_string(cfg.draws), std::to_string(cfg.seed)});
  }
  t.write_file(opath(cfg, "tax.csv"));
  std::cout << "tax: " << units.size() << " units\n";
}

void stage_bounds(const PipelineConfig& cfg) {
  const Panel panel = load_panel(cfg);
  const FrontierEstimate est = load_frontier(cfg);
  QuantityTable qt;
  const QuantityTable* qtp = nullptr;
  if (est.curve) {
    qt = load_quantities(cfg, est.H);
    qtp = &qt;
  }
  const FrontierLevels levels = make_levels(est, qtp);
  auto units = collect_units(panel, !cfg.apartment_level);

  TimeDeflator deflator;
  std::string kappa_source;
  double kappa_T;
  try {
    kappa_T = resolve_kappa_T(cfg, deflator, kappa_source);
  } catch (const UserError&) {
    throw;
  }
  if (!deflator.log_index) {
    // fixed kappa_T: fall back to the detrending polynomial as the deflator
    // basis (not the period-effects construction)
    const std::string dpath = opath(cfg, "detrend.json");
    require_artifact(dpath, "variances");
    json dj = json::parse(read_text_file(dpath));
    const PolyFit trend = PolyFit::from_parts(dj.at("day_lo"), dj.at("day_hi"),
                                              dj.at("coef").get<std::vector<double>>());
    deflator.fallback = true;
    deflator.log_index = [trend](double t_years) {
      // convert a year coordinate back to a day number for the polynomial
      const double day = (t_years - 1970.0) * 365.2425;
      return trend(day);
    };
  }

  std::vector<NeighborSet> nbrs;
  for (double d : cfg.radii) nbrs.push_back(build_neighbors(units, d));

  CsvTable t({"building_id", "h", "rate", "se", "bound_250", "bound_500", "bound_1000",
              "kappa_S_mean", "draws", "seed"});
  t.add_comment(artifact_stamp(cfg) + " kappa_T=" + format_double(kappa_T) + " (" +
                kappa_source + (deflator.fallback ? ", detrend-deflator" : "") + ")");
  for (std::size_t i = 0; i < units.size(); ++i) {
    const RateResult r = expected_rt_rate(units[i], levels, est, cfg.draws, cfg.seed);
    std::vector<std::string> bounds(3, "NA");
    std::string kappa_s = "NA";
    for (std::size_t d = 0; d < nbrs.size() && d < 3; ++d) {
      const BoundResult b = rt_lower_bound(i, units, nbrs[d], levels, est, kappa_T,
                                           deflator, cfg.draws, cfg.seed);
      bounds[d] = format_double(b.bound_rate);
      if (d + 1 == nbrs.size() || d == 2) kappa_s = format_double(b.kappa_S_mean);
    }
    t.append_row({units[i].building_id, std::to_string(units[i].height),
                  format_double(r.rate), format_double(r.se), bounds[0], bounds[1],
                  bounds[2], kappa_s, std::to_string(cfg.draws),
                  std::to_string(cfg.seed)});
  }
  t.write_file(opath(cfg, "tax.csv"));
  std::cout << "bounds: " << units.size() << " units at " << cfg.radii.size()
            << " radii (kappa_T " << kappa_source << ")\n";
}

void stage_elasticity(const PipelineConfig& cfg) {
  const std::string qpath = opath(cfg, "frontier_quartic.json");
  require_artifact(qpath, "frontier --mode quartic");
  const FrontierEstimate est = frontier_from_json(read_text_file(qpath));
  if (!est.curve) throw UserError("elasticity: quartic estimate has no cost curve");
  const QuantityTable qt = load_quantities(cfg, est.H);

  CsvTable t({"height", "q", "ac", "mc", "elasticity"});
  t.add_comment(artifact_stamp(cfg));
  for (int h = 1; h <= est.H; ++h) {
    const double q = qt.at(h);
    std::string sigma = "NA";
    try {
      sigma = format_double(elasticity(*est.curve, q));
    } catch (const UserError&) {
      // flat-MC singularity
    }
    t.append_row({std::to_string(h), format_double(q), format_double(est.curve->ac(q)),
                  format_double(est.curve->mc(q)), sigma});
  }
  t.write_file(opath(cfg, "elasticity.csv"));

  CsvTable iso({"height", "land_per_unit", "capital_per_unit"});
  iso.add_comment(artifact_stamp(cfg) +
                  " normalization=one unit of housing (land=1/q, capital=C(q)/q)");
  for (const auto& p : isoquant(*est.curve, qt)) {
    if (p.height > est.H) break;
    iso.append_row({std::to_string(p.height), format_double(p.land),
                    format_double(p.capital)});
  }
  iso.write_file(opath(cfg, "isoquant.csv"));
  std::cout << "elasticity: wrote elasticity.csv and isoquant.csv\n";
}

void stage_counterfactual(const PipelineConfig& cfg, int band_lo, int band_hi,
                          int target_h) {
  const Panel panel = load_panel(cfg);
  const std::string qpath = opath(cfg, "frontier_quartic.json");
  require_artifact(qpath, "frontier --mode quartic");
  const FrontierEstimate est = frontier_from_json(read_text_file(qpath));
  if (!est.curve) throw UserError("counterfactual: quartic estimate has no cost curve");
  const QuantityTable qt = load_quantities(cfg, std::max(est.H, target_h));
  const ConsolidationResult r =
      consolidation_counterfactual(panel, *est.curve, qt, band_lo, band_hi, target_h);
  json j = {{"band_lo", band_lo},
            {"band_hi", band_hi},
            {"target_h", target_h},
            {"land_delta_pct", r.land_delta_pct},
            {"nonland_cost_delta_pct", r.nonland_cost_delta_pct},
            {"buildings_before", r.buildings_before},
            {"buildings_after", r.buildings_after},
            {"meta", {{"tool_version", kToolVersion}, {"config_hash", config_hash(cfg)}}}};
  write_text_file(opath(cfg, "counterfactual.json"), j.dump(2));
  std::cout << "counterfactual: land " << r.land_delta_pct << "% cost "
            << r.nonland_cost_delta_pct << "%\n";
}

void stage_simulate(const PipelineConfig& cfg) {
  if (cfg.sim_kind == "markets") {
    MarketConfig mc = cfg.sim_market_config.empty()
                          ? default_market_config()
                          : market_config_from_json(read_text_file(cfg.sim_market_config));
    const auto outcomes = simulate_markets(mc, cfg.sim_markets, cfg.seed);
    CsvTable t({"market", "height", "price", "alpha", "regime", "frontier_draw", "cap"});
    t.add_comment(artifact_stamp(cfg));
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto& o = outcomes[i];
      const char* regime = o.eq.regime == Regime::kInterior       ? "interior"
                           : o.eq.regime == Regime::kIndifference ? "indifference"
                           : o.eq.regime == Regime::kMinAcMixing  ? "min_ac_mixing"
                                                                  : "no_build";
      t.append_row({std::to_string(i), std::to_string(o.eq.height),
                    format_double(o.eq.price), format_double(o.eq.alpha), regime,
                    o.frontier_draw ? "1" : "0", std::to_string(o.cap)});
    }
    t.write_file(opath(cfg, "market_outcomes.csv"));
    CsvTable f({"height", "frontier_level", "kind"});
    for (int h = 1; h <= mc.H; ++h) {
      f.append_row({std::to_string(h), format_double(mc.frontier_level(h)),
                    h <= mc.mes ? "ac" : "mc"});
    }
    f.write_file(opath(cfg, "market_frontier.csv"));
    std::cout << "simulate: " << outcomes.size() << " markets\n";
    return;
  }

  // panel kind: draw a synthetic market and emit the ingestion schema
  const PanelShape shape = cfg.sim_shape == "reference"
                               ? reference_market_shape(cfg.seed)
                               : [&] {
                                   PanelShape s;
                                   for (int h = 1; h <= 8; ++h) {
                                     s.push_back(shape_from_counts(
                                         h, 60, 140, 900, 0.5, mix_seed(cfg.seed, h)));
                                   }
                                   return s;
                                 }();
  const int H = shape.back().height;
  const auto truth = calibrated_truth(H, cfg.sim_sigma_u, cfg.sim_mu_ratio);
  const GeneratedPanel gen = generate_panel(truth, shape, cfg.seed);
  const EmittedMarket market = emit_transactions(gen, default_emit_config(), cfg.seed);

  write_transactions_csv(opath(cfg, "transactions.csv"), market.transactions, cfg);
  write_index_csv(opath(cfg, "cpi.csv"), market.cpi);
  write_index_csv(opath(cfg, "cost_index.csv"), market.cost_index);

  json truth_j = json::array();
  for (const auto& p : market.truth) {
    truth_j.push_back({{"h", p.height},
                       {"g", p.g},
                       {"mu_u", p.mu_u},
                       {"sigma_u", p.sigma_u},
                       {"sigma_v", p.sigma_v},
                       {"sigma_w", p.sigma_w}});
  }
  json j = {{"truth", truth_j},
            {"meta", {{"tool_version", kToolVersion}, {"config_hash", config_hash(cfg)},
                      {"seed", cfg.seed}}}};
  write_text_file(opath(cfg, "truth.json"), j.dump(2));
  std::cout << "simulate: " << market.transactions.size() << " transactions at " << H
            << " heights\n";
}

void stage_report(const PipelineConfig& cfg) {
  // bundle the plot-ready data series that exist so far
  const Panel panel = load_panel(cfg);
  fs::create_directories(fs::path(cfg.out_dir) / "report");
  auto rpath = [&](const std::string& n) {
    return (fs::path(cfg.out_dir) / "report" / n).string();
  };

  {  // building prices by height
    CsvTable t({"height", "building_price"});
    t.add_comment(artifact_stamp(cfg));
    for (const auto& g : panel.groups) {
      for (const auto& bloc : g.blocs) {
        for (const auto& b : bloc.buildings) {
          t.append_row({std::to_string(g.height),
                        format_double(std::exp(b.mean_log_price()))});
        }
      }
    }
    t.write_file(rpath("prices_by_height.csv"));
  }
  for (const char* f : {"variances.csv", "frontier_table.csv", "frontier_bands.csv",
                        "elasticity.csv", "isoquant.csv"}) {
    const auto src = fs::path(cfg.out_dir) / f;
    if (fs::exists(src)) fs::copy_file(src, rpath(f), fs::copy_options::overwrite_existing);
  }
  // tax summaries by height and by year when the tax table exists
  const auto tax_path = fs::path(cfg.out_dir) / "tax.csv";
  if (fs::exists(tax_path)) {
    const CsvTable t = CsvTable::read_file(tax_path.string());
    std::map<std::string, double> rate_by_building;
    std::map<int, std::pair<double, int>> by_h;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const int h = std::stoi(t.cell(r, t.column("h")));
      const double rate = std::stod(t.cell(r, t.column("rate")));
      rate_by_building[t.cell(r, t.column("building_id"))] = rate;
      by_h[h].first += rate;
      by_h[h].second += 1;
    }
    CsvTable s({"height", "mean_rate", "n"});
    s.add_comment(artifact_stamp(cfg));
    for (const auto& [h, acc] : by_h) {
      s.append_row({std::to_string(h), format_double(acc.first / acc.second),
                    std::to_string(acc.second)});
    }
    s.write_file(rpath("tax_by_height.csv"));

    // mean rate by transaction year (buildings dated by mean transaction day)
    std::map<int, std::pair<double, int>> by_year;
    for (const auto& g : panel.groups) {
      for (const auto& bloc : g.blocs) {
        for (const auto& b : bloc.buildings) {
          auto it = rate_by_building.find(b.building_id);
          if (it == rate_by_building.end()) continue;
          const int year = year_of(static_cast<DayNumber>(b.mean_day));
          by_year[year].first += it->second;
          by_year[year].second += 1;
        }
      }
    }
    CsvTable ty({"year", "mean_rate", "n"});
    ty.add_comment(artifact_stamp(cfg));
    for (const auto& [year, acc] : by_year) {
      ty.append_row({std::to_string(year), format_double(acc.first / acc.second),
                     std::to_string(acc.second)});
    }
    ty.write_file(rpath("tax_over_time.csv"));
  }
  std::cout << "report: bundled under " << (fs::path(cfg.out_dir) / "report").string()
            << "\n";
}

std::vector<HeightParams> calibrated_truth(int max_height, double sigma_u,
                                           double mu_ratio) {
  // constrained frontier levels of the reference calibration market, heights 1..35
  static const double levels[35] = {
      7359, 6822, 6814, 6696, 6660, 6660, 6744, 6744, 6744, 6744, 7013, 7013,
      7013, 7013, 7013, 7013, 7013, 7013, 7013, 7013, 7013, 7013, 7013, 7013,
      8264, 8264, 8264, 8264, 9239, 9239, 9757, 9972, 10695, 14307, 17950};
  std::vector<HeightParams> truth;
  for (int h = 1; h <= max_height; ++h) {
    HeightParams p;
    p.height = h;
    p.g = std::log(levels[std::min(h, 35) - 1]);
    p.sigma_u = sigma_u;
    p.mu_u = mu_ratio * sigma_u;
    p.sigma_w = sigma_u / 4.0;
    p.sigma_v = sigma_u / 2.5;
    truth.push_back(p);
  }
  return truth;
}

}  // namespace frontier
