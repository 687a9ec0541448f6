// Command-line pipeline driver: each subcommand reads its prerequisites from
// the output directory and writes versioned artifacts there.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "frontier/artifacts.hpp"
#include "frontier/error.hpp"
#include "frontier/parallel.hpp"
#include "frontier/pipeline.hpp"

using namespace frontier;

int main(int argc, char** argv) {
  CLI::App app{"housing cost frontier and regulatory tax estimation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  PipelineConfig cfg;
  bool seed_set = false, out_set = false, threads_set = false;
  std::uint64_t seed_cli = 1;
  std::string out_cli = "out";
  int threads_cli = 0;

  app.add_option("--config", config_path, "pipeline configuration JSON");
  app.add_option("--seed", seed_cli, "RNG seed (fully determines stochastic outputs)")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_cli, "artifact output directory")
      ->each([&](const std::string&) { out_set = true; });
  app.add_option("--threads", threads_cli, "worker thread cap (0 = hardware)")
      ->each([&](const std::string&) { threads_set = true; });

  auto* c_ingest = app.add_subcommand("ingest", "load, filter and deflate transactions");
  std::string tx_file, cpi_file, cost_file;
  c_ingest->add_option("--transactions", tx_file, "transactions CSV");
  c_ingest->add_option("--cpi", cpi_file, "CPI index CSV (date,index)");
  c_ingest->add_option("--cost-index", cost_file, "construction input price index CSV");

  auto* c_hedonic = app.add_subcommand("hedonic", "fit floor/height premia, adjust prices");
  std::string hedonic_spec;
  c_hedonic->add_option("--hedonic-spec", hedonic_spec, "saturated|restricted");

  app.add_subcommand("variances", "detrend and estimate multilevel variances");

  auto* c_frontier = app.add_subcommand("frontier", "maximum likelihood frontier");
  std::string mode = "constrained";
  c_frontier->add_option("--mode", mode, "constrained|per_height|quartic");

  auto* c_boot = app.add_subcommand("bootstrap", "parametric bootstrap bands");
  int boot_B = -1;
  c_boot->add_option("-B,--replicates", boot_B, "bootstrap replicates");

  auto* c_tax = app.add_subcommand("tax", "expected regulatory tax rates");
  auto* c_bounds = app.add_subcommand("bounds", "spatial lower bounds for the tax");
  int draws = -1;
  std::string kappa_T;
  std::vector<double> radii;
  bool apartments = false;
  for (auto* c : {c_tax, c_bounds}) {
    c->add_option("--draws", draws, "Monte Carlo draws per unit");
    c->add_flag("--apartments", apartments, "apartment-level units instead of buildings");
  }
  c_bounds->add_option("--kappa-T", kappa_T, "'estimate' or a fixed value");
  c_bounds->add_option("--radius", radii, "neighbor radii in meters");
  std::string existing_homes;
  c_bounds->add_option("--existing-homes", existing_homes,
                       "existing-home transactions CSV (for kappa-T estimation)");

  app.add_subcommand("elasticity", "elasticity of substitution and isoquant data");

  auto* c_cf = app.add_subcommand("counterfactual", "consolidation counterfactual");
  int band_lo = 11, band_hi = 24, target_h = 24;
  c_cf->add_option("--band-lo", band_lo, "lowest height consolidated");
  c_cf->add_option("--band-hi", band_hi, "highest height consolidated");
  c_cf->add_option("--target", target_h, "target height");

  auto* c_sim = app.add_subcommand("simulate", "synthetic market / panel generator");
  std::string sim_kind, sim_shape;
  double sim_sigma_u = -1;
  int sim_markets = -1;
  c_sim->add_option("--kind", sim_kind, "panel|markets");
  c_sim->add_option("--shape", sim_shape, "small|reference");
  c_sim->add_option("--sigma-u", sim_sigma_u, "deviation scale for panel truth");
  c_sim->add_option("--markets", sim_markets, "number of simulated markets");
  std::string sim_market_config;
  c_sim->add_option("--market-config", sim_market_config,
                    "market configuration JSON (markets kind)");

  app.add_subcommand("report", "bundle plot-ready figure data");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) cfg = config_from_json(read_text_file(config_path));
    if (seed_set) cfg.seed = seed_cli;
    if (out_set) cfg.out_dir = out_cli;
    if (threads_set) cfg.threads = threads_cli;
    thread_cap() = cfg.threads <= 0 ? 0 : static_cast<unsigned>(cfg.threads);

    if (!tx_file.empty()) cfg.transactions_csv = tx_file;
    if (!cpi_file.empty()) cfg.cpi_csv = cpi_file;
    if (!cost_file.empty()) cfg.cost_index_csv = cost_file;
    if (!hedonic_spec.empty()) cfg.hedonic_spec = hedonic_spec;
    if (boot_B > 0) cfg.bootstrap_replicates = boot_B;
    if (draws > 0) cfg.draws = draws;
    if (!kappa_T.empty()) cfg.kappa_T = kappa_T;
    if (!radii.empty()) cfg.radii = radii;
    if (apartments) cfg.apartment_level = true;
    if (!existing_homes.empty()) cfg.existing_homes_csv = existing_homes;
    if (!sim_kind.empty()) cfg.sim_kind = sim_kind;
    if (!sim_shape.empty()) cfg.sim_shape = sim_shape;
    if (sim_sigma_u > 0) cfg.sim_sigma_u = sim_sigma_u;
    if (sim_markets > 0) cfg.sim_markets = sim_markets;
    if (!sim_market_config.empty()) cfg.sim_market_config = sim_market_config;

    if (c_ingest->parsed()) {
      stage_ingest(cfg);
    } else if (c_hedonic->parsed()) {
      stage_hedonic(cfg);
    } else if (app.get_subcommand("variances")->parsed()) {
      stage_variances(cfg);
    } else if (c_frontier->parsed()) {
      stage_frontier(cfg, mode);
    } else if (c_boot->parsed()) {
      stage_bootstrap(cfg);
    } else if (c_tax->parsed()) {
      stage_tax(cfg);
    } else if (c_bounds->parsed()) {
      stage_bounds(cfg);
    } else if (app.get_subcommand("elasticity")->parsed()) {
      stage_elasticity(cfg);
    } else if (c_cf->parsed()) {
      stage_counterfactual(cfg, band_lo, band_hi, target_h);
    } else if (c_sim->parsed()) {
      stage_simulate(cfg);
    } else if (app.get_subcommand("report")->parsed()) {
      stage_report(cfg);
    }
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
