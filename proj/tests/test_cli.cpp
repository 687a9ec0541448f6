#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "frontier/artifacts.hpp"
#include "frontier/csv.hpp"
#include "frontier/error.hpp"
#include "frontier/pipeline.hpp"

using namespace frontier;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig small_sim_config(const std::string& out) {
  PipelineConfig cfg;
  cfg.out_dir = out;
  cfg.seed = 4242;
  cfg.sim_kind = "panel";
  cfg.sim_shape = "small";
  cfg.sim_sigma_u = 0.2;
  cfg.grids.n_g = 80;
  cfg.grids.n_mu = 24;
  cfg.draws = 400;
  cfg.bootstrap_replicates = 8;
  cfg.quartic.n_mu = 16;
  cfg.quartic.max_evals = 300;
  cfg.quartic.n_starts = 1;
  cfg.quartic.mes_window = 1;
  cfg.kappa_T = "0.0016";
  return cfg;
}

void run_full_pipeline(PipelineConfig cfg) {
  stage_simulate(cfg);
  cfg.transactions_csv = cfg.out_dir + "/transactions.csv";
  cfg.cpi_csv = cfg.out_dir + "/cpi.csv";
  cfg.cost_index_csv = cfg.out_dir + "/cost_index.csv";
  stage_ingest(cfg);
  stage_hedonic(cfg);
  stage_variances(cfg);
  stage_frontier(cfg, "constrained");
  stage_frontier(cfg, "per_height");
  stage_frontier(cfg, "quartic");
  stage_bootstrap(cfg);
  stage_tax(cfg);
  stage_bounds(cfg);
  stage_elasticity(cfg);
  stage_counterfactual(cfg, 3, 6, 6);
  stage_report(cfg);
}

}  // namespace

TEST_CASE("simulate then full pipeline: end-to-end smoke run") {
  const std::string out = (fs::temp_directory_path() / "frontier_e2e").string();
  fs::remove_all(out);
  run_full_pipeline(small_sim_config(out));

  for (const char* f :
       {"transactions.csv", "truth.json", "rejects.csv", "filter_report.json",
        "transactions_clean.csv", "hedonic_model.json", "transactions_adjusted.csv",
        "quantities.csv", "variances.csv", "detrend.json", "frontier_constrained.json",
        "frontier_per_height.json", "frontier_quartic.json", "frontier_table.csv",
        "frontier_bands.csv", "tax.csv", "elasticity.csv", "isoquant.csv",
        "counterfactual.json", "report/prices_by_height.csv",
        "report/tax_by_height.csv", "report/tax_over_time.csv"}) {
    INFO("artifact ", std::string(f));
    CHECK(fs::exists(fs::path(out) / f));
  }

  // the tax table carries bound columns after the bounds stage
  const CsvTable tax = CsvTable::read_file(out + "/tax.csv");
  CHECK(tax.has_column("bound_250"));
  CHECK(tax.rows() > 100);
  double mean_rate = 0;
  for (std::size_t r = 0; r < tax.rows(); ++r) {
    const double rate = std::stod(tax.cell(r, tax.column("rate")));
    CHECK(rate >= 0.0);
    CHECK(rate < 1.0);
    mean_rate += rate;
  }
  mean_rate /= tax.rows();
  CHECK(mean_rate > 0.05);  // calibrated panels are well above the frontier
}

TEST_CASE("rerunning with the same seed produces byte-identical artifacts") {
  const std::string out1 = (fs::temp_directory_path() / "frontier_det1").string();
  const std::string out2 = (fs::temp_directory_path() / "frontier_det2").string();
  fs::remove_all(out1);
  fs::remove_all(out2);
  auto cfg1 = small_sim_config(out1);
  auto cfg2 = small_sim_config(out2);
  cfg2.out_dir = out2;
  run_full_pipeline(cfg1);
  run_full_pipeline(cfg2);
  for (const char* f : {"transactions.csv", "variances.csv", "frontier_constrained.json",
                        "frontier_table.csv", "tax.csv"}) {
    INFO("artifact ", std::string(f));
    CHECK(slurp(fs::path(out1) / f) == slurp(fs::path(out2) / f));
  }
  // a different seed must change the data
  const std::string out3 = (fs::temp_directory_path() / "frontier_det3").string();
  fs::remove_all(out3);
  auto cfg3 = small_sim_config(out3);
  cfg3.seed = 777;
  stage_simulate(cfg3);
  CHECK(slurp(fs::path(out1) / "transactions.csv") !=
        slurp(fs::path(out3) / "transactions.csv"));
}

TEST_CASE("missing upstream artifacts name the prerequisite subcommand") {
  const std::string out = (fs::temp_directory_path() / "frontier_missing").string();
  fs::remove_all(out);
  PipelineConfig cfg = small_sim_config(out);
  try {
    stage_variances(cfg);
    FAIL("expected a missing-artifact error");
  } catch (const UserError& e) {
    CHECK(std::string(e.what()).find("hedonic") != std::string::npos);
  }
  try {
    stage_frontier(cfg, "quartic");
    FAIL("expected a missing-artifact error");
  } catch (const UserError& e) {
    // quartic needs the adjusted transactions first, then the constrained fit
    CHECK(std::string(e.what()).find("frontier") != std::string::npos);
  }
}

TEST_CASE("frontier table carries the expected columns") {
  const std::string out = (fs::temp_directory_path() / "frontier_layout").string();
  fs::remove_all(out);
  PipelineConfig cfg = small_sim_config(out);
  stage_simulate(cfg);
  cfg.transactions_csv = out + "/transactions.csv";
  cfg.cpi_csv = out + "/cpi.csv";
  cfg.cost_index_csv = out + "/cost_index.csv";
  stage_ingest(cfg);
  stage_hedonic(cfg);
  stage_variances(cfg);
  stage_frontier(cfg, "constrained");
  const CsvTable t = CsvTable::read_file(out + "/frontier_table.csv");
  const std::vector<std::string> expected = {"height", "quantity",      "mle",
                                             "mle_by_height", "minimum", "mean"};
  CHECK(t.header() == expected);
  CHECK(t.rows() >= 6);
  // levels are prices, minimum below mean
  for (std::size_t r = 0; r < t.rows(); ++r) {
    CHECK(std::stod(t.cell(r, 4)) <= std::stod(t.cell(r, 5)));
  }
}

TEST_CASE("config hash is embedded and stable") {
  PipelineConfig cfg = small_sim_config("x");
  const std::string h1 = config_hash(cfg);
  CHECK(config_hash(cfg) == h1);
  cfg.seed += 1;
  CHECK(config_hash(cfg) != h1);
  const PipelineConfig back = config_from_json(config_to_json(cfg));
  CHECK(config_hash(back) == config_hash(cfg));
}

#ifdef FRONTIER_CLI_PATH
TEST_CASE("the binary parses arguments and reports exit codes") {
  const std::string out = (fs::temp_directory_path() / "frontier_bin").string();
  fs::remove_all(out);
  const std::string bin = FRONTIER_CLI_PATH;
  CHECK(std::system((bin + " simulate --kind markets --markets 200 --out " + out +
                     " --seed 3 > /dev/null")
                        .c_str()) == 0);
  CHECK(fs::exists(fs::path(out) / "market_outcomes.csv"));
  // user error: missing prerequisite artifact -> exit code 1
  const int rc = std::system((bin + " variances --out " + out + " 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(rc) == 1);
}
#endif
