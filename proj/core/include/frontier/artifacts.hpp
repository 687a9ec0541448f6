#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frontier/frontier_fit.hpp"
#include "frontier/likelihood.hpp"
#include "frontier/types.hpp"
#include "frontier/variance.hpp"

namespace frontier {

inline constexpr const char* kToolVersion = "0.1.0";

struct PipelineConfig {
  // inputs
  std::string transactions_csv;
  std::string cpi_csv;
  std::string cost_index_csv;
  std::string existing_homes_csv;
  TransactionSchema schema;
  FilterConfig filters;
  int base_year = 2017;

  std::string hedonic_spec = "restricted";  // or "saturated"
  GridConfig grids;
  QuarticConfig quartic;

  std::vector<double> radii = {250, 500, 1000};
  int draws = 10000;
  std::string kappa_T = "estimate";  // or a numeric literal
  bool apartment_level = false;      // tax units: buildings by default

  int bootstrap_replicates = 200;
  double band_level = 0.95;

  // simulate
  std::string sim_kind = "panel";      // or "markets"
  std::string sim_market_config;       // JSON file; empty = built-in default
  std::string sim_shape = "small";     // or "reference"
  double sim_sigma_u = 0.2;
  double sim_mu_ratio = 1.9;
  int sim_markets = 10000;

  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir = "out";
};

PipelineConfig config_from_json(const std::string& json_text);
std::string config_to_json(const PipelineConfig& cfg);

// FNV-1a over the canonical JSON form; embedded in every artifact.
std::string config_hash(const PipelineConfig& cfg);

std::string artifact_stamp(const PipelineConfig& cfg);  // "version=... config=..."

// ---- artifact serialization ---------------------------------------------

std::string frontier_to_json(const FrontierEstimate& est, const PipelineConfig& cfg);
FrontierEstimate frontier_from_json(const std::string& json_text);

void write_variances_csv(const std::string& path, const VarianceEstimates& est,
                         const PipelineConfig& cfg);

void write_transactions_csv(const std::string& path, const std::vector<Transaction>& txs,
                            const PipelineConfig& cfg);
std::vector<Transaction> read_clean_transactions(const std::string& path);

void write_index_csv(const std::string& path, const PriceIndexSeries& s);

// Throws UserError naming the prerequisite subcommand when missing.
void require_artifact(const std::string& path, const std::string& producer_cmd);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace frontier
