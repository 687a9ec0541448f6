#pragma once

#include <string>

#include "frontier/artifacts.hpp"

namespace frontier {

// Batch stages behind the CLI subcommands. Each reads its prerequisites from
// cfg.out_dir, writes versioned artifacts there, and throws UserError with
// the producing subcommand's name when a prerequisite is missing.

void stage_ingest(const PipelineConfig& cfg);
void stage_hedonic(const PipelineConfig& cfg);
void stage_variances(const PipelineConfig& cfg);
void stage_frontier(const PipelineConfig& cfg, const std::string& mode);
void stage_bootstrap(const PipelineConfig& cfg);
void stage_tax(const PipelineConfig& cfg);
void stage_bounds(const PipelineConfig& cfg);
void stage_elasticity(const PipelineConfig& cfg);
void stage_counterfactual(const PipelineConfig& cfg, int band_lo, int band_hi,
                          int target_h);
void stage_simulate(const PipelineConfig& cfg);
void stage_report(const PipelineConfig& cfg);

// Truth parameters for the reference calibration market: mu_u = mu_ratio * sigma_u, sigma_w =
// sigma_u / 4, sigma_v = sigma_u / 2.5.
std::vector<HeightParams> calibrated_truth(int max_height, double sigma_u,
                                           double mu_ratio);

}  // namespace frontier
