#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "frontier/costcurve.hpp"
#include "frontier/hedonic.hpp"
#include "frontier/likelihood.hpp"
#include "frontier/types.hpp"
#include "frontier/variance.hpp"

namespace frontier {

enum class FitMode { kConstrained, kPerHeight, kQuartic };

struct FrontierHeight {
  int height = 0;
  double q = 0;  // quantity, when a table is attached
  double g = 0;  // frontier log price
  double mu_u = 0, sigma_u = 0, sigma_v = 0, sigma_w = 0;
  bool interpolated = false;  // height had no usable Var(u) moment
};

struct BootstrapBands {
  double level = 0.95;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::vector<int> heights;
  std::vector<double> lower, upper;
};

struct FrontierEstimate {
  FitMode mode = FitMode::kConstrained;
  int mes = 1;
  int H = 0;
  std::vector<FrontierHeight> heights;  // one entry per height 1..H
  std::optional<CostCurve> curve;
  std::optional<BootstrapBands> bands;
  double total_loglik = 0;

  const FrontierHeight& at(int h) const;
  double G(int h) const;  // exp(g)
};

// Profiled likelihood tables for every height with a usable Var(u) moment
// (smoothed measurement error variances, parallel over heights).
std::vector<ProfileTable> compute_profiles(const Panel& panel,
                                           const VarianceEstimates& variances,
                                           const GridConfig& grids = {});

// Global maximizer of sum_h L_h over per-height grids subject to g weakly
// decreasing up to mes and weakly increasing after, for every candidate mes.
// Two monotone-chain dynamic programs over the (height, grid-index) lattice
// meet at mes; exact on the grid, ties broken toward lower g.
FrontierEstimate fit_constrained(const std::vector<ProfileTable>& profiles);
FrontierEstimate fit_constrained(const Panel& panel, const VarianceEstimates& variances,
                                 const GridConfig& grids = {});

// Per-height argmax with no shape constraint.
FrontierEstimate fit_per_height(const std::vector<ProfileTable>& profiles);
FrontierEstimate fit_per_height(const Panel& panel, const VarianceEstimates& variances,
                                const GridConfig& grids = {});

struct QuarticConfig {
  int n_mu = 60;
  int n_starts = 3;
  int max_evals = 1500;
  double penalty0 = 1e3;
  int penalty_escalations = 6;
  int mes_window = 2;  // candidates around the initializer's MES
};

// Quartic-cost maximum likelihood: g(h) = ln max{AC(q(h)), MC(q(h))} with the
// AC/MC chain constraints on the discrete quantity grid. Multi-start
// Nelder-Mead with an escalating exact penalty, initialized from a least
// squares quartic fit to the initializer's levels.
FrontierEstimate fit_quartic(const Panel& panel, const VarianceEstimates& variances,
                             const QuantityTable& qtable, const FrontierEstimate& init,
                             const QuarticConfig& cfg = {});

// Parametric bootstrap: at each height draw v*, w* normal and u* truncated
// normal from the fitted parameters, rebuild y* on the original panel shape,
// rerun the pipeline from variance estimation onward, and take pointwise
// percentile bands of the refitted frontier.
BootstrapBands bootstrap_ci(const FrontierEstimate& estimate, const Panel& panel, int B,
                            double level, std::uint64_t seed,
                            const GridConfig& grids = {});

}  // namespace frontier
