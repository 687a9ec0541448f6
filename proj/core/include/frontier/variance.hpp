#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frontier/polyfit.hpp"
#include "frontier/types.hpp"

namespace frontier {

// Residuals of the polynomial-series regression of adjusted log price on
// transaction day. Mirrors the panel's (height, bloc, building, apartment)
// nesting.
struct DetrendResult {
  std::vector<std::vector<std::vector<std::vector<double>>>> residuals;
  PolyFit trend;  // gamma_hat(t); also the fallback deflator basis for T_ij
  int degree = 0;
};

// Degree chosen by K-fold cross validation (fixed seed for determinism).
DetrendResult time_detrend(const Panel& panel, int max_degree = 12, int folds = 10,
                           std::uint64_t seed = 1);

// Identity detrend (residuals = y - mean). Used by the parametric bootstrap,
// whose replicates carry no time structure by construction.
DetrendResult passthrough_detrend(const Panel& panel);

struct HeightVariances {
  int height = 0;
  std::optional<double> varV;          // within-building dispersion of y0
  std::optional<double> varW;          // within-bloc dispersion of building means
  std::optional<double> varU_moment;   // between-bloc moment, raw-variance corrections
  std::optional<double> varV_smooth;
  std::optional<double> varW_smooth;
  // between-bloc moment with smoothed corrections; what the likelihood uses
  std::optional<double> varU_moment_final;
  double dofV = 0;  // sum_k sum_i (J_ki - 1)
  double dofW = 0;  // sum_k (n_k - 1)
  std::size_t n_blocs = 0;
  // raw pieces of the Var(u) moment so smoothing can rebuild it
  double between_bloc = 0;   // (1/(K-1)) sum_k (ybar_k - ybar)^2
  double corr_w = 0;         // (1/K) sum_k 1/n_k
  double corr_v = 0;         // (1/K) sum_k sum_i 1/(n_k^2 J_ki)
  std::vector<std::string> flags;

  bool has(const std::optional<double>& v) const { return v.has_value(); }
};

struct VarianceEstimates {
  std::vector<HeightVariances> heights;  // aligned with panel.groups

  const HeightVariances* at(int height) const;
};

// The three multilevel estimators, computed verbatim per height:
//   Var(v) from within-building dispersion of detrended prices,
//   Var(w) from within-bloc dispersion of building means with the Var(v)
//     correction, and
//   the Var(u) moment from between-bloc dispersion of raw (time-unadjusted)
//     bloc means with both corrections.
// Estimates whose degrees of freedom vanish (or that come out negative where
// impossible) are marked absent and flagged, never silently zeroed.
VarianceEstimates estimate_variances(const Panel& panel, const DetrendResult& detrend);

struct SmoothConfig {
  int max_degree = 6;
  double floor_eps = 1e-6;
};

// Weighted polynomial fit of each measurement-error variance series across
// heights (weights = level degrees of freedom, degree by leave-one-out CV).
// Negative fitted values are floored at eps and flagged. The Var(u) moment is
// not smoothed across heights; it is recomputed with the smoothed corrections.
void smooth_variances(VarianceEstimates& est, const SmoothConfig& cfg = {});

}  // namespace frontier
