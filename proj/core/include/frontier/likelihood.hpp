#pragma once

#include <cstddef>
#include <vector>

#include "frontier/types.hpp"

namespace frontier {

// Sufficient statistics for the height-h likelihood at fixed measurement
// error scales. Per building only (J, sum y, sum y^2) enter, so evaluating a
// (g, mu_u, sigma_u) point costs O(#blocs).
struct BlocStats {
  double n_buildings = 0;
  double A = 0;    // sum_i J_i / d_i with d_i = sigma_v^2 + J_i sigma_w^2
  double W1 = 0;   // sum_i T1_i / d_i
  double c0 = 0;   // g-free part of the quadratic form
  double lconst = 0;  // -sum_i (ln d_i + (J_i - 1) ln sigma_v^2)
};

struct HeightStats {
  int height = 0;
  double sigma_v = 0, sigma_w = 0;
  std::size_t n_apartments = 0;
  std::vector<BlocStats> blocs;
};

HeightStats make_height_stats(const HeightGroup& group, double sigma_v, double sigma_w);

// The closed-form log likelihood at height h (twice the bloc log density sum,
// constants dropped), with the per-bloc posterior location/scale
//   sigma_k^2 = sigma_u^2 / (1 + sigma_u^2 A_k)
//   mu_k      = sigma_k^2 (mu_u / sigma_u^2 + W1_k - g A_k)
// Throws InternalError naming the bloc if a non-finite term appears.
double loglik_height(const HeightStats& stats, double g, double mu_u, double sigma_u);

// Convenience wrapper used by tests.
double loglik_height(const HeightGroup& group, double g, double mu_u, double sigma_u,
                     double sigma_v, double sigma_w);

// Profiled likelihood: for every g in g_grid, the best mu_u in mu_grid with
// sigma_u solved from the Var(u) moment at that mu_u.
struct ProfileTable {
  int height = 0;
  double sigma_v = 0, sigma_w = 0;
  double varU_moment = 0;
  std::vector<double> g_values;   // ascending
  std::vector<double> loglik;     // -inf where no feasible (mu_u, sigma_u)
  std::vector<double> mu_u;
  std::vector<double> sigma_u;

  std::size_t argmax() const;  // ties broken toward lower g
};

ProfileTable profile_height(const HeightStats& stats, const std::vector<double>& g_grid,
                            const std::vector<double>& mu_grid, double varU_moment);

// One mu_u candidate with its moment-matched sigma_u and every g-free piece
// of the likelihood cached per bloc. The smooth-MLE stage re-evaluates the
// profile at thousands of g values, so this cache is built once per height.
struct MuSlot {
  double mu = 0, sigma_u = 0;
  std::vector<double> sk2;    // per-bloc sigma_k^2
  std::vector<double> base;   // mu_k = sk2 * (base - g A)
  std::vector<double> fixed;  // ln sk2 + lconst + prior terms
};

std::vector<MuSlot> build_mu_slots(const HeightStats& stats,
                                   const std::vector<double>& mu_grid, double varU_moment);

// max over slots of the likelihood at g; -inf when slots is empty.
double best_profiled_loglik(const HeightStats& stats, const std::vector<MuSlot>& slots,
                            double g, double* mu_out = nullptr, double* sigma_out = nullptr);

struct GridConfig {
  int n_g = 200;
  int n_mu = 60;
  double g_lo_sds = 2.0;     // lower span: min building mean - 2 sd
  double mu_span_mult = 4.0; // mu grid upper bound: 4 sqrt(varU)
};

std::vector<double> default_g_grid(const HeightGroup& group, const GridConfig& cfg);
std::vector<double> default_mu_grid(double varU_moment, const GridConfig& cfg);

}  // namespace frontier
