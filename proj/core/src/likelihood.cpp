#include "frontier/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frontier/error.hpp"
#include "frontier/truncnorm.hpp"

namespace frontier {

HeightStats make_height_stats(const HeightGroup& group, double sigma_v, double sigma_w) {
  if (!(sigma_v > 0) || !(sigma_w > 0)) {
    throw UserError("make_height_stats: measurement error scales must be positive");
  }
  HeightStats st;
  st.height = group.height;
  st.sigma_v = sigma_v;
  st.sigma_w = sigma_w;
  const double v2 = sigma_v * sigma_v;
  const double w2 = sigma_w * sigma_w;
  st.blocs.reserve(group.blocs.size());
  for (const auto& bloc : group.blocs) {
    BlocStats b;
    b.n_buildings = static_cast<double>(bloc.buildings.size());
    for (const auto& bud : bloc.buildings) {
      const double J = static_cast<double>(bud.n_apartments());
      double t1 = 0, t2 = 0;
      for (double y : bud.yprices) {
        t1 += y;
        t2 += y * y;
      }
      const double d = v2 + J * w2;
      const double ss = std::max(0.0, t2 - t1 * t1 / J);  // within-building SS
      b.A += J / d;
      b.W1 += t1 / d;
      // c0 of the quadratic form, written to avoid 1/sigma_v^2 cancellation:
      //   (1/v2) sum_i [w2 T1^2/d - T2] = -sum_i [w2 J SS/(v2 d) + T2/d]
      b.c0 -= w2 * J * ss / (v2 * d) + t2 / d;
      b.lconst -= std::log(d) + (J - 1.0) * std::log(v2);
      st.n_apartments += bud.n_apartments();
    }
    st.blocs.push_back(b);
  }
  return st;
}

double loglik_height(const HeightStats& stats, double g, double mu_u, double sigma_u) {
  if (!(sigma_u > 0)) throw UserError("loglik_height: sigma_u must be positive");
  const double su2 = sigma_u * sigma_u;
  const double mu_over_su2 = mu_u / su2;
  const double prior_terms = -mu_u * mu_u / su2 - std::log(su2) -
                             2.0 * norm_log_cdf(mu_u / sigma_u);
  double total = 0;
  for (std::size_t k = 0; k < stats.blocs.size(); ++k) {
    const BlocStats& b = stats.blocs[k];
    const double sk2 = su2 / (1.0 + su2 * b.A);
    const double mu_k = sk2 * (mu_over_su2 + b.W1 - g * b.A);
    // quadratic form Q_k(g) = c0 + 2 W1 g - A g^2 (exact simplification)
    const double q = b.c0 + 2.0 * b.W1 * g - b.A * g * g;
    const double term = mu_k * mu_k / sk2 + q + std::log(sk2) + b.lconst +
                        2.0 * norm_log_cdf(mu_k / std::sqrt(sk2)) + prior_terms;
    if (!std::isfinite(term)) {
      throw InternalError("loglik_height: non-finite contribution at bloc " +
                          std::to_string(k) + " (height " + std::to_string(stats.height) +
                          ")");
    }
    total += term;
  }
  return total;
}

double loglik_height(const HeightGroup& group, double g, double mu_u, double sigma_u,
                     double sigma_v, double sigma_w) {
  return loglik_height(make_height_stats(group, sigma_v, sigma_w), g, mu_u, sigma_u);
}

std::size_t ProfileTable::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < loglik.size(); ++i) {
    if (loglik[i] > loglik[best]) best = i;
  }
  return best;
}

std::vector<MuSlot> build_mu_slots(const HeightStats& stats,
                                   const std::vector<double>& mu_grid, double varU_moment) {
  std::vector<MuSlot> slots;
  slots.reserve(mu_grid.size());
  const std::size_t K = stats.blocs.size();
  for (double mu : mu_grid) {
    double su;
    try {
      su = solve_sigma_u(mu, varU_moment);
    } catch (const UserError&) {
      continue;  // infeasible (mu_u, varU) pair; skip
    }
    MuSlot slot;
    slot.mu = mu;
    slot.sigma_u = su;
    const double su2 = su * su;
    const double prior_terms = -mu * mu / su2 - std::log(su2) -
                               2.0 * norm_log_cdf(mu / su);
    slot.sk2.resize(K);
    slot.base.resize(K);
    slot.fixed.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      const BlocStats& b = stats.blocs[k];
      slot.sk2[k] = su2 / (1.0 + su2 * b.A);
      slot.base[k] = mu / su2 + b.W1;
      slot.fixed[k] = std::log(slot.sk2[k]) + b.lconst + prior_terms;
    }
    slots.push_back(std::move(slot));
  }
  return slots;
}

namespace {

double slot_loglik(const HeightStats& stats, const MuSlot& slot, double g) {
  double total = 0;
  const std::size_t K = stats.blocs.size();
  for (std::size_t k = 0; k < K; ++k) {
    const BlocStats& b = stats.blocs[k];
    const double mu_k = slot.sk2[k] * (slot.base[k] - g * b.A);
    const double q = b.c0 + 2.0 * b.W1 * g - b.A * g * g;
    total += mu_k * mu_k / slot.sk2[k] + q + slot.fixed[k] +
             2.0 * norm_log_cdf(mu_k / std::sqrt(slot.sk2[k]));
  }
  return total;
}

}  // namespace

double best_profiled_loglik(const HeightStats& stats, const std::vector<MuSlot>& slots,
                            double g, double* mu_out, double* sigma_out) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& slot : slots) {
    const double ll = slot_loglik(stats, slot, g);
    if (std::isfinite(ll) && ll > best) {
      best = ll;
      if (mu_out) *mu_out = slot.mu;
      if (sigma_out) *sigma_out = slot.sigma_u;
    }
  }
  return best;
}

ProfileTable profile_height(const HeightStats& stats, const std::vector<double>& g_grid,
                            const std::vector<double>& mu_grid, double varU_moment) {
  if (g_grid.empty() || mu_grid.empty()) {
    throw UserError("profile_height: empty grid");
  }
  ProfileTable table;
  table.height = stats.height;
  table.sigma_v = stats.sigma_v;
  table.sigma_w = stats.sigma_w;
  table.varU_moment = varU_moment;
  table.g_values = g_grid;
  const double ninf = -std::numeric_limits<double>::infinity();
  table.loglik.assign(g_grid.size(), ninf);
  table.mu_u.assign(g_grid.size(), 0.0);
  table.sigma_u.assign(g_grid.size(), 0.0);

  const auto slots = build_mu_slots(stats, mu_grid, varU_moment);
  for (const auto& slot : slots) {
    for (std::size_t gi = 0; gi < g_grid.size(); ++gi) {
      const double ll = slot_loglik(stats, slot, g_grid[gi]);
      if (std::isfinite(ll) && ll > table.loglik[gi]) {
        table.loglik[gi] = ll;
        table.mu_u[gi] = slot.mu;
        table.sigma_u[gi] = slot.sigma_u;
      }
    }
  }
  return table;
}

std::vector<double> default_g_grid(const HeightGroup& group, const GridConfig& cfg) {
  std::vector<double> means;
  for (const auto& bloc : group.blocs) {
    for (const auto& b : bloc.buildings) means.push_back(b.mean_log_price());
  }
  if (means.empty()) throw UserError("default_g_grid: no buildings at height " +
                                     std::to_string(group.height));
  std::sort(means.begin(), means.end());
  const double lo_mean = means.front();
  const double median = means[means.size() / 2];
  double mean = 0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(means.size());
  double sd = 0;
  for (double m : means) sd += (m - mean) * (m - mean);
  sd = means.size() > 1 ? std::sqrt(sd / static_cast<double>(means.size() - 1)) : 0.1;

  double lo = lo_mean - cfg.g_lo_sds * sd;
  double hi = median;
  if (hi - lo < 1e-3) hi = lo + 1e-3;
  std::vector<double> grid(cfg.n_g);
  for (int i = 0; i < cfg.n_g; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (cfg.n_g - 1);
  }
  return grid;
}

std::vector<double> default_mu_grid(double varU_moment, const GridConfig& cfg) {
  const double hi = cfg.mu_span_mult * std::sqrt(std::max(varU_moment, 1e-12));
  std::vector<double> grid(cfg.n_mu);
  for (int i = 0; i < cfg.n_mu; ++i) {
    grid[i] = hi * static_cast<double>(i) / (cfg.n_mu - 1);
  }
  return grid;
}

}  // namespace frontier
