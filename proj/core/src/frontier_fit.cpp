#include "frontier/frontier_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "frontier/error.hpp"
#include "frontier/neldermead.hpp"
#include "frontier/parallel.hpp"
#include "frontier/rng.hpp"
#include "frontier/truncnorm.hpp"

namespace frontier {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

const FrontierHeight& FrontierEstimate::at(int h) const {
  for (const auto& fh : heights) {
    if (fh.height == h) return fh;
  }
  throw UserError("frontier estimate has no height " + std::to_string(h));
}

double FrontierEstimate::G(int h) const { return std::exp(at(h).g); }

std::vector<ProfileTable> compute_profiles(const Panel& panel,
                                           const VarianceEstimates& variances,
                                           const GridConfig& grids) {
  std::vector<std::size_t> active;
  for (std::size_t gi = 0; gi < panel.groups.size(); ++gi) {
    const auto* hv = variances.at(panel.groups[gi].height);
    if (hv && hv->varU_moment_final && *hv->varU_moment_final > 0 && hv->varV_smooth &&
        hv->varW_smooth) {
      active.push_back(gi);
    }
  }
  if (active.empty()) {
    throw UserError("compute_profiles: no height has a positive Var(u) moment");
  }
  std::vector<ProfileTable> profiles(active.size());
  parallel_for(active.size(), [&](std::size_t i) {
    const auto& group = panel.groups[active[i]];
    const auto* hv = variances.at(group.height);
    const double sv = std::sqrt(*hv->varV_smooth);
    const double sw = std::sqrt(*hv->varW_smooth);
    const auto stats = make_height_stats(group, sv, sw);
    const auto g_grid = default_g_grid(group, grids);
    const auto mu_grid = default_mu_grid(*hv->varU_moment_final, grids);
    profiles[i] = profile_height(stats, g_grid, mu_grid, *hv->varU_moment_final);
  });
  return profiles;
}

namespace {

struct SuffixMax {
  std::vector<double> value;
  std::vector<std::size_t> arg;

  // suffix maxima preferring the lowest index (lowest g) on ties
  void build(const std::vector<double>& v) {
    const std::size_t n = v.size();
    value.assign(n + 1, kNegInf);
    arg.assign(n + 1, n);
    for (std::size_t j = n; j-- > 0;) {
      if (v[j] >= value[j + 1]) {
        value[j] = v[j];
        arg[j] = j;
      } else {
        value[j] = value[j + 1];
        arg[j] = arg[j + 1];
      }
    }
  }
};

// index of the first grid value >= x (grids are ascending)
std::size_t first_at_least(const std::vector<double>& grid, double x) {
  return static_cast<std::size_t>(
      std::lower_bound(grid.begin(), grid.end(), x) - grid.begin());
}

struct ChainDP {
  // down[t][j]: best sum over heights 0..t with a weakly decreasing chain
  // ending at grid point j of height t; up[t][j] symmetric for the increasing
  // side. pred_* store the chosen neighbor grid index for reconstruction.
  std::vector<std::vector<double>> down, up;
  std::vector<std::vector<std::size_t>> pred_down, pred_up;

  void run(const std::vector<ProfileTable>& p) {
    const std::size_t T = p.size();
    down.resize(T);
    up.resize(T);
    pred_down.resize(T);
    pred_up.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
      down[t] = p[t].loglik;
      up[t] = p[t].loglik;
      pred_down[t].assign(p[t].g_values.size(), 0);
      pred_up[t].assign(p[t].g_values.size(), 0);
    }
    SuffixMax sm;
    for (std::size_t t = 1; t < T; ++t) {
      sm.build(down[t - 1]);
      for (std::size_t j = 0; j < down[t].size(); ++j) {
        const std::size_t j0 = first_at_least(p[t - 1].g_values, p[t].g_values[j]);
        if (j0 >= down[t - 1].size() || sm.value[j0] == kNegInf ||
            p[t].loglik[j] == kNegInf) {
          down[t][j] = kNegInf;
        } else {
          down[t][j] = p[t].loglik[j] + sm.value[j0];
          pred_down[t][j] = sm.arg[j0];
        }
      }
    }
    for (std::size_t t = T - 1; t-- > 0;) {
      sm.build(up[t + 1]);
      for (std::size_t j = 0; j < up[t].size(); ++j) {
        const std::size_t j0 = first_at_least(p[t + 1].g_values, p[t].g_values[j]);
        if (j0 >= up[t + 1].size() || sm.value[j0] == kNegInf ||
            p[t].loglik[j] == kNegInf) {
          up[t][j] = kNegInf;
        } else {
          up[t][j] = p[t].loglik[j] + sm.value[j0];
          pred_up[t][j] = sm.arg[j0];
        }
      }
    }
  }
};

FrontierEstimate finalize_from_profiles(const std::vector<ProfileTable>& profiles,
                                        const std::vector<std::size_t>& choice,
                                        FitMode mode, int mes, double total) {
  FrontierEstimate est;
  est.mode = mode;
  est.mes = mes;
  est.total_loglik = total;
  est.H = profiles.back().height;

  std::vector<FrontierHeight> fitted;
  for (std::size_t t = 0; t < profiles.size(); ++t) {
    const auto& p = profiles[t];
    FrontierHeight fh;
    fh.height = p.height;
    fh.g = p.g_values[choice[t]];
    fh.mu_u = p.mu_u[choice[t]];
    fh.sigma_u = p.sigma_u[choice[t]];
    fh.sigma_v = p.sigma_v;
    fh.sigma_w = p.sigma_w;
    fitted.push_back(fh);
  }

  // heights absent from the profile set were excluded from the likelihood sum;
  // reports carry a linear interpolation of g, flagged, with the nearest
  // height's distribution parameters
  for (int h = 1; h <= est.H; ++h) {
    auto it = std::find_if(fitted.begin(), fitted.end(),
                           [&](const FrontierHeight& f) { return f.height == h; });
    if (it != fitted.end()) {
      est.heights.push_back(*it);
      continue;
    }
    const FrontierHeight* lo = nullptr;
    const FrontierHeight* hi = nullptr;
    for (const auto& f : fitted) {
      if (f.height < h) lo = &f;
      if (f.height > h && !hi) hi = &f;
    }
    FrontierHeight fh;
    fh.height = h;
    fh.interpolated = true;
    if (lo && hi) {
      const double w = static_cast<double>(h - lo->height) /
                       static_cast<double>(hi->height - lo->height);
      fh.g = lo->g + w * (hi->g - lo->g);
    } else {
      fh.g = lo ? lo->g : hi->g;
    }
    const FrontierHeight* near =
        (!hi || (lo && h - lo->height <= hi->height - h)) ? lo : hi;
    fh.mu_u = near->mu_u;
    fh.sigma_u = near->sigma_u;
    fh.sigma_v = near->sigma_v;
    fh.sigma_w = near->sigma_w;
    est.heights.push_back(fh);
  }
  return est;
}

void check_profiles(const std::vector<ProfileTable>& profiles) {
  if (profiles.empty()) throw UserError("fit: no profiled heights");
  for (const auto& p : profiles) {
    if (p.g_values.empty()) throw UserError("fit: empty grid at height " +
                                            std::to_string(p.height));
    if (std::all_of(p.loglik.begin(), p.loglik.end(),
                    [](double v) { return v == kNegInf; })) {
      throw UserError("fit: all grid points infeasible at height " +
                      std::to_string(p.height));
    }
  }
  for (std::size_t t = 1; t < profiles.size(); ++t) {
    if (profiles[t].height <= profiles[t - 1].height) {
      throw InternalError("fit: profiles must be sorted by height");
    }
  }
}

}  // namespace

FrontierEstimate fit_constrained(const std::vector<ProfileTable>& profiles) {
  check_profiles(profiles);
  const std::size_t T = profiles.size();
  ChainDP dp;
  dp.run(profiles);

  // MES ranges over 1..H-1; restrict candidate meeting heights accordingly.
  const int H = profiles.back().height;
  double best = kNegInf;
  double best_g = 0;
  std::size_t best_t = 0, best_j = 0;
  for (std::size_t t = 0; t < T; ++t) {
    if (profiles[t].height >= H && T > 1) continue;
    for (std::size_t j = 0; j < profiles[t].g_values.size(); ++j) {
      if (dp.down[t][j] == kNegInf || dp.up[t][j] == kNegInf) continue;
      const double total = dp.down[t][j] + dp.up[t][j] - profiles[t].loglik[j];
      const double g = profiles[t].g_values[j];
      if (total > best || (total == best && g < best_g)) {
        best = total;
        best_g = g;
        best_t = t;
        best_j = j;
      }
    }
  }
  if (best == kNegInf) {
    throw UserError("fit_constrained: no feasible monotone chain across heights");
  }

  std::vector<std::size_t> choice(T);
  choice[best_t] = best_j;
  for (std::size_t t = best_t; t-- > 0;) {
    choice[t] = dp.pred_down[t + 1][choice[t + 1]];
  }
  for (std::size_t t = best_t + 1; t < T; ++t) {
    choice[t] = dp.pred_up[t - 1][choice[t - 1]];
  }
  return finalize_from_profiles(profiles, choice, FitMode::kConstrained,
                                profiles[best_t].height, best);
}

FrontierEstimate fit_constrained(const Panel& panel, const VarianceEstimates& variances,
                                 const GridConfig& grids) {
  return fit_constrained(compute_profiles(panel, variances, grids));
}

FrontierEstimate fit_per_height(const std::vector<ProfileTable>& profiles) {
  check_profiles(profiles);
  std::vector<std::size_t> choice(profiles.size());
  double total = 0;
  double min_g = std::numeric_limits<double>::infinity();
  int mes = profiles.front().height;
  for (std::size_t t = 0; t < profiles.size(); ++t) {
    choice[t] = profiles[t].argmax();
    total += profiles[t].loglik[choice[t]];
    const double g = profiles[t].g_values[choice[t]];
    if (g < min_g) {
      min_g = g;
      mes = profiles[t].height;
    }
  }
  return finalize_from_profiles(profiles, choice, FitMode::kPerHeight, mes, total);
}

FrontierEstimate fit_per_height(const Panel& panel, const VarianceEstimates& variances,
                                const GridConfig& grids) {
  return fit_per_height(compute_profiles(panel, variances, grids));
}

FrontierEstimate fit_quartic(const Panel& panel, const VarianceEstimates& variances,
                             const QuantityTable& qtable, const FrontierEstimate& init,
                             const QuarticConfig& cfg) {
  const int H = std::min(init.H, qtable.H);
  if (H < 3) throw UserError("fit_quartic: needs at least 3 heights");

  // per-height machinery reused across every objective evaluation
  struct ActiveHeight {
    int height;
    double q;
    HeightStats stats;
    std::vector<MuSlot> slots;
  };
  std::vector<ActiveHeight> act;
  GridConfig gc;
  gc.n_mu = cfg.n_mu;
  for (const auto& group : panel.groups) {
    if (group.height > H) continue;
    const auto* hv = variances.at(group.height);
    if (!hv || !hv->varU_moment_final || !(*hv->varU_moment_final > 0) ||
        !hv->varV_smooth || !hv->varW_smooth) {
      continue;
    }
    ActiveHeight ah{group.height, qtable.at(group.height),
                    make_height_stats(group, std::sqrt(*hv->varV_smooth),
                                      std::sqrt(*hv->varW_smooth)),
                    {}};
    ah.slots = build_mu_slots(ah.stats, default_mu_grid(*hv->varU_moment_final, gc),
                              *hv->varU_moment_final);
    act.push_back(std::move(ah));
  }
  if (act.size() < 5) throw UserError("fit_quartic: fewer than 5 usable heights");

  std::vector<double> q_grid(H);
  for (int h = 1; h <= H; ++h) q_grid[h - 1] = qtable.at(h);

  // initializer: least-squares quartic through the total-cost levels implied
  // by the initial frontier estimate
  std::vector<double> c_level(H);
  for (int h = 1; h <= H; ++h) {
    const double Gh = std::exp(init.at(h).g);
    if (h <= init.mes) {
      c_level[h - 1] = Gh * qtable.at(h);
    } else {
      c_level[h - 1] = c_level[h - 2] + Gh * (qtable.at(h) - qtable.at(h - 1));
    }
  }
  Eigen::MatrixXd V(H, 5);
  Eigen::VectorXd cvec(H);
  const double qs = q_grid.back();
  for (int h = 0; h < H; ++h) {
    double p = 1.0;
    for (int j = 0; j < 5; ++j) {
      V(h, j) = p;
      p *= q_grid[h] / qs;
    }
    cvec(h) = c_level[h];
  }
  Eigen::VectorXd theta0 = V.colPivHouseholderQr().solve(cvec);

  auto to_curve = [&](const std::vector<double>& th) {
    CostCurve c;
    double p = 1.0;
    for (int j = 0; j < 5; ++j) {
      c.beta[j] = th[j] / p;
      p *= qs;
    }
    return c;
  };

  const double loglik_scale = [&] {
    double apartments = 0;
    for (const auto& a : act) apartments += static_cast<double>(a.stats.n_apartments);
    return std::max(1.0, apartments);
  }();

  auto objective = [&](const std::vector<double>& th, int mes, double weight) {
    const CostCurve curve = to_curve(th);
    const double viol = curve.shape_violation(q_grid, mes);
    double ll = 0;
    for (const auto& a : act) {
      const double level = std::max(curve.ac(a.q), curve.mc(a.q));
      if (!(level > 0)) return 1e15 * (1.0 + viol);
      const double l = best_profiled_loglik(a.stats, a.slots, std::log(level));
      if (!std::isfinite(l)) return 1e15 * (1.0 + viol);
      ll += l;
    }
    return -ll + weight * loglik_scale * viol;
  };

  std::vector<int> mes_candidates;
  for (int m = std::max(1, init.mes - cfg.mes_window);
       m <= std::min(H - 1, init.mes + cfg.mes_window); ++m) {
    mes_candidates.push_back(m);
  }

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_theta;
  int best_mes = -1;
  auto rng = make_rng(20240811u, 7);
  std::uniform_real_distribution<double> jitter(-0.15, 0.15);

  for (int mes : mes_candidates) {
    for (int start = 0; start < cfg.n_starts; ++start) {
      std::vector<double> th(theta0.data(), theta0.data() + 5);
      if (start > 0) {
        for (auto& v : th) v *= 1.0 + jitter(rng);
      }
      double weight = cfg.penalty0;
      SimplexResult res{th, std::numeric_limits<double>::infinity(), 0};
      for (int esc = 0; esc < cfg.penalty_escalations; ++esc) {
        auto f = [&](const std::vector<double>& x) { return objective(x, mes, weight); };
        const double step = 0.05 * std::max({std::fabs(th[0]), std::fabs(th[1]), 1.0});
        res = nelder_mead(f, th, step, cfg.max_evals);
        th = res.x;
        if (to_curve(th).shape_violation(q_grid, mes) < 1e-9 * theta0.cwiseAbs().maxCoeff()) {
          break;
        }
        weight *= 10.0;
      }
      const CostCurve curve = to_curve(th);
      if (curve.shape_violation(q_grid, mes) > 1e-6 * theta0.cwiseAbs().maxCoeff()) {
        continue;  // this start never reached feasibility
      }
      const double val = objective(th, mes, 0.0);
      if (val < best_val) {
        best_val = val;
        best_theta = th;
        best_mes = mes;
      }
    }
  }
  if (best_mes < 0) {
    throw UserError("fit_quartic: no feasible cost curve found across starts");
  }

  const CostCurve curve = to_curve(best_theta);
  FrontierEstimate est;
  est.mode = FitMode::kQuartic;
  est.mes = best_mes;
  est.H = H;
  est.curve = curve;
  est.total_loglik = -best_val;
  for (int h = 1; h <= H; ++h) {
    FrontierHeight fh;
    fh.height = h;
    fh.q = qtable.at(h);
    fh.g = std::log(std::max(curve.ac(fh.q), curve.mc(fh.q)));
    auto it = std::find_if(act.begin(), act.end(),
                           [&](const ActiveHeight& a) { return a.height == h; });
    if (it != act.end()) {
      best_profiled_loglik(it->stats, it->slots, fh.g, &fh.mu_u, &fh.sigma_u);
      fh.sigma_v = it->stats.sigma_v;
      fh.sigma_w = it->stats.sigma_w;
    } else {
      fh.interpolated = true;
      const auto& near = *std::min_element(
          act.begin(), act.end(), [&](const ActiveHeight& a, const ActiveHeight& b) {
            return std::abs(a.height - h) < std::abs(b.height - h);
          });
      best_profiled_loglik(near.stats, near.slots, fh.g, &fh.mu_u, &fh.sigma_u);
      fh.sigma_v = near.stats.sigma_v;
      fh.sigma_w = near.stats.sigma_w;
    }
    est.heights.push_back(fh);
  }
  return est;
}

BootstrapBands bootstrap_ci(const FrontierEstimate& estimate, const Panel& panel, int B,
                            double level, std::uint64_t seed, const GridConfig& grids) {
  if (B < 1) throw UserError("bootstrap_ci: need at least one replicate");
  if (!(level > 0 && level < 1)) throw UserError("bootstrap_ci: level outside (0,1)");

  std::vector<int> band_heights;
  for (const auto& fh : estimate.heights) {
    if (!fh.interpolated) band_heights.push_back(fh.height);
  }

  // replicate h-indexed g values; NaN when a replicate drops the height
  std::vector<std::vector<double>> draws(B);
  parallel_for(static_cast<std::size_t>(B), [&](std::size_t b) {
    auto rng = make_rng(seed, 1000 + b);
    Panel rep = panel;
    for (auto& group : rep.groups) {
      const auto& fh = estimate.at(group.height);
      std::normal_distribution<double> nv(0.0, fh.sigma_v), nw(0.0, fh.sigma_w);
      for (auto& bloc : group.blocs) {
        const double u = tn_sample(fh.mu_u, fh.sigma_u, rng);
        for (auto& bud : bloc.buildings) {
          const double w = nw(rng);
          for (auto& y : bud.yprices) y = fh.g + u + w + nv(rng);
        }
      }
    }
    // bootstrap draws carry no time structure: refit from variance
    // estimation onward
    const auto detrend = passthrough_detrend(rep);
    auto variances = estimate_variances(rep, detrend);
    smooth_variances(variances);
    const auto fit = fit_constrained(rep, variances, grids);
    auto& out = draws[b];
    out.assign(band_heights.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < band_heights.size(); ++i) {
      if (band_heights[i] <= fit.H) out[i] = fit.at(band_heights[i]).g;
    }
  });

  BootstrapBands bands;
  bands.level = level;
  bands.replicates = B;
  bands.seed = seed;
  bands.heights = band_heights;
  bands.lower.resize(band_heights.size());
  bands.upper.resize(band_heights.size());
  const double alpha = (1.0 - level) / 2.0;
  for (std::size_t i = 0; i < band_heights.size(); ++i) {
    std::vector<double> v;
    v.reserve(B);
    for (int b = 0; b < B; ++b) {
      if (std::isfinite(draws[b][i])) v.push_back(draws[b][i]);
    }
    if (v.empty()) {
      bands.lower[i] = bands.upper[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    std::sort(v.begin(), v.end());
    auto quantile = [&](double p) {
      const double pos = p * static_cast<double>(v.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(lo);
      return lo + 1 < v.size() ? v[lo] * (1 - frac) + v[lo + 1] * frac : v[lo];
    };
    bands.lower[i] = quantile(alpha);
    bands.upper[i] = quantile(1.0 - alpha);
  }
  return bands;
}

}  // namespace frontier
