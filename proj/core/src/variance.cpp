#include "frontier/variance.hpp"

#include <cmath>
#include <numeric>

#include "frontier/error.hpp"

namespace frontier {

DetrendResult time_detrend(const Panel& panel, int max_degree, int folds,
                           std::uint64_t seed) {
  std::vector<double> days, prices;
  for (const auto& g : panel.groups) {
    for (const auto& bloc : g.blocs) {
      for (const auto& b : bloc.buildings) {
        days.insert(days.end(), b.days.begin(), b.days.end());
        prices.insert(prices.end(), b.yprices.begin(), b.yprices.end());
      }
    }
  }
  if (days.empty()) throw UserError("time_detrend: empty panel");
  int cap = max_degree;
  while (cap > 0 && days.size() < static_cast<std::size_t>(cap + 2)) --cap;

  DetrendResult out;
  out.degree = select_degree_kfold(days, prices, cap, folds, seed);
  out.trend = PolyFit(days, prices, out.degree);

  out.residuals.resize(panel.groups.size());
  for (std::size_t gi = 0; gi < panel.groups.size(); ++gi) {
    const auto& g = panel.groups[gi];
    out.residuals[gi].resize(g.blocs.size());
    for (std::size_t ki = 0; ki < g.blocs.size(); ++ki) {
      const auto& bloc = g.blocs[ki];
      out.residuals[gi][ki].resize(bloc.buildings.size());
      for (std::size_t bi = 0; bi < bloc.buildings.size(); ++bi) {
        const auto& b = bloc.buildings[bi];
        auto& res = out.residuals[gi][ki][bi];
        res.resize(b.yprices.size());
        for (std::size_t j = 0; j < b.yprices.size(); ++j) {
          res[j] = b.yprices[j] - out.trend(b.days[j]);
        }
      }
    }
  }
  return out;
}

DetrendResult passthrough_detrend(const Panel& panel) {
  DetrendResult out;
  out.degree = 0;
  out.trend = PolyFit::from_parts(0.0, 1.0, {0.0});
  out.residuals.resize(panel.groups.size());
  for (std::size_t gi = 0; gi < panel.groups.size(); ++gi) {
    const auto& g = panel.groups[gi];
    out.residuals[gi].resize(g.blocs.size());
    for (std::size_t ki = 0; ki < g.blocs.size(); ++ki) {
      const auto& bloc = g.blocs[ki];
      out.residuals[gi][ki].resize(bloc.buildings.size());
      for (std::size_t bi = 0; bi < bloc.buildings.size(); ++bi) {
        out.residuals[gi][ki][bi] = bloc.buildings[bi].yprices;
      }
    }
  }
  return out;
}

const HeightVariances* VarianceEstimates::at(int height) const {
  for (const auto& h : heights) {
    if (h.height == height) return &h;
  }
  return nullptr;
}

VarianceEstimates estimate_variances(const Panel& panel, const DetrendResult& detrend) {
  if (detrend.residuals.size() != panel.groups.size()) {
    throw InternalError("estimate_variances: detrend does not match panel shape");
  }
  VarianceEstimates est;
  est.heights.resize(panel.groups.size());

  for (std::size_t gi = 0; gi < panel.groups.size(); ++gi) {
    const auto& g = panel.groups[gi];
    auto& hv = est.heights[gi];
    hv.height = g.height;
    hv.n_blocs = g.n_blocs();
    const std::size_t K = g.blocs.size();

    // Var(v): within-building dispersion of detrended prices
    double ssv = 0;
    double dofV = 0;
    for (std::size_t ki = 0; ki < K; ++ki) {
      for (std::size_t bi = 0; bi < g.blocs[ki].buildings.size(); ++bi) {
        const auto& r = detrend.residuals[gi][ki][bi];
        const double J = static_cast<double>(r.size());
        const double mean = std::accumulate(r.begin(), r.end(), 0.0) / J;
        for (double v : r) ssv += (v - mean) * (v - mean);
        dofV += J - 1;
      }
    }
    hv.dofV = dofV;
    if (dofV >= 1) {
      hv.varV = ssv / dofV;
    } else {
      hv.flags.push_back("varV_missing");
    }

    // Var(w): within-bloc dispersion of building means, Var(v) correction
    double ssw = 0, dofW = 0, corr_w_term = 0;
    for (std::size_t ki = 0; ki < K; ++ki) {
      const auto& bloc = g.blocs[ki];
      const double nk = static_cast<double>(bloc.buildings.size());
      if (nk < 1) continue;
      std::vector<double> bmeans(bloc.buildings.size());
      for (std::size_t bi = 0; bi < bloc.buildings.size(); ++bi) {
        const auto& r = detrend.residuals[gi][ki][bi];
        bmeans[bi] = std::accumulate(r.begin(), r.end(), 0.0) / r.size();
      }
      const double bmean = std::accumulate(bmeans.begin(), bmeans.end(), 0.0) / nk;
      for (std::size_t bi = 0; bi < bloc.buildings.size(); ++bi) {
        ssw += (bmeans[bi] - bmean) * (bmeans[bi] - bmean);
        corr_w_term += (nk - 1) /
                       (nk * static_cast<double>(bloc.buildings[bi].n_apartments()));
      }
      dofW += nk - 1;
    }
    hv.dofW = dofW;
    if (dofW >= 1 && hv.varV) {
      hv.varW = (ssw - *hv.varV * corr_w_term) / dofW;
      if (*hv.varW < 0) hv.flags.push_back("varW_negative");
    } else {
      hv.flags.push_back("varW_missing");
    }

    // Var(u) moment pieces: between-bloc dispersion of raw bloc means
    if (K >= 2) {
      std::vector<double> bloc_means(K);
      for (std::size_t ki = 0; ki < K; ++ki) {
        const auto& bloc = g.blocs[ki];
        double s = 0;
        for (const auto& b : bloc.buildings) s += b.mean_log_price();
        bloc_means[ki] = s / static_cast<double>(bloc.buildings.size());
      }
      const double ybar =
          std::accumulate(bloc_means.begin(), bloc_means.end(), 0.0) / static_cast<double>(K);
      double ss = 0;
      for (double m : bloc_means) ss += (m - ybar) * (m - ybar);
      hv.between_bloc = ss / static_cast<double>(K - 1);
      double cw = 0, cv = 0;
      for (const auto& bloc : g.blocs) {
        const double nk = static_cast<double>(bloc.buildings.size());
        cw += 1.0 / nk;
        for (const auto& b : bloc.buildings) {
          cv += 1.0 / (nk * nk * static_cast<double>(b.n_apartments()));
        }
      }
      hv.corr_w = cw / static_cast<double>(K);
      hv.corr_v = cv / static_cast<double>(K);
      if (hv.varV && hv.varW) {
        hv.varU_moment = hv.between_bloc - *hv.varW * hv.corr_w - *hv.varV * hv.corr_v;
        if (*hv.varU_moment < 0) hv.flags.push_back("varU_moment_negative");
      } else {
        hv.flags.push_back("varU_moment_missing");
      }
    } else {
      hv.flags.push_back("varU_moment_missing");
    }
  }
  return est;
}

void smooth_variances(VarianceEstimates& est, const SmoothConfig& cfg) {
  auto smooth_series = [&](auto getter, auto setter, const char* flag_name,
                           auto weight_getter) {
    std::vector<double> xs, ys, ws;
    for (const auto& hv : est.heights) {
      const auto v = getter(hv);
      // negative raw estimates are treated as missing, as in the source
      // estimators' own reporting
      if (v && *v >= 0) {
        xs.push_back(hv.height);
        ys.push_back(*v);
        ws.push_back(std::max(1.0, weight_getter(hv)));
      }
    }
    if (xs.empty()) throw UserError("smooth_variances: all-missing series");
    if (xs.size() < 3) {
      // not enough points to cross validate; carry the mean
      const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
      for (auto& hv : est.heights) setter(hv, std::max(mean, cfg.floor_eps));
      return;
    }
    int cap = cfg.max_degree;
    while (cap > 0 && xs.size() < static_cast<std::size_t>(cap + 2)) --cap;
    const int degree = select_degree_loo(xs, ys, cap, ws);
    PolyFit fit(xs, ys, degree, ws);
    for (auto& hv : est.heights) {
      double v = fit(hv.height);
      if (v < cfg.floor_eps) {
        v = cfg.floor_eps;
        hv.flags.push_back(flag_name);
      }
      setter(hv, v);
    }
  };

  smooth_series([](const HeightVariances& h) { return h.varV; },
                [](HeightVariances& h, double v) { h.varV_smooth = v; },
                "varV_smooth_floored",
                [](const HeightVariances& h) { return h.dofV; });
  smooth_series([](const HeightVariances& h) { return h.varW; },
                [](HeightVariances& h, double v) { h.varW_smooth = v; },
                "varW_smooth_floored",
                [](const HeightVariances& h) { return h.dofW; });

  // rebuild the Var(u) moment with the smoothed corrections
  for (auto& hv : est.heights) {
    if (hv.n_blocs >= 2 && hv.varV_smooth && hv.varW_smooth) {
      hv.varU_moment_final =
          hv.between_bloc - *hv.varW_smooth * hv.corr_w - *hv.varV_smooth * hv.corr_v;
      if (*hv.varU_moment_final <= 0) hv.flags.push_back("varU_final_nonpositive");
    }
  }
}

}  // namespace frontier
