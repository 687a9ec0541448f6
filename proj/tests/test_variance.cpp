#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "frontier/error.hpp"
#include "frontier/rng.hpp"
#include "frontier/synth.hpp"
#include "frontier/truncnorm.hpp"
#include "frontier/variance.hpp"

using namespace frontier;

namespace {

PanelShape small_shape(int H, int blocs, std::uint64_t seed) {
  PanelShape s;
  for (int h = 1; h <= H; ++h) {
    const int buildings = blocs * 2;
    s.push_back(shape_from_counts(h, blocs, buildings, buildings * 4, 0.5,
                                  mix_seed(seed, h)));
  }
  return s;
}

std::vector<HeightParams> flat_truth(int H, double g, double mu_u, double su, double sv,
                                     double sw) {
  std::vector<HeightParams> t;
  for (int h = 1; h <= H; ++h) t.push_back({h, g, mu_u, su, sv, sw});
  return t;
}

}  // namespace

TEST_CASE("constant prices select degree zero with zero residuals") {
  auto gen = generate_panel(flat_truth(2, 9.0, 0.3, 0.1, 0.1, 0.1), small_shape(2, 12, 4), 1);
  for (auto& g : gen.panel.groups) {
    for (auto& k : g.blocs) {
      for (auto& b : k.buildings) std::fill(b.yprices.begin(), b.yprices.end(), 9.0);
    }
  }
  const DetrendResult d = time_detrend(gen.panel);
  CHECK(d.degree == 0);
  for (const auto& g : d.residuals) {
    for (const auto& k : g) {
      for (const auto& b : k) {
        for (double r : b) CHECK(std::fabs(r) < 1e-9);
      }
    }
  }
}

TEST_CASE("cubic day trend is found by cross validation") {
  auto gen = generate_panel(flat_truth(2, 9.0, 0.3, 0.2, 0.1, 0.05), small_shape(2, 60, 5), 2);
  auto rng = make_rng(3, 0);
  std::normal_distribution<double> noise(0.0, 0.05);
  const double d0 = days_from_civil(2008, 1, 1);
  for (auto& g : gen.panel.groups) {
    for (auto& k : g.blocs) {
      for (auto& b : k.buildings) {
        for (std::size_t j = 0; j < b.yprices.size(); ++j) {
          const double t = (b.days[j] - d0) / 3650.0;
          b.yprices[j] = 9.0 + 0.8 * t - 1.1 * t * t + 0.9 * t * t * t + noise(rng);
        }
      }
    }
  }
  const DetrendResult d = time_detrend(gen.panel);
  CHECK(d.degree >= 3);
  double ss = 0;
  std::size_t n = 0;
  for (const auto& g : d.residuals) {
    for (const auto& k : g) {
      for (const auto& b : k) {
        for (double r : b) {
          ss += r * r;
          ++n;
        }
      }
    }
  }
  CHECK(ss / n == doctest::Approx(0.05 * 0.05).epsilon(0.05));
}

TEST_CASE("detrend residuals are invariant to observation order") {
  auto gen = generate_panel(flat_truth(1, 9.0, 0.3, 0.2, 0.1, 0.05), small_shape(1, 30, 7), 5);
  const DetrendResult d1 = time_detrend(gen.panel);
  Panel shuffled = gen.panel;
  auto rng = make_rng(9, 0);
  for (auto& g : shuffled.groups) std::shuffle(g.blocs.begin(), g.blocs.end(), rng);
  const DetrendResult d2 = time_detrend(shuffled);

  auto residual_sums = [](const Panel& p, const DetrendResult& d) {
    std::map<std::string, double> out;
    for (std::size_t gi = 0; gi < p.groups.size(); ++gi) {
      for (std::size_t ki = 0; ki < p.groups[gi].blocs.size(); ++ki) {
        const auto& bloc = p.groups[gi].blocs[ki];
        for (std::size_t bi = 0; bi < bloc.buildings.size(); ++bi) {
          double s = 0;
          for (double r : d.residuals[gi][ki][bi]) s += r;
          out[bloc.buildings[bi].building_id] = s;
        }
      }
    }
    return out;
  };
  const auto s1 = residual_sums(gen.panel, d1);
  const auto s2 = residual_sums(shuffled, d2);
  for (const auto& [id, s] : s1) {
    CHECK(s2.at(id) == doctest::Approx(s).epsilon(1e-9));
  }
}

TEST_CASE("noise-free panel gives zero variance estimates") {
  auto gen = generate_panel(flat_truth(1, 9.0, 0.4, 0.1, 0.1, 0.1), small_shape(1, 20, 3), 4);
  for (auto& g : gen.panel.groups) {
    for (auto& k : g.blocs) {
      for (auto& b : k.buildings) std::fill(b.yprices.begin(), b.yprices.end(), 9.4);
    }
  }
  const VarianceEstimates est = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  REQUIRE(est.heights.size() == 1);
  CHECK(*est.heights[0].varV == doctest::Approx(0.0));
  CHECK(*est.heights[0].varW == doctest::Approx(0.0));
  CHECK(*est.heights[0].varU_moment == doctest::Approx(0.0));
}

TEST_CASE("variance components recovered within 5% at 1000 blocs") {
  const double sv = 0.10, sw = 0.05, su = 0.35;
  auto gen = generate_panel(flat_truth(1, 9.0, 0.5, su, sv, sw),
                            {shape_from_counts(1, 1000, 2500, 12000, 0.4, 11)}, 21);
  const VarianceEstimates est = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  const auto& hv = est.heights[0];
  CHECK(*hv.varV == doctest::Approx(sv * sv).epsilon(0.05));
  CHECK(*hv.varW == doctest::Approx(sw * sw).epsilon(0.10));
  CHECK(*hv.varU_moment == doctest::Approx(tn_variance(0.5, su)).epsilon(0.05));
}

TEST_CASE("standard-deviation ratios echo the calibration when generated at them") {
  const double su = 0.35, sw = su / 4.0, sv = su / 2.5;
  auto gen = generate_panel(flat_truth(1, 9.0, 1.9 * su, su, sv, sw),
                            {shape_from_counts(1, 1500, 3600, 18000, 0.4, 13)}, 31);
  const VarianceEstimates est = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  const auto& hv = est.heights[0];
  const double sd_u = std::sqrt(*hv.varU_moment);
  const double true_sd_u = std::sqrt(tn_variance(1.9 * su, su));
  CHECK(sd_u / std::sqrt(*hv.varW) == doctest::Approx(true_sd_u / sw).epsilon(0.08));
  CHECK(sd_u / std::sqrt(*hv.varV) == doctest::Approx(true_sd_u / sv).epsilon(0.08));
}

TEST_CASE("estimators are unbiased over 500 replications") {
  const double sv = 0.12, sw = 0.07, su = 0.3, mu = 0.45;
  const auto shape = PanelShape{shape_from_counts(1, 60, 150, 700, 0.5, 3)};
  const int R = 500;
  std::vector<double> vs(R), ws(R), us(R);
  for (int r = 0; r < R; ++r) {
    auto gen = generate_panel(flat_truth(1, 9.0, mu, su, sv, sw), shape, 1000 + r);
    const VarianceEstimates est =
        estimate_variances(gen.panel, passthrough_detrend(gen.panel));
    vs[r] = *est.heights[0].varV;
    ws[r] = *est.heights[0].varW;
    us[r] = *est.heights[0].varU_moment;
  }
  auto mean_se = [&](const std::vector<double>& x) {
    double m = 0;
    for (double v : x) m += v;
    m /= x.size();
    double s2 = 0;
    for (double v : x) s2 += (v - m) * (v - m);
    return std::pair<double, double>{m, std::sqrt(s2 / (x.size() - 1) / x.size())};
  };
  const auto [mv, sev] = mean_se(vs);
  const auto [mw, sew] = mean_se(ws);
  const auto [mu_m, seu] = mean_se(us);
  CHECK(std::fabs(mv - sv * sv) <= 2.0 * sev);
  CHECK(std::fabs(mw - sw * sw) <= 2.0 * sew);
  CHECK(std::fabs(mu_m - tn_variance(mu, su)) <= 2.0 * seu);
}

TEST_CASE("varV ignores bloc-level constants") {
  auto gen = generate_panel(flat_truth(1, 9.0, 0.4, 0.2, 0.1, 0.06), small_shape(1, 25, 8), 6);
  const VarianceEstimates base = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  Panel shifted = gen.panel;
  double c = 0.11;
  for (auto& g : shifted.groups) {
    for (auto& k : g.blocs) {
      for (auto& b : k.buildings) {
        for (auto& y : b.yprices) y += c;
      }
      c += 0.37;
    }
  }
  const VarianceEstimates est = estimate_variances(shifted, passthrough_detrend(shifted));
  CHECK(*est.heights[0].varV == doctest::Approx(*base.heights[0].varV).epsilon(1e-9));
}

TEST_CASE("decomposition identity on a u-free balanced panel") {
  const double sv = 0.1, sw = 0.06;
  auto gen = generate_panel(flat_truth(1, 9.0, 1e-7, 1e-7, sv, sw),
                            {shape_from_counts(1, 400, 1200, 6000, 0.0, 9)}, 41);
  const VarianceEstimates est = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  double mean = 0;
  std::size_t n = 0;
  for (const auto& g : gen.panel.groups) {
    for (const auto& k : g.blocs) {
      for (const auto& b : k.buildings) {
        for (double y : b.yprices) {
          mean += y;
          ++n;
        }
      }
    }
  }
  mean /= n;
  double ss = 0;
  for (const auto& g : gen.panel.groups) {
    for (const auto& k : g.blocs) {
      for (const auto& b : k.buildings) {
        for (double y : b.yprices) ss += (y - mean) * (y - mean);
      }
    }
  }
  const double total = ss / (n - 1);
  CHECK(total == doctest::Approx(*est.heights[0].varV + *est.heights[0].varW).epsilon(0.05));
}

TEST_CASE("insufficient degrees of freedom mark estimates absent, not zero") {
  PanelShape shape = {ShapeHeight{1, {ShapeBloc{{4}}}}};
  auto gen = generate_panel(flat_truth(1, 9.0, 0.4, 0.2, 0.1, 0.05), shape, 2);
  const VarianceEstimates est = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  const auto& hv = est.heights[0];
  CHECK(hv.varV.has_value());
  CHECK_FALSE(hv.varW.has_value());
  CHECK_FALSE(hv.varU_moment.has_value());
  CHECK(std::find(hv.flags.begin(), hv.flags.end(), "varW_missing") != hv.flags.end());
}

TEST_CASE("flat variance series smooths to its mean with a low degree") {
  const double sv = 0.1, sw = 0.05;
  auto gen = generate_panel(flat_truth(6, 9.0, 0.4, 0.25, sv, sw), small_shape(6, 150, 15), 8);
  VarianceEstimates est = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  smooth_variances(est);
  for (const auto& hv : est.heights) {
    CHECK(*hv.varV_smooth == doctest::Approx(sv * sv).epsilon(0.10));
    CHECK(*hv.varW_smooth == doctest::Approx(sw * sw).epsilon(0.25));
    CHECK(hv.varU_moment_final.has_value());
  }
}

TEST_CASE("missing varW at sparse heights is imputed by the smoother") {
  auto truth = flat_truth(5, 9.0, 0.4, 0.25, 0.1, 0.05);
  PanelShape shape = small_shape(4, 80, 19);
  shape.push_back(ShapeHeight{5, {ShapeBloc{{5}}}});
  auto gen = generate_panel(truth, shape, 12);
  VarianceEstimates est = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  CHECK_FALSE(est.heights[4].varW.has_value());
  smooth_variances(est);
  CHECK(est.heights[4].varW_smooth.has_value());
  CHECK(*est.heights[4].varW_smooth > 0);
}

TEST_CASE("quadratic variance profile recovered across heights") {
  const int H = 10;
  std::vector<HeightParams> truth;
  auto sv_at = [](int h) { return 0.08 + 0.002 * (h - 5) * (h - 5); };
  for (int h = 1; h <= H; ++h) truth.push_back({h, 9.0, 0.4, 0.25, sv_at(h), 0.05});
  PanelShape shape;
  for (int h = 1; h <= H; ++h) {
    shape.push_back(shape_from_counts(h, 220, 550, 3200, 0.4, mix_seed(77, h)));
  }
  auto gen = generate_panel(truth, shape, 99);
  VarianceEstimates est = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  smooth_variances(est);
  for (const auto& hv : est.heights) {
    const double truth_v = sv_at(hv.height) * sv_at(hv.height);
    const double mc_se = truth_v * std::sqrt(2.0 / hv.dofV);
    CHECK(std::fabs(*hv.varV_smooth - truth_v) < 3.0 * mc_se + 2e-4);
  }
}

TEST_CASE("all-missing series is an error") {
  PanelShape shape = {ShapeHeight{1, {ShapeBloc{{4}}}}};
  auto gen = generate_panel(flat_truth(1, 9.0, 0.4, 0.2, 0.1, 0.05), shape, 2);
  VarianceEstimates est = estimate_variances(gen.panel, passthrough_detrend(gen.panel));
  CHECK_THROWS_AS(smooth_variances(est), UserError);
}
