#include "frontier/tax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "frontier/dates.hpp"
#include "frontier/error.hpp"
#include "frontier/rng.hpp"
#include "within_ols.hpp"

namespace frontier {

double FrontierLevels::level(int h) const {
  if (h < 1 || h > H) throw UserError("frontier level: height " + std::to_string(h) +
                                      " out of range 1.." + std::to_string(H));
  return G[h - 1];
}

double FrontierLevels::mc_next(int h) const {
  if (h < 1 || h > H) throw UserError("mc_next: height out of range");
  if (curve) {
    double qn;
    if (!q.empty() && h + 1 <= static_cast<int>(q.size())) {
      qn = q[h];
    } else if (q.size() >= 2) {
      qn = q.back() + (q.back() - q[q.size() - 2]);  // extrapolate one step
    } else {
      qn = static_cast<double>(h + 1);
    }
    return curve->mc(qn);
  }
  if (h + 1 <= H) return G[h];
  return G[H - 1];  // top_carried_forward
}

double FrontierLevels::g_next(int h) const {
  if (curve) {
    double qn;
    if (!q.empty() && h + 1 <= static_cast<int>(q.size())) {
      qn = q[h];
    } else if (q.size() >= 2) {
      qn = q.back() + (q.back() - q[q.size() - 2]);
    } else {
      qn = static_cast<double>(h + 1);
    }
    return std::max(curve->ac(qn), curve->mc(qn));
  }
  if (h + 1 <= H) return G[h];
  return G[H - 1];
}

FrontierLevels make_levels(const FrontierEstimate& est, const QuantityTable* qtable) {
  FrontierLevels lv;
  lv.mes = est.mes;
  lv.H = est.H;
  lv.curve = est.curve;
  for (int h = 1; h <= est.H; ++h) lv.G.push_back(std::exp(est.at(h).g));
  if (qtable) {
    for (int h = 1; h <= std::min(est.H, qtable->H); ++h) lv.q.push_back(qtable->at(h));
  } else if (est.curve) {
    for (const auto& fh : est.heights) lv.q.push_back(fh.q);
  }
  if (est.curve && !lv.q.empty()) {
    double m = std::numeric_limits<double>::infinity();
    for (double qv : lv.q) m = std::min(m, est.curve->ac(qv));
    lv.min_ac = m;
  } else {
    lv.min_ac = *std::min_element(lv.G.begin(), lv.G.end());
  }
  if (!est.curve) lv.top_carried_forward = true;
  return lv;
}

double rt_level(double price_level, int h, const FrontierLevels& levels) {
  if (h < 1 || h > levels.H) {
    throw UserError("rt_level: height " + std::to_string(h) + " out of range");
  }
  if (h < levels.mes) return price_level - levels.min_ac;
  return std::max(0.0, price_level - levels.mc_next(h));
}

std::vector<TaxUnit> collect_units(const Panel& panel, bool building_level) {
  std::vector<TaxUnit> units;
  for (const auto& g : panel.groups) {
    for (const auto& bloc : g.blocs) {
      for (const auto& b : bloc.buildings) {
        if (building_level) {
          TaxUnit u;
          u.building_id = b.building_id;
          u.city_id = b.city_id;
          u.height = g.height;
          u.mean_log_price = b.mean_log_price();
          u.n_apartments = b.n_apartments();
          u.is_building = true;
          u.x = b.x;
          u.y = b.y;
          u.time_coord = year_fraction(static_cast<DayNumber>(b.mean_day));
          units.push_back(std::move(u));
        } else {
          for (std::size_t j = 0; j < b.yprices.size(); ++j) {
            TaxUnit u;
            u.building_id = b.building_id + "/" + std::to_string(j);
            u.city_id = b.city_id;
            u.height = g.height;
            u.mean_log_price = b.yprices[j];
            u.n_apartments = 1;
            u.is_building = false;
            u.x = b.x;
            u.y = b.y;
            u.time_coord = year_fraction(static_cast<DayNumber>(b.days[j]));
            units.push_back(std::move(u));
          }
        }
      }
    }
  }
  return units;
}

namespace {

PosteriorU unit_posterior(const TaxUnit& unit, const FrontierEstimate& est) {
  const FrontierHeight& hp = est.at(unit.height);
  if (!(hp.sigma_u > 0)) {
    throw UserError("expected_rt_rate: missing sigma_u at height " +
                    std::to_string(unit.height));
  }
  const double sv2 = hp.sigma_v * hp.sigma_v;
  const double sw2 = hp.sigma_w * hp.sigma_w;
  const double eta2 =
      unit.is_building ? sw2 + sv2 / static_cast<double>(unit.n_apartments) : sw2 + sv2;
  return posterior_u(unit.mean_log_price - hp.g, hp.mu_u, hp.sigma_u, std::sqrt(eta2));
}

}  // namespace

RateResult expected_rt_rate(const TaxUnit& unit, const FrontierLevels& levels,
                            const FrontierEstimate& est, int draws, std::uint64_t seed) {
  if (draws < 1) throw UserError("expected_rt_rate: draws must be >= 1");
  const PosteriorU post = unit_posterior(unit, est);
  const double Gh = levels.level(unit.height);
  auto rng = make_rng(seed, std::hash<std::string>{}(unit.building_id));
  double sum = 0, sum2 = 0;
  for (int d = 0; d < draws; ++d) {
    const double u = post.sample(rng);
    const double price = Gh * std::exp(u);
    const double r = rt_level(price, unit.height, levels) / price;
    sum += r;
    sum2 += r * r;
  }
  RateResult out;
  out.draws = draws;
  out.rate = sum / draws;
  const double var = std::max(0.0, sum2 / draws - out.rate * out.rate);
  out.se = std::sqrt(var / draws);
  return out;
}

PeriodEffects fit_kappa_T(const std::vector<Transaction>& txs) {
  if (txs.size() < 20) throw UserError("fit_kappa_T: not enough transactions");
  int base_year = year_of(txs.front().transaction_date);
  for (const auto& t : txs) {
    base_year = std::min({base_year, year_of(t.transaction_date), t.construction_year});
  }
  base_year -= 1;

  // regressors: t, t^2/100, s^2/100, age, age^2/100 plus the hedonic
  // attribute set; parcel fixed effects absorbed
  std::vector<std::string> names = {"t", "t2", "s2", "age", "age2"};
  std::set<std::string> legal;
  for (const auto& t : txs) legal.insert(t.legal_status);
  const std::string legal_base = *legal.begin();
  std::vector<std::string> legal_levels(std::next(legal.begin()), legal.end());
  const std::size_t idx_attr = names.size();
  names.insert(names.end(),
               {"floor", "ground", "first", "second", "third", "first_above4",
                "second_above4", "third_above4", "floor_above10", "height", "penthouse",
                "penthouse_minus1", "penthouse_x_height"});
  const std::size_t idx_legal = names.size();
  for (const auto& l : legal_levels) names.push_back("legal_" + l);
  const std::size_t k = names.size();

  auto fill_row = [&](std::size_t i, double* x) {
    const Transaction& tx = txs[i];
    std::fill(x, x + k, 0.0);
    const double t = static_cast<double>(year_of(tx.transaction_date) - base_year);
    const double s = static_cast<double>(tx.construction_year - base_year);
    const double age = t - s;
    x[0] = t;
    x[1] = t * t / 100.0;
    x[2] = s * s / 100.0;
    x[3] = age;
    x[4] = age * age / 100.0;
    const int f = tx.floor, h = tx.height;
    double* a = x + idx_attr;
    a[0] = f;
    a[1] = f == 0;
    a[2] = f == 1;
    a[3] = f == 2;
    a[4] = f == 3;
    a[5] = f == 1 && h > 4;
    a[6] = f == 2 && h > 4;
    a[7] = f == 3 && h > 4;
    a[8] = h > 10 ? f : 0;
    a[9] = h;
    a[10] = f == h;
    a[11] = f == h - 1;
    a[12] = (a[10] + a[11]) * h;
    if (tx.legal_status != legal_base) {
      auto it = std::lower_bound(legal_levels.begin(), legal_levels.end(), tx.legal_status);
      if (it != legal_levels.end() && *it == tx.legal_status) {
        x[idx_legal + (it - legal_levels.begin())] = 1.0;
      }
    }
  };

  std::vector<std::size_t> order(txs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return txs[a].parcel_id < txs[b].parcel_id;
  });

  detail::WithinOls fit;
  try {
    fit = detail::within_ols(
        order, k, [&](std::size_t i) { return txs[i].parcel_id; }, fill_row,
        [&](std::size_t i) { return txs[i].log_price; }, names);
  } catch (const UserError& e) {
    throw UserError(std::string("fit_kappa_T: ") + e.what());
  }

  const double b_t = fit.coef(0);
  const double b_t2 = fit.coef(1);
  const double b_s2 = fit.coef(2);
  const double v_t2 = fit.cov(1, 1);
  const double v_s2 = fit.cov(2, 2);
  const double c_ts = fit.cov(1, 2);

  if (!(std::fabs(b_t2) > 1e-10)) {
    throw UserError("fit_kappa_T: period effect is linear (t^2 coefficient ~ 0), "
                    "delta is unidentified");
  }

  PeriodEffects pe;
  pe.base_year = base_year;
  pe.gamma1 = b_t;
  pe.gamma2 = b_t2 / 100.0;
  pe.delta = b_s2 / b_t2;
  // delta method for a ratio
  const double d1 = 1.0 / b_t2;
  const double d2 = -b_s2 / (b_t2 * b_t2);
  pe.delta_se = std::sqrt(std::max(0.0, d1 * d1 * v_s2 + d2 * d2 * v_t2 + 2.0 * d1 * d2 * c_ts));
  pe.kappa_T = pe.delta / (1.0 + pe.delta);
  const double dk = 1.0 / ((1.0 + pe.delta) * (1.0 + pe.delta));
  pe.kappa_T_se = std::fabs(dk) * pe.delta_se;
  pe.alpha1 = fit.coef(3);
  pe.alpha2 = fit.coef(4) / 100.0;
  return pe;
}

TimeDeflator deflator_from_period_effects(const PeriodEffects& pe) {
  TimeDeflator d;
  const int base = pe.base_year;
  d.log_index = [pe, base](double t_years_abs) {
    return pe.log_index(t_years_abs - static_cast<double>(base));
  };
  return d;
}

NeighborSet build_neighbors(const std::vector<TaxUnit>& units, double radius) {
  NeighborSet ns;
  ns.radius = radius;
  ns.neighbors.resize(units.size());
  if (radius <= 0) throw UserError("build_neighbors: radius must be positive");

  std::map<std::pair<long long, long long>, std::vector<std::size_t>> cells;
  auto cell_of = [&](double x, double y) {
    return std::make_pair(static_cast<long long>(std::floor(x / radius)),
                          static_cast<long long>(std::floor(y / radius)));
  };
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!units[i].x || !units[i].y) {
      ++ns.n_missing_coords;
      continue;
    }
    cells[cell_of(*units[i].x, *units[i].y)].push_back(i);
  }
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!units[i].x || !units[i].y) continue;
    const auto c = cell_of(*units[i].x, *units[i].y);
    auto& out = ns.neighbors[i];
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = cells.find({c.first + dx, c.second + dy});
        if (it == cells.end()) continue;
        for (std::size_t j : it->second) {
          if (j == i) continue;
          const double ex = *units[i].x - *units[j].x;
          const double ey = *units[i].y - *units[j].y;
          if (ex * ex + ey * ey <= r2) out.push_back(j);
        }
      }
    }
    std::sort(out.begin(), out.end());
  }
  return ns;
}

RampMinResult min_max_affine_ramps(const std::vector<double>& a,
                                   const std::vector<double>& b) {
  if (a.size() != b.size()) throw InternalError("min_max_affine_ramps: size mismatch");
  if (a.empty()) return {0.0, 0.0};

  // upper envelope of the lines a_j + b_j k, breakpoints in ascending k
  std::vector<std::pair<double, double>> lines;  // (slope, intercept)
  for (std::size_t j = 0; j < a.size(); ++j) lines.emplace_back(b[j], a[j]);
  std::sort(lines.begin(), lines.end());
  // equal slopes: keep the larger intercept
  std::vector<std::pair<double, double>> uniq;
  for (const auto& l : lines) {
    if (!uniq.empty() && uniq.back().first == l.first) {
      uniq.back().second = std::max(uniq.back().second, l.second);
    } else {
      uniq.push_back(l);
    }
  }
  std::vector<std::pair<double, double>> hull;  // envelope lines, slopes ascending
  auto bad = [&](const std::pair<double, double>& l1, const std::pair<double, double>& l2,
                 const std::pair<double, double>& l3) {
    // l2 never on top: at the l1/l3 crossing, l2 lies (weakly) below
    // (m2 - m1)(c1 - c3) <= (c1 - c2)(m3 - m1)
    return (l2.first - l1.first) * (l1.second - l3.second) <=
           (l1.second - l2.second) * (l3.first - l1.first);
  };
  for (const auto& l : uniq) {
    while (hull.size() >= 2 && bad(hull[hull.size() - 2], hull.back(), l)) hull.pop_back();
    hull.push_back(l);
  }

  auto env_at = [&](double kpp) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& l : hull) best = std::max(best, l.second + l.first * kpp);
    return best;
  };

  std::vector<double> candidates = {0.0, 1.0};
  for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
    const double denom = hull[s].first - hull[s + 1].first;
    if (denom == 0) continue;
    const double kpp = (hull[s + 1].second - hull[s].second) / denom;
    if (kpp > 0.0 && kpp < 1.0) candidates.push_back(kpp);
  }
  double best_val = std::numeric_limits<double>::infinity();
  double best_k = 0.0;
  std::sort(candidates.begin(), candidates.end());
  for (double kpp : candidates) {
    const double v = env_at(kpp);
    if (v < best_val) {
      best_val = v;
      best_k = kpp;
    }
  }
  return {std::max(0.0, best_val), best_k};
}

BoundResult rt_lower_bound(std::size_t i, const std::vector<TaxUnit>& units,
                           const NeighborSet& nbrs, const FrontierLevels& levels,
                           const FrontierEstimate& est, double kappa_T,
                           const TimeDeflator& deflator, int draws, std::uint64_t seed) {
  BoundResult out;
  out.draws = draws;
  const auto& omega = nbrs.neighbors.at(i);
  if (omega.empty()) {
    out.empty_neighbors = true;
    return out;
  }
  if (draws < 1) throw UserError("rt_lower_bound: draws must be >= 1");

  const TaxUnit& ui = units[i];
  const PosteriorU post_i = unit_posterior(ui, est);
  const double Gi = levels.level(ui.height);
  const double Gi_next = levels.g_next(ui.height);

  struct NbrCtx {
    PosteriorU post;
    double G = 0, G_j = 0, T = 0;
  };
  std::vector<NbrCtx> ctx;
  ctx.reserve(omega.size());
  for (std::size_t j : omega) {
    NbrCtx c;
    c.post = unit_posterior(units[j], est);
    c.G = levels.level(units[j].height);
    c.G_j = c.G;
    c.T = deflator.factor(ui.time_coord, units[j].time_coord);
    ctx.push_back(c);
  }

  auto rng = make_rng(seed, 0x6B0000u + i);
  double sum = 0, sum2 = 0, ksum = 0, price_sum = 0;
  std::vector<double> av(ctx.size()), bv(ctx.size());
  for (int d = 0; d < draws; ++d) {
    const double Pi = Gi * std::exp(post_i.sample(rng));
    for (std::size_t m = 0; m < ctx.size(); ++m) {
      const double Pj = ctx[m].G * std::exp(ctx[m].post.sample(rng));
      // max{0, G(h_j) - G(h_i+1) - (P_j - P_i) + kT (P_j - T P_j) + kS (T P_j - P_i)}
      av[m] = ctx[m].G_j - Gi_next - (Pj - Pi) + kappa_T * (Pj - ctx[m].T * Pj);
      bv[m] = ctx[m].T * Pj - Pi;
    }
    const RampMinResult r = min_max_affine_ramps(av, bv);
    sum += r.value;
    sum2 += r.value * r.value;
    ksum += r.kappa;
    price_sum += Pi;
  }
  out.bound_level = sum / draws;
  out.kappa_S_mean = ksum / draws;
  const double mean_price = price_sum / draws;
  out.bound_rate = mean_price > 0 ? out.bound_level / mean_price : 0.0;
  const double var = std::max(0.0, sum2 / draws - out.bound_level * out.bound_level);
  out.se = mean_price > 0 ? std::sqrt(var / draws) / mean_price : 0.0;
  return out;
}

}  // namespace frontier
