#include "frontier/hedonic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "frontier/error.hpp"
#include "frontier/polyfit.hpp"
#include "within_ols.hpp"

#include <nlohmann/json.hpp>

namespace frontier {

namespace {

constexpr int kCalendarDegree = 9;

void cheb_eval(double t, int degree, double* out) {
  out[0] = 1.0;
  if (degree >= 1) out[1] = t;
  for (int k = 2; k <= degree; ++k) out[k] = 2.0 * t * out[k - 1] - out[k - 2];
}

// The restricted premium design of the preliminary-stage regression.
// Order matters: names/coef in HedonicModel follow this layout.
void restricted_design(int f, int h, double* x) {
  x[0] = static_cast<double>(f);               // floor
  x[1] = f == 0 ? 1.0 : 0.0;                   // ground
  x[2] = f == 1 ? 1.0 : 0.0;                   // first
  x[3] = f == 2 ? 1.0 : 0.0;                   // second
  x[4] = f == 3 ? 1.0 : 0.0;                   // third
  x[5] = (f == 1 && h > 4) ? 1.0 : 0.0;        // first x above4
  x[6] = (f == 2 && h > 4) ? 1.0 : 0.0;        // second x above4
  x[7] = (f == 3 && h > 4) ? 1.0 : 0.0;        // third x above4
  x[8] = h > 10 ? static_cast<double>(f) : 0;  // floor x above10
  x[9] = static_cast<double>(h);               // height
  x[10] = f == h ? 1.0 : 0.0;                  // penthouse
  x[11] = f == h - 1 ? 1.0 : 0.0;              // penthouse-1
  x[12] = (x[10] + x[11]) * h;                 // (penthouse + penthouse-1) x height
}

const char* kRestrictedNames[13] = {
    "floor",          "ground",          "first",          "second",
    "third",          "first_above4",    "second_above4",  "third_above4",
    "floor_above10",  "height",          "penthouse",      "penthouse_minus1",
    "penthouse_x_height"};

struct DesignInfo {
  std::vector<std::string> names;                 // all columns
  std::size_t n_premium = 0;                      // leading premium columns
  std::vector<std::pair<int, int>> cells;         // saturated cell per column
  std::string legal_base;
  std::vector<std::string> legal_levels;          // excluding base
  double day_lo = 0, day_hi = 1;
  std::size_t idx_year_before = 0, idx_year_after = 0, idx_calendar = 0, idx_legal = 0;
};

}  // namespace

double HedonicModel::log_premium(int floor, int height) const {
  if (height < 1 || floor < 0 || floor > height) {
    throw UserError("log_premium: cell (" + std::to_string(floor) + "," +
                    std::to_string(height) + ") outside the model's domain");
  }
  if (spec == HedonicSpec::kSaturated) {
    if (floor == 2 && height == 4) return 0.0;
    auto it = cell_table.find({floor, height});
    if (it == cell_table.end()) {
      throw UserError("log_premium: saturated cell (" + std::to_string(floor) + "," +
                      std::to_string(height) + ") was not observed in the fit");
    }
    return it->second;
  }
  double x[13], x_ref[13];
  restricted_design(floor, height, x);
  restricted_design(2, 4, x_ref);
  double v = 0;
  for (int j = 0; j < 13; ++j) v += coef[j] * (x[j] - x_ref[j]);
  return v;
}

double HedonicModel::timing_effect(int transaction_year, int construction_year) const {
  if (transaction_year == construction_year - 1) return coef_year_before;
  if (transaction_year == construction_year + 1) return coef_year_after;
  return 0.0;
}

HedonicModel fit_hedonic(const std::vector<Transaction>& txs, HedonicSpec spec) {
  if (txs.size() < 3) throw UserError("fit_hedonic: not enough transactions");

  DesignInfo info;
  if (spec == HedonicSpec::kRestricted) {
    info.names.assign(std::begin(kRestrictedNames), std::end(kRestrictedNames));
  } else {
    std::set<std::pair<int, int>> cells;
    for (const auto& t : txs) cells.insert({t.floor, t.height});
    cells.erase({2, 4});  // reference cell
    for (const auto& c : cells) {
      info.cells.push_back(c);
      info.names.push_back("m[" + std::to_string(c.first) + "," +
                           std::to_string(c.second) + "]");
    }
  }
  info.n_premium = info.names.size();

  info.idx_year_before = info.names.size();
  info.names.push_back("year_before");
  info.idx_year_after = info.names.size();
  info.names.push_back("year_after");

  info.idx_calendar = info.names.size();
  for (int d = 1; d <= kCalendarDegree; ++d) info.names.push_back("day_T" + std::to_string(d));

  std::set<std::string> legal;
  for (const auto& t : txs) legal.insert(t.legal_status);
  info.legal_base = *legal.begin();
  info.idx_legal = info.names.size();
  for (auto it = std::next(legal.begin()); it != legal.end(); ++it) {
    info.legal_levels.push_back(*it);
    info.names.push_back("legal_" + *it);
  }

  double dlo = txs.front().transaction_date, dhi = dlo;
  for (const auto& t : txs) {
    dlo = std::min(dlo, static_cast<double>(t.transaction_date));
    dhi = std::max(dhi, static_cast<double>(t.transaction_date));
  }
  if (dhi <= dlo) dhi = dlo + 1;
  info.day_lo = dlo;
  info.day_hi = dhi;

  const std::size_t k = info.names.size();
  const std::size_t n = txs.size();

  auto fill_row = [&](const Transaction& t, double* x) {
    std::fill(x, x + k, 0.0);
    if (spec == HedonicSpec::kRestricted) {
      restricted_design(t.floor, t.height, x);
    } else {
      auto it = std::lower_bound(info.cells.begin(), info.cells.end(),
                                 std::make_pair(t.floor, t.height));
      if (it != info.cells.end() && *it == std::make_pair(t.floor, t.height)) {
        x[it - info.cells.begin()] = 1.0;
      }
    }
    const int ty = year_of(t.transaction_date);
    if (ty == t.construction_year - 1) x[info.idx_year_before] = 1.0;
    if (ty == t.construction_year + 1) x[info.idx_year_after] = 1.0;
    double cheb[kCalendarDegree + 1];
    const double u = 2.0 * (t.transaction_date - info.day_lo) / (info.day_hi - info.day_lo) - 1.0;
    cheb_eval(u, kCalendarDegree, cheb);
    for (int d = 1; d <= kCalendarDegree; ++d) x[info.idx_calendar + d - 1] = cheb[d];
    if (t.legal_status != info.legal_base) {
      auto lit = std::lower_bound(info.legal_levels.begin(), info.legal_levels.end(),
                                  t.legal_status);
      if (lit != info.legal_levels.end() && *lit == t.legal_status) {
        x[info.idx_legal + (lit - info.legal_levels.begin())] = 1.0;
      }
    }
  };

  // group rows by parcel for the within transformation
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return txs[a].parcel_id < txs[b].parcel_id;
  });

  // structurally empty columns (e.g. tall-building interactions in a short
  // market) are dropped and reported with a zero coefficient
  std::vector<char> active_col(k, 0);
  {
    std::vector<double> probe(k);
    for (const auto& t : txs) {
      fill_row(t, probe.data());
      for (std::size_t c = 0; c < k; ++c) {
        if (probe[c] != 0.0) active_col[c] = 1;
      }
    }
  }
  std::vector<std::size_t> keep;
  std::vector<std::string> kept_names;
  for (std::size_t c = 0; c < k; ++c) {
    if (active_col[c]) {
      keep.push_back(c);
      kept_names.push_back(info.names[c]);
    }
  }

  detail::WithinOls fit;
  try {
    std::vector<double> fullrow(k);
    fit = detail::within_ols(
        order, keep.size(), [&](std::size_t i) { return txs[i].parcel_id; },
        [&](std::size_t i, double* x) {
          fill_row(txs[i], fullrow.data());
          for (std::size_t c = 0; c < keep.size(); ++c) x[c] = fullrow[keep[c]];
        },
        [&](std::size_t i) { return txs[i].log_price; }, kept_names);
  } catch (const UserError& e) {
    throw UserError(std::string("fit_hedonic: ") + e.what());
  }
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t c = 0; c < keep.size(); ++c) {
    coef(keep[c]) = fit.coef(c);
    for (std::size_t c2 = 0; c2 < keep.size(); ++c2) cov(keep[c], keep[c2]) = fit.cov(c, c2);
  }

  HedonicModel model;
  model.spec = spec;
  for (const auto& t : txs) model.max_height = std::max(model.max_height, t.height);
  model.names.assign(info.names.begin(), info.names.begin() + info.n_premium);
  for (std::size_t j = 0; j < info.n_premium; ++j) {
    model.coef.push_back(coef(j));
    model.se.push_back(std::sqrt(std::max(0.0, cov(j, j))));
  }
  model.coef_year_before = coef(info.idx_year_before);
  model.se_year_before = std::sqrt(std::max(0.0, cov(info.idx_year_before, info.idx_year_before)));
  model.coef_year_after = coef(info.idx_year_after);
  model.se_year_after = std::sqrt(std::max(0.0, cov(info.idx_year_after, info.idx_year_after)));
  model.day_lo = info.day_lo;
  model.day_hi = info.day_hi;
  for (int d = 0; d < kCalendarDegree; ++d) model.day_coef.push_back(coef(info.idx_calendar + d));
  model.legal_base = info.legal_base;
  for (std::size_t l = 0; l < info.legal_levels.size(); ++l) {
    model.legal_coef[info.legal_levels[l]] = coef(info.idx_legal + l);
  }
  if (spec == HedonicSpec::kSaturated) {
    double ref = 0.0;  // cell coefficients are already relative to (2,4)
    for (std::size_t c = 0; c < info.cells.size(); ++c) {
      model.cell_table[info.cells[c]] = coef(c) - ref;
    }
  }
  return model;
}

void adjust_prices(std::vector<Transaction>& txs, const HedonicModel& model) {
  for (auto& t : txs) {
    const double lnm = model.log_premium(t.floor, t.height);
    const double timing =
        model.timing_effect(year_of(t.transaction_date), t.construction_year);
    t.log_price_adj = t.log_price - lnm - timing;
  }
}

double QuantityTable::at(int h) const {
  if (h < 1 || h > H) throw UserError("quantity table: height " + std::to_string(h) +
                                      " outside 1.." + std::to_string(H));
  return q[h - 1];
}

int QuantityTable::height_for(double quantity) const {
  for (int h = 1; h <= H; ++h) {
    if (q[h - 1] >= quantity) return h;
  }
  return H;
}

QuantityTable quantity_table(const HedonicModel& model, int H) {
  QuantityTable table;
  table.H = H;
  table.q.resize(H);
  std::vector<int> bad;
  for (int h = 1; h <= H; ++h) {
    double s = 0;
    for (int f = 1; f <= h; ++f) s += std::exp(model.log_premium(f, h));
    table.q[h - 1] = s;
    if (h > 1 && !(table.q[h - 1] > table.q[h - 2])) bad.push_back(h);
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "quantity table not strictly increasing at heights:";
    for (int h : bad) msg << ' ' << h;
    throw UserError(msg.str());
  }
  return table;
}

std::string hedonic_to_json(const HedonicModel& m) {
  nlohmann::json j;
  j["spec"] = m.spec == HedonicSpec::kRestricted ? "restricted" : "saturated";
  j["max_height"] = m.max_height;
  j["names"] = m.names;
  j["coef"] = m.coef;
  j["se"] = m.se;
  j["year_before"] = {{"coef", m.coef_year_before}, {"se", m.se_year_before}};
  j["year_after"] = {{"coef", m.coef_year_after}, {"se", m.se_year_after}};
  j["calendar"] = {{"day_lo", m.day_lo}, {"day_hi", m.day_hi}, {"coef", m.day_coef}};
  j["legal_base"] = m.legal_base;
  j["legal_coef"] = m.legal_coef;
  if (m.spec == HedonicSpec::kSaturated) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [cell, v] : m.cell_table) {
      cells.push_back({{"f", cell.first}, {"h", cell.second}, {"lnm", v}});
    }
    j["cells"] = cells;
  }
  return j.dump(2);
}

HedonicModel hedonic_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  HedonicModel m;
  m.spec = j.at("spec") == "restricted" ? HedonicSpec::kRestricted : HedonicSpec::kSaturated;
  m.max_height = j.at("max_height");
  m.names = j.at("names").get<std::vector<std::string>>();
  m.coef = j.at("coef").get<std::vector<double>>();
  m.se = j.at("se").get<std::vector<double>>();
  m.coef_year_before = j.at("year_before").at("coef");
  m.se_year_before = j.at("year_before").at("se");
  m.coef_year_after = j.at("year_after").at("coef");
  m.se_year_after = j.at("year_after").at("se");
  m.day_lo = j.at("calendar").at("day_lo");
  m.day_hi = j.at("calendar").at("day_hi");
  m.day_coef = j.at("calendar").at("coef").get<std::vector<double>>();
  m.legal_base = j.at("legal_base");
  m.legal_coef = j.at("legal_coef").get<std::map<std::string, double>>();
  if (j.contains("cells")) {
    for (const auto& c : j.at("cells")) {
      m.cell_table[{c.at("f").get<int>(), c.at("h").get<int>()}] = c.at("lnm").get<double>();
    }
  }
  return m;
}

}  // namespace frontier
