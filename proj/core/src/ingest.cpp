#include "frontier/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "frontier/csv.hpp"
#include "frontier/error.hpp"

namespace frontier {

double PriceIndexSeries::at(DayNumber d) const {
  if (points.empty()) throw UserError("price index series is empty");
  if (d < points.front().first) {
    throw UserError("date " + format_date(d) + " precedes index coverage (starts " +
                    format_date(points.front().first) + ")");
  }
  // step function: latest published value at or before d
  auto it = std::upper_bound(points.begin(), points.end(), d,
                             [](DayNumber v, const auto& p) { return v < p.first; });
  return std::prev(it)->second;
}

void PriceIndexSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].second <= 0) throw UserError("index values must be positive");
    if (i > 0 && points[i].first <= points[i - 1].first) {
      throw UserError("index dates must be strictly increasing");
    }
  }
}

namespace {

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end && *end == '\0' && std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (!end || *end != '\0') return false;
  out = static_cast<int>(v);
  return true;
}

LoadResult load_from_table(const CsvTable& t, const TransactionSchema& schema,
                           const std::string& name) {
  LoadResult res;
  const std::size_t c_parcel = t.column(schema.parcel_id);
  const std::size_t c_bloc = t.column(schema.bloc_id);
  const std::size_t c_city = t.column(schema.city_id);
  const std::size_t c_price = t.column(schema.price);
  const std::size_t c_area = t.column(schema.area);
  const std::size_t c_floor = t.column(schema.floor);
  const std::size_t c_height = t.column(schema.height);
  const std::size_t c_cyear = t.column(schema.construction_year);
  const std::size_t c_date = t.column(schema.transaction_date);
  const std::size_t c_legal = t.column(schema.legal_status);
  const bool has_building = t.has_column(schema.building_id);
  const bool has_fraction = t.has_column(schema.asset_fraction);
  const bool has_ptype = t.has_column(schema.property_type);
  const bool has_x = t.has_column(schema.x) && t.has_column(schema.y);

  for (std::size_t r = 0; r < t.rows(); ++r) {
    Transaction tx;
    std::string reason;
    tx.parcel_id = t.cell(r, c_parcel);
    tx.building_id = has_building ? t.cell(r, t.column(schema.building_id)) : tx.parcel_id;
    if (tx.building_id.empty()) tx.building_id = tx.parcel_id;
    tx.bloc_id = t.cell(r, c_bloc);
    tx.city_id = t.cell(r, c_city);
    tx.legal_status = t.cell(r, c_legal);
    if (has_ptype) tx.property_type = t.cell(r, t.column(schema.property_type));

    if (tx.parcel_id.empty() || tx.bloc_id.empty()) reason = "missing_key";
    if (reason.empty() && !parse_double(t.cell(r, c_price), tx.price)) reason = "bad_price";
    if (reason.empty() && !parse_double(t.cell(r, c_area), tx.area)) reason = "bad_area";
    if (reason.empty() && !parse_int(t.cell(r, c_floor), tx.floor)) reason = "bad_floor";
    if (reason.empty() && !parse_int(t.cell(r, c_height), tx.height)) reason = "bad_height";
    if (reason.empty() && !parse_int(t.cell(r, c_cyear), tx.construction_year)) {
      reason = "bad_construction_year";
    }
    if (reason.empty()) {
      try {
        tx.transaction_date = parse_date(t.cell(r, c_date));
      } catch (const UserError&) {
        reason = "bad_date";
      }
    }
    if (reason.empty() && has_fraction) {
      if (!parse_double(t.cell(r, t.column(schema.asset_fraction)), tx.asset_fraction)) {
        reason = "bad_asset_fraction";
      }
    }
    if (reason.empty() && has_x) {
      double xv, yv;
      if (parse_double(t.cell(r, t.column(schema.x)), xv) &&
          parse_double(t.cell(r, t.column(schema.y)), yv)) {
        tx.x = xv;
        tx.y = yv;
      }
    }

    // record invariants
    if (reason.empty() && !(tx.price > 0)) reason = "nonpositive_price";
    if (reason.empty() && !(tx.area > 0)) reason = "nonpositive_area";
    if (reason.empty() && tx.floor < 0) reason = "negative_floor";
    if (reason.empty() && tx.height < 1) reason = "height_below_one";
    if (reason.empty() && tx.floor > tx.height) reason = "floor_above_height";

    if (reason.empty()) {
      res.transactions.push_back(std::move(tx));
    } else {
      res.rejects.push_back({r + 1, reason});
    }
  }

  const std::size_t total = t.rows();
  if (total > 0 &&
      static_cast<double>(res.rejects.size()) > schema.reject_threshold * total) {
    throw UserError("'" + name + "': " + std::to_string(res.rejects.size()) + "/" +
                    std::to_string(total) + " rows rejected, above threshold " +
                    format_double(schema.reject_threshold));
  }
  return res;
}

}  // namespace

LoadResult load_transactions(const std::string& path, const TransactionSchema& schema) {
  return load_from_table(CsvTable::read_file(path), schema, path);
}

LoadResult load_transactions_text(const std::string& text, const std::string& name,
                                  const TransactionSchema& schema) {
  std::istringstream in(text);
  return load_from_table(CsvTable::read_stream(in, name), schema, name);
}

std::vector<Transaction> apply_sample_filters(const std::vector<Transaction>& txs,
                                              const FilterConfig& rules,
                                              FilterReport* report) {
  FilterReport rep;
  rep.input = txs.size();

  // nominal-price tail trim
  double lo_cut = -std::numeric_limits<double>::infinity();
  double hi_cut = std::numeric_limits<double>::infinity();
  if ((rules.trim_lower > 0 || rules.trim_upper > 0) && !txs.empty()) {
    std::vector<double> prices;
    prices.reserve(txs.size());
    for (const auto& t : txs) prices.push_back(t.price);
    std::sort(prices.begin(), prices.end());
    const auto n = prices.size();
    const std::size_t lo_i = static_cast<std::size_t>(rules.trim_lower * n);
    const std::size_t hi_i = n - 1 - static_cast<std::size_t>(rules.trim_upper * n);
    if (lo_i <= hi_i) {
      lo_cut = prices[lo_i];
      hi_cut = prices[hi_i];
    }
  }

  std::vector<Transaction> kept;
  kept.reserve(txs.size());
  for (const auto& t : txs) {
    if (t.price < lo_cut || t.price > hi_cut) {
      ++rep.dropped_trim;
      continue;
    }
    if (rules.year_window) {
      const int ty = year_of(t.transaction_date);
      if (ty < t.construction_year - 1 || ty > t.construction_year + 1) {
        ++rep.dropped_year_window;
        continue;
      }
    }
    if (rules.full_asset_only && t.asset_fraction != 1.0) {
      ++rep.dropped_partial_asset;
      continue;
    }
    if (rules.drop_single_family && t.property_type == "single_family") {
      ++rep.dropped_single_family;
      continue;
    }
    if (rules.drop_missing && (t.legal_status.empty() || t.construction_year <= 0)) {
      ++rep.dropped_missing;
      continue;
    }
    kept.push_back(t);
  }

  if (rules.min_two_per_building) {
    std::map<std::string, std::size_t> per_building;
    for (const auto& t : kept) ++per_building[t.building_id];
    std::vector<Transaction> kept2;
    kept2.reserve(kept.size());
    for (auto& t : kept) {
      if (per_building[t.building_id] >= 2) {
        kept2.push_back(std::move(t));
      } else {
        ++rep.dropped_single_transaction;
      }
    }
    kept.swap(kept2);
  }

  rep.output = kept.size();
  if (report) *report = rep;
  return kept;
}

void deflate_prices(std::vector<Transaction>& txs, const PriceIndexSeries& cpi,
                    const PriceIndexSeries& cost, int base_year) {
  cpi.validate();
  cost.validate();
  const DayNumber base = days_from_civil(base_year, 7, 1);
  const double cpi_base = cpi.at(base);
  const double cost_base = cost.at(base);
  for (auto& t : txs) {
    const double adj = (t.price / t.area) * (cpi_base / cpi.at(t.transaction_date)) *
                       (cost_base / cost.at(t.transaction_date));
    t.log_price = std::log(adj);
    t.log_price_adj = t.log_price;
  }
}

PriceIndexSeries load_index_csv(const std::string& path) {
  const CsvTable t = CsvTable::read_file(path);
  const std::size_t c_date = t.column("date");
  const std::size_t c_index = t.column("index");
  PriceIndexSeries s;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    double v;
    if (!parse_double(t.cell(r, c_index), v)) {
      throw UserError("'" + path + "': bad index value on data row " + std::to_string(r + 1));
    }
    s.points.emplace_back(parse_date(t.cell(r, c_date)), v);
  }
  s.validate();
  return s;
}

void write_rejects_csv(const std::string& path, const std::vector<RejectRow>& rejects) {
  CsvTable t({"row", "reason"});
  for (const auto& r : rejects) t.append_row({std::to_string(r.row), r.reason});
  t.write_file(path);
}

double PanelBuilding::mean_log_price() const {
  if (yprices.empty()) return 0;
  return std::accumulate(yprices.begin(), yprices.end(), 0.0) /
         static_cast<double>(yprices.size());
}

std::size_t HeightGroup::n_buildings() const {
  std::size_t n = 0;
  for (const auto& b : blocs) n += b.buildings.size();
  return n;
}

std::size_t HeightGroup::n_apartments() const {
  std::size_t n = 0;
  for (const auto& b : blocs)
    for (const auto& bu : b.buildings) n += bu.n_apartments();
  return n;
}

int Panel::max_height() const {
  int h = 0;
  for (const auto& g : groups) h = std::max(h, g.height);
  return h;
}

const HeightGroup* Panel::group_at(int height) const {
  for (const auto& g : groups) {
    if (g.height == height) return &g;
  }
  return nullptr;
}

std::size_t Panel::n_apartments() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.n_apartments();
  return n;
}

Panel build_panel(const std::vector<Transaction>& txs, PanelBuildReport* report) {
  // Parcels carrying more than one building identify the hedonic height
  // effects but are excluded from the frontier panel.
  std::map<std::string, std::set<std::string>> buildings_on_parcel;
  for (const auto& t : txs) buildings_on_parcel[t.parcel_id].insert(t.building_id);

  struct Key {
    int height;
    std::string bloc;
    std::string building;
    bool operator<(const Key& o) const {
      return std::tie(height, bloc, building) < std::tie(o.height, o.bloc, o.building);
    }
  };
  std::map<Key, PanelBuilding> buildings;
  std::size_t excluded_parcel = 0;
  for (const auto& t : txs) {
    if (buildings_on_parcel[t.parcel_id].size() > 1) {
      ++excluded_parcel;
      continue;
    }
    Key k{t.height, t.bloc_id, t.building_id};
    auto& b = buildings[k];
    if (b.yprices.empty()) {
      b.building_id = t.building_id;
      b.parcel_id = t.parcel_id;
      b.city_id = t.city_id;
      b.x = t.x;
      b.y = t.y;
    }
    b.yprices.push_back(t.log_price_adj);
    b.days.push_back(static_cast<double>(t.transaction_date));
  }

  Panel panel;
  panel.excluded_multi_building_parcel = excluded_parcel;
  std::map<int, std::map<std::string, PanelBloc>> by_height;
  std::size_t undersized = 0;
  for (auto& [key, b] : buildings) {
    if (b.yprices.size() < 2) {
      // the J >= 2 sample rule; normally enforced upstream by the filters
      undersized += b.yprices.size();
      continue;
    }
    b.mean_day = std::accumulate(b.days.begin(), b.days.end(), 0.0) /
                 static_cast<double>(b.days.size());
    auto& bloc = by_height[key.height][key.bloc];
    bloc.bloc_id = key.bloc;
    bloc.buildings.push_back(std::move(b));
  }
  panel.excluded_undersized_building = undersized;
  for (auto& [h, blocs] : by_height) {
    HeightGroup g;
    g.height = h;
    for (auto& [id, bloc] : blocs) g.blocs.push_back(std::move(bloc));
    panel.groups.push_back(std::move(g));
  }

  if (report) {
    report->apartments = panel.n_apartments();
    report->excluded_multi_building_parcel = excluded_parcel;
    report->excluded_undersized_building = undersized;
    for (const auto& g : panel.groups) {
      report->blocs += g.n_blocs();
      report->buildings += g.n_buildings();
    }
  }
  return panel;
}

}  // namespace frontier
