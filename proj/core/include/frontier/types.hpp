#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frontier/dates.hpp"

namespace frontier {

// One apartment sale. Prices are nominal at load time; deflate_prices fills
// the per-m2 log price fields.
struct Transaction {
  std::string parcel_id;
  std::string building_id;  // defaults to parcel_id when the column is absent
  std::string bloc_id;
  std::string city_id;
  double price = 0;  // nominal currency, whole apartment
  double area = 0;   // m2
  int floor = 0;     // 0 = ground
  int height = 0;    // floors in the building
  int construction_year = 0;
  DayNumber transaction_date = 0;
  std::string legal_status;
  double asset_fraction = 1.0;     // share of the asset transacted
  std::string property_type;       // "single_family" rows are filtered out
  std::optional<double> x, y;      // planar meters

  // Filled by deflate_prices: ln(real, input-cost adjusted price per m2).
  double log_price = 0;
  // Filled by adjust_prices: log_price net of floor/height premia and
  // transaction-timing dummies.
  double log_price_adj = 0;
};

struct RejectRow {
  std::size_t row = 0;  // 1-based data row in the source file
  std::string reason;
};

struct LoadResult {
  std::vector<Transaction> transactions;
  std::vector<RejectRow> rejects;
};

// Column mapping: logical field -> header name in the input file.
struct TransactionSchema {
  std::string parcel_id = "parcel_id";
  std::string building_id = "building_id";  // optional column
  std::string bloc_id = "bloc_id";
  std::string city_id = "city_id";
  std::string price = "price";
  std::string area = "area";
  std::string floor = "floor";
  std::string height = "height";
  std::string construction_year = "construction_year";
  std::string transaction_date = "transaction_date";
  std::string legal_status = "legal_status";
  std::string asset_fraction = "asset_fraction";  // optional column
  std::string property_type = "property_type";    // optional column
  std::string x = "x";  // optional column
  std::string y = "y";  // optional column
  double reject_threshold = 0.01;  // abort when rejects exceed this share
};

struct PriceIndexSeries {
  // (date, value) with strictly increasing dates and positive values.
  std::vector<std::pair<DayNumber, double>> points;

  // Monthly step interpolation: value of the latest point <= d.
  double at(DayNumber d) const;
  void validate() const;
};

struct FilterConfig {
  bool year_window = true;        // rule 1: sale within +-1 year of construction
  bool full_asset_only = true;    // rule 2: asset_fraction == 1
  bool drop_single_family = true; // rule 3
  bool drop_missing = true;       // rule 4
  bool min_two_per_building = true;  // rule 5
  double trim_lower = 0.01;       // nominal price trim quantiles
  double trim_upper = 0.01;
};

struct FilterReport {
  std::size_t input = 0;
  std::size_t dropped_trim = 0;
  std::size_t dropped_year_window = 0;
  std::size_t dropped_partial_asset = 0;
  std::size_t dropped_single_family = 0;
  std::size_t dropped_missing = 0;
  std::size_t dropped_single_transaction = 0;
  std::size_t output = 0;
};

// Bloc -> building -> apartment hierarchy at one height.
struct PanelBuilding {
  std::string building_id;
  std::string parcel_id;
  std::string city_id;
  double mean_day = 0;          // mean transaction day number
  std::optional<double> x, y;
  std::vector<double> yprices;  // adjusted log prices y_kij
  std::vector<double> days;     // transaction day per apartment

  std::size_t n_apartments() const { return yprices.size(); }
  double mean_log_price() const;
};

struct PanelBloc {
  std::string bloc_id;
  std::vector<PanelBuilding> buildings;
};

struct HeightGroup {
  int height = 0;
  std::vector<PanelBloc> blocs;

  std::size_t n_blocs() const { return blocs.size(); }
  std::size_t n_buildings() const;
  std::size_t n_apartments() const;
};

struct Panel {
  std::vector<HeightGroup> groups;  // sorted by height, only populated heights
  std::size_t excluded_multi_building_parcel = 0;
  std::size_t excluded_undersized_building = 0;

  int max_height() const;
  const HeightGroup* group_at(int height) const;
  std::size_t n_apartments() const;
};

struct PanelBuildReport {
  std::size_t apartments = 0;
  std::size_t buildings = 0;
  std::size_t blocs = 0;  // bloc-height cells
  std::size_t excluded_multi_building_parcel = 0;
  std::size_t excluded_undersized_building = 0;
};

Panel build_panel(const std::vector<Transaction>& txs, PanelBuildReport* report = nullptr);

// Per-height frontier and deviation/noise distribution parameters.
struct HeightParams {
  int height = 0;
  double g = 0;        // frontier log price, g(h) = ln G(h)
  double mu_u = 0;     // truncated-normal location
  double sigma_u = 0;  // truncated-normal scale
  double sigma_v = 0;  // apartment-level error s.d.
  double sigma_w = 0;  // building-level error s.d.
};

}  // namespace frontier
