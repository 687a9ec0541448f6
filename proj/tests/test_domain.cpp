#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "frontier/error.hpp"
#include "frontier/ingest.hpp"
#include "frontier/synth.hpp"

using namespace frontier;

namespace {

const TransactionSchema kSchema;

std::string header() {
  return "parcel_id,building_id,bloc_id,city_id,price,area,floor,height,"
         "construction_year,transaction_date,legal_status,asset_fraction,property_type,x,y\n";
}

std::string row(const std::string& parcel, const std::string& building, double price,
                int floor, int height, int cyear = 2010,
                const std::string& date = "2010-05-02", double area = 100,
                const std::string& bloc = "k1") {
  return parcel + "," + building + "," + bloc + ",c1," + std::to_string(price) + "," +
         std::to_string(area) + "," + std::to_string(floor) + "," + std::to_string(height) +
         "," + std::to_string(cyear) + "," + date + ",L1,1.0,apartment,100,200\n";
}

PriceIndexSeries flat_index(double v = 100.0) {
  PriceIndexSeries s;
  for (int y = 2000; y <= 2020; ++y) {
    for (int m = 1; m <= 12; ++m) s.points.emplace_back(days_from_civil(y, m, 1), v);
  }
  return s;
}

}  // namespace

TEST_CASE("well-formed file loads with no rejects") {
  const std::string text = header() + row("p1", "b1", 1e6, 1, 4) +
                           row("p2", "b2", 2e6, 2, 4) + row("p3", "b3", 3e6, 3, 4);
  const LoadResult res = load_transactions_text(text, "t.csv", kSchema);
  CHECK(res.transactions.size() == 3);
  CHECK(res.rejects.empty());
}

TEST_CASE("floor above height lands in the rejects report with a reason code") {
  TransactionSchema schema;
  schema.reject_threshold = 0.5;
  const std::string text = header() + row("p1", "b1", 1e6, 5, 4) + row("p2", "b2", 1e6, 1, 4);
  const LoadResult res = load_transactions_text(text, "t.csv", schema);
  CHECK(res.transactions.size() == 1);
  REQUIRE(res.rejects.size() == 1);
  CHECK(res.rejects[0].row == 1);
  CHECK(res.rejects[0].reason == "floor_above_height");
}

TEST_CASE("reject share above the threshold aborts") {
  TransactionSchema schema;
  schema.reject_threshold = 0.01;
  std::string text = header();
  for (int i = 0; i < 10; ++i) text += row("p", "b", -5.0, 1, 4);
  CHECK_THROWS_AS(load_transactions_text(text, "t.csv", schema), UserError);
}

TEST_CASE("missing required column is a user error") {
  const std::string text = "parcel_id,price\np1,100\n";
  CHECK_THROWS_AS(load_transactions_text(text, "t.csv", kSchema), UserError);
}

TEST_CASE("sample filters drop by rule with counts") {
  std::string text = header();
  text += row("p1", "b1", 1e6, 1, 4, 2010, "2013-06-01");  // 3 years after construction
  text += row("p2", "b2", 1e6, 1, 4);                      // lone transaction in building
  text += row("p3", "b3", 1e6, 1, 4);
  text += row("p3", "b3", 1.1e6, 2, 4);
  const LoadResult res = load_transactions_text(text, "t.csv", kSchema);
  FilterConfig rules;
  rules.trim_lower = 0;
  rules.trim_upper = 0;
  FilterReport rep;
  const auto kept = apply_sample_filters(res.transactions, rules, &rep);
  CHECK(rep.dropped_year_window == 1);
  CHECK(rep.dropped_single_transaction == 1);
  CHECK(kept.size() == 2);
}

TEST_CASE("all rules passing leaves the sample unchanged") {
  std::string text = header();
  text += row("p1", "b1", 1e6, 1, 4);
  text += row("p1", "b1", 1.2e6, 2, 4);
  const LoadResult res = load_transactions_text(text, "t.csv", kSchema);
  FilterConfig rules;
  rules.trim_lower = 0;
  rules.trim_upper = 0;
  const auto kept = apply_sample_filters(res.transactions, rules, nullptr);
  CHECK(kept.size() == 2);
}

TEST_CASE("price tails are trimmed on the nominal distribution") {
  std::string text = header();
  for (int i = 0; i < 200; ++i) text += row("p" + std::to_string(i), "b", 1e6 + i, 1, 4);
  const LoadResult res = load_transactions_text(text, "t.csv", kSchema);
  FilterConfig rules;
  rules.year_window = false;
  rules.min_two_per_building = false;
  FilterReport rep;
  const auto kept = apply_sample_filters(res.transactions, rules, &rep);
  CHECK(rep.dropped_trim == 4);  // two from each tail
  for (const auto& t : kept) {
    CHECK(t.price >= 1e6 + 2);
    CHECK(t.price <= 1e6 + 197);
  }
}

TEST_CASE("partial-asset and single-family rules") {
  std::string text = header();
  text += row("p1", "b1", 1e6, 1, 4);
  text += "p1,b1,k1,c1,1000000,100,2,4,2010,2010-06-01,L1,0.5,apartment,100,200\n";
  text += "p1,b1,k1,c1,1000000,100,3,4,2010,2010-06-01,L1,1.0,single_family,100,200\n";
  const LoadResult res = load_transactions_text(text, "t.csv", kSchema);
  FilterConfig rules;
  rules.trim_lower = 0;
  rules.trim_upper = 0;
  rules.min_two_per_building = false;
  FilterReport rep;
  const auto kept = apply_sample_filters(res.transactions, rules, &rep);
  CHECK(rep.dropped_partial_asset == 1);
  CHECK(rep.dropped_single_family == 1);
  CHECK(kept.size() == 1);
}

TEST_CASE("constant indices deflate to ln(price/area) up to base normalization") {
  std::string text = header() + row("p1", "b1", 1.5e6, 1, 4);
  auto txs = load_transactions_text(text, "t.csv", kSchema).transactions;
  deflate_prices(txs, flat_index(), flat_index(), 2017);
  CHECK(txs[0].log_price == doctest::Approx(std::log(1.5e6 / 100.0)).epsilon(1e-12));
}

TEST_CASE("deflation homogeneity: scaling prices shifts log prices by ln c") {
  std::string text = header() + row("p1", "b1", 1e6, 1, 4) + row("p2", "b2", 2.7e6, 1, 9);
  auto txs = load_transactions_text(text, "t.csv", kSchema).transactions;
  auto scaled = txs;
  for (auto& t : scaled) t.price *= 3.0;
  deflate_prices(txs, flat_index(), flat_index(), 2017);
  deflate_prices(scaled, flat_index(), flat_index(), 2017);
  for (std::size_t i = 0; i < txs.size(); ++i) {
    CHECK(scaled[i].log_price - txs[i].log_price == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }
}

TEST_CASE("doubling the cost index halves the adjusted price level there") {
  std::string text = header() + row("p1", "b1", 1e6, 1, 4, 2010, "2010-05-02");
  auto base_txs = load_transactions_text(text, "t.csv", kSchema).transactions;
  auto txs = base_txs;
  PriceIndexSeries cost = flat_index();
  deflate_prices(base_txs, flat_index(), cost, 2017);
  for (auto& [d, v] : cost.points) {
    if (d <= days_from_civil(2010, 12, 31)) v *= 2.0;
  }
  deflate_prices(txs, flat_index(), cost, 2017);
  CHECK(txs[0].log_price - base_txs[0].log_price ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("synthetic inflation path round-trips the real price") {
  // nominal prices built from known indices; deflation must recover the real
  // level exactly
  PriceIndexSeries cpi, cost;
  for (int y = 2000; y <= 2020; ++y) {
    for (int m = 1; m <= 12; ++m) {
      const double t = (y - 2017) + (m - 1) / 12.0;
      cpi.points.emplace_back(days_from_civil(y, m, 1), 100.0 * std::pow(1.03, t));
      cost.points.emplace_back(days_from_civil(y, m, 1), 100.0 * std::pow(1.011, t));
    }
  }
  const double real_m2 = 9123.456;
  const DayNumber base = days_from_civil(2017, 7, 1);
  std::vector<Transaction> txs;
  for (const std::string date : {"2003-02-11", "2011-12-30", "2019-08-01"}) {
    Transaction t;
    t.area = 84.0;
    t.transaction_date = parse_date(date);
    t.price = real_m2 * t.area * (cpi.at(t.transaction_date) / cpi.at(base)) *
              (cost.at(t.transaction_date) / cost.at(base));
    txs.push_back(t);
  }
  deflate_prices(txs, cpi, cost, 2017);
  for (const auto& t : txs) {
    CHECK(t.log_price == doctest::Approx(std::log(real_m2)).epsilon(1e-12));
  }
}

TEST_CASE("date outside index coverage is a user error") {
  std::string text = header() + row("p1", "b1", 1e6, 1, 4, 1998, "1998-05-02");
  auto txs = load_transactions_text(text, "t.csv", kSchema).transactions;
  CHECK_THROWS_AS(deflate_prices(txs, flat_index(), flat_index(), 2017), UserError);
}

TEST_CASE("panel hierarchy counts: 2 blocs x 2 buildings x 2 apartments") {
  std::vector<Transaction> txs;
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        Transaction t;
        t.parcel_id = "p" + std::to_string(k) + std::to_string(i);
        t.building_id = t.parcel_id;
        t.bloc_id = "k" + std::to_string(k);
        t.height = 5;
        t.log_price_adj = 9.0 + 0.01 * j;
        t.transaction_date = days_from_civil(2010, 1, 1);
        txs.push_back(t);
      }
    }
  }
  PanelBuildReport rep;
  const Panel panel = build_panel(txs, &rep);
  REQUIRE(panel.groups.size() == 1);
  CHECK(panel.groups[0].height == 5);
  CHECK(panel.groups[0].n_blocs() == 2);
  CHECK(panel.groups[0].n_buildings() == 4);
  CHECK(panel.groups[0].n_apartments() == 8);
  CHECK(rep.apartments == 8);
}

TEST_CASE("multi-building parcels are excluded from the panel") {
  std::vector<Transaction> txs;
  auto add = [&](const std::string& parcel, const std::string& building, int h) {
    for (int j = 0; j < 2; ++j) {
      Transaction t;
      t.parcel_id = parcel;
      t.building_id = building;
      t.bloc_id = "k";
      t.height = h;
      t.log_price_adj = 9.0;
      t.transaction_date = days_from_civil(2010, 1, 1);
      txs.push_back(t);
    }
  };
  add("p1", "b1", 4);
  add("p1", "b2", 7);  // same parcel, second building
  add("p2", "b3", 4);
  PanelBuildReport rep;
  const Panel panel = build_panel(txs, &rep);
  CHECK(rep.excluded_multi_building_parcel == 4);
  CHECK(panel.n_apartments() == 2);
  // exact integer identity: apartments = transactions - exclusions
  CHECK(panel.n_apartments() == txs.size() - rep.excluded_multi_building_parcel);
}

TEST_CASE("panel counts reproduce the generator's shape") {
  const ShapeHeight sh = shape_from_counts(1, 182, 319, 1453, 0.74, 5);
  CHECK(sh.blocs.size() == 182);
  std::size_t buildings = 0, apartments = 0, singles = 0;
  for (const auto& b : sh.blocs) {
    buildings += b.apartments_per_building.size();
    if (b.apartments_per_building.size() == 1) ++singles;
    for (int j : b.apartments_per_building) {
      CHECK(j >= 2);
      apartments += j;
    }
  }
  CHECK(buildings == 319);
  CHECK(apartments == 1453);
  CHECK(std::fabs(static_cast<double>(singles) / 182.0 - 0.74) < 0.05);

  const auto truth = std::vector<HeightParams>{
      {1, std::log(7359.0), 0.38, 0.2, 0.08, 0.05}};
  const GeneratedPanel gen = generate_panel(truth, {sh}, 3);
  CHECK(gen.panel.groups[0].n_blocs() == 182);
  CHECK(gen.panel.groups[0].n_buildings() == 319);
  CHECK(gen.panel.groups[0].n_apartments() == 1453);
}
