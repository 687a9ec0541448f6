#include "frontier/artifacts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "frontier/csv.hpp"
#include "frontier/error.hpp"

namespace frontier {

namespace {

using nlohmann::json;

// include_paths=false gives the canonical form behind the config hash:
// analytical parameters only, so relocating inputs or outputs does not
// change the fingerprint
json config_json(const PipelineConfig& c, bool include_paths = true) {
  json j;
  if (include_paths) {
    j["inputs"] = {{"transactions", c.transactions_csv},
                   {"cpi", c.cpi_csv},
                   {"cost_index", c.cost_index_csv},
                   {"existing_homes", c.existing_homes_csv}};
  }
  j["base_year"] = c.base_year;
  j["filters"] = {{"year_window", c.filters.year_window},
                  {"full_asset_only", c.filters.full_asset_only},
                  {"drop_single_family", c.filters.drop_single_family},
                  {"drop_missing", c.filters.drop_missing},
                  {"min_two_per_building", c.filters.min_two_per_building},
                  {"trim_lower", c.filters.trim_lower},
                  {"trim_upper", c.filters.trim_upper}};
  j["hedonic_spec"] = c.hedonic_spec;
  j["grids"] = {{"n_g", c.grids.n_g},
                {"n_mu", c.grids.n_mu},
                {"g_lo_sds", c.grids.g_lo_sds},
                {"mu_span_mult", c.grids.mu_span_mult}};
  j["quartic"] = {{"n_mu", c.quartic.n_mu},
                  {"n_starts", c.quartic.n_starts},
                  {"max_evals", c.quartic.max_evals},
                  {"mes_window", c.quartic.mes_window}};
  j["radii"] = c.radii;
  j["draws"] = c.draws;
  j["kappa_T"] = c.kappa_T;
  j["apartment_level"] = c.apartment_level;
  j["bootstrap_replicates"] = c.bootstrap_replicates;
  j["band_level"] = c.band_level;
  j["simulate"] = {{"kind", c.sim_kind},
                   {"market_config", c.sim_market_config},
                   {"shape", c.sim_shape},
                   {"sigma_u", c.sim_sigma_u},
                   {"mu_ratio", c.sim_mu_ratio},
                   {"markets", c.sim_markets}};
  j["seed"] = c.seed;
  if (include_paths) j["out_dir"] = c.out_dir;
  return j;
}

}  // namespace

PipelineConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  PipelineConfig c;
  if (j.contains("inputs")) {
    const auto& in = j["inputs"];
    c.transactions_csv = in.value("transactions", "");
    c.cpi_csv = in.value("cpi", "");
    c.cost_index_csv = in.value("cost_index", "");
    c.existing_homes_csv = in.value("existing_homes", "");
  }
  c.base_year = j.value("base_year", c.base_year);
  if (j.contains("filters")) {
    const auto& f = j["filters"];
    c.filters.year_window = f.value("year_window", c.filters.year_window);
    c.filters.full_asset_only = f.value("full_asset_only", c.filters.full_asset_only);
    c.filters.drop_single_family =
        f.value("drop_single_family", c.filters.drop_single_family);
    c.filters.drop_missing = f.value("drop_missing", c.filters.drop_missing);
    c.filters.min_two_per_building =
        f.value("min_two_per_building", c.filters.min_two_per_building);
    c.filters.trim_lower = f.value("trim_lower", c.filters.trim_lower);
    c.filters.trim_upper = f.value("trim_upper", c.filters.trim_upper);
  }
  c.hedonic_spec = j.value("hedonic_spec", c.hedonic_spec);
  if (j.contains("grids")) {
    const auto& g = j["grids"];
    c.grids.n_g = g.value("n_g", c.grids.n_g);
    c.grids.n_mu = g.value("n_mu", c.grids.n_mu);
    c.grids.g_lo_sds = g.value("g_lo_sds", c.grids.g_lo_sds);
    c.grids.mu_span_mult = g.value("mu_span_mult", c.grids.mu_span_mult);
  }
  if (j.contains("quartic")) {
    const auto& q = j["quartic"];
    c.quartic.n_mu = q.value("n_mu", c.quartic.n_mu);
    c.quartic.n_starts = q.value("n_starts", c.quartic.n_starts);
    c.quartic.max_evals = q.value("max_evals", c.quartic.max_evals);
    c.quartic.mes_window = q.value("mes_window", c.quartic.mes_window);
  }
  if (j.contains("radii")) c.radii = j["radii"].get<std::vector<double>>();
  c.draws = j.value("draws", c.draws);
  if (j.contains("kappa_T")) {
    if (j["kappa_T"].is_number()) {
      c.kappa_T = format_double(j["kappa_T"].get<double>());
    } else {
      c.kappa_T = j["kappa_T"].get<std::string>();
    }
  }
  c.apartment_level = j.value("apartment_level", c.apartment_level);
  c.bootstrap_replicates = j.value("bootstrap_replicates", c.bootstrap_replicates);
  c.band_level = j.value("band_level", c.band_level);
  if (j.contains("simulate")) {
    const auto& s = j["simulate"];
    c.sim_kind = s.value("kind", c.sim_kind);
    c.sim_market_config = s.value("market_config", c.sim_market_config);
    c.sim_shape = s.value("shape", c.sim_shape);
    c.sim_sigma_u = s.value("sigma_u", c.sim_sigma_u);
    c.sim_mu_ratio = s.value("mu_ratio", c.sim_mu_ratio);
    c.sim_markets = s.value("markets", c.sim_markets);
  }
  c.seed = j.value("seed", c.seed);
  c.out_dir = j.value("out_dir", c.out_dir);
  return c;
}

std::string config_to_json(const PipelineConfig& cfg) { return config_json(cfg).dump(2); }

std::string config_hash(const PipelineConfig& cfg) {
  const std::string s = config_json(cfg, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string artifact_stamp(const PipelineConfig& cfg) {
  return std::string("tool_version=") + kToolVersion + " config_hash=" + config_hash(cfg) +
         " seed=" + std::to_string(cfg.seed);
}

std::string frontier_to_json(const FrontierEstimate& est, const PipelineConfig& cfg) {
  json j;
  j["meta"] = {{"tool_version", kToolVersion},
               {"config_hash", config_hash(cfg)},
               {"seed", cfg.seed}};
  j["mode"] = est.mode == FitMode::kConstrained  ? "constrained"
              : est.mode == FitMode::kPerHeight ? "per_height"
                                                : "quartic";
  j["mes"] = est.mes;
  j["H"] = est.H;
  j["total_loglik"] = est.total_loglik;
  json per = json::array();
  for (const auto& fh : est.heights) {
    per.push_back({{"h", fh.height},
                   {"q", fh.q},
                   {"g_log", fh.g},
                   {"G_level", std::exp(fh.g)},
                   {"mu_u", fh.mu_u},
                   {"sigma_u", fh.sigma_u},
                   {"sigma_v", fh.sigma_v},
                   {"sigma_w", fh.sigma_w},
                   {"interpolated", fh.interpolated}});
  }
  j["per_height"] = per;
  if (est.curve) {
    j["quartic"] = std::vector<double>(est.curve->beta.begin(), est.curve->beta.end());
  }
  if (est.bands) {
    j["bands"] = {{"level", est.bands->level},
                  {"replicates", est.bands->replicates},
                  {"seed", est.bands->seed},
                  {"heights", est.bands->heights},
                  {"lower", est.bands->lower},
                  {"upper", est.bands->upper}};
  }
  return j.dump(2);
}

FrontierEstimate frontier_from_json(const std::string& text) {
  json j = json::parse(text);
  FrontierEstimate est;
  const std::string mode = j.at("mode");
  est.mode = mode == "constrained"  ? FitMode::kConstrained
             : mode == "per_height" ? FitMode::kPerHeight
                                    : FitMode::kQuartic;
  est.mes = j.at("mes");
  est.H = j.at("H");
  est.total_loglik = j.value("total_loglik", 0.0);
  for (const auto& p : j.at("per_height")) {
    FrontierHeight fh;
    fh.height = p.at("h");
    fh.q = p.value("q", 0.0);
    fh.g = p.at("g_log");
    fh.mu_u = p.at("mu_u");
    fh.sigma_u = p.at("sigma_u");
    fh.sigma_v = p.at("sigma_v");
    fh.sigma_w = p.at("sigma_w");
    fh.interpolated = p.value("interpolated", false);
    est.heights.push_back(fh);
  }
  if (j.contains("quartic")) {
    CostCurve c;
    const auto b = j["quartic"].get<std::vector<double>>();
    if (b.size() != 5) throw UserError("frontier json: quartic needs 5 coefficients");
    std::copy(b.begin(), b.end(), c.beta.begin());
    est.curve = c;
  }
  if (j.contains("bands")) {
    BootstrapBands bands;
    const auto& bj = j["bands"];
    bands.level = bj.at("level");
    bands.replicates = bj.at("replicates");
    bands.seed = bj.at("seed");
    bands.heights = bj.at("heights").get<std::vector<int>>();
    bands.lower = bj.at("lower").get<std::vector<double>>();
    bands.upper = bj.at("upper").get<std::vector<double>>();
    est.bands = bands;
  }
  return est;
}

void write_variances_csv(const std::string& path, const VarianceEstimates& est,
                         const PipelineConfig& cfg) {
  CsvTable t({"height", "varV", "varW", "varU_moment", "varV_smooth", "varW_smooth",
              "dofV", "dofW", "flags"});
  t.add_comment(artifact_stamp(cfg));
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("NA");
  };
  for (const auto& h : est.heights) {
    std::string flags;
    for (const auto& f : h.flags) {
      if (!flags.empty()) flags += ';';
      flags += f;
    }
    t.append_row({std::to_string(h.height), opt(h.varV), opt(h.varW),
                  opt(h.varU_moment_final ? h.varU_moment_final : h.varU_moment),
                  opt(h.varV_smooth), opt(h.varW_smooth), format_double(h.dofV),
                  format_double(h.dofW), flags});
  }
  t.write_file(path);
}

void write_transactions_csv(const std::string& path, const std::vector<Transaction>& txs,
                            const PipelineConfig& cfg) {
  std::vector<std::string> header = {"parcel_id",  "building_id", "bloc_id",
                                     "city_id",    "price",       "area",
                                     "floor",      "height",      "construction_year",
                                     "transaction_date", "legal_status", "asset_fraction",
                                     "property_type", "x", "y", "log_price",
                                     "log_price_adj"};
  CsvTable t(header);
  t.add_comment(artifact_stamp(cfg));
  for (const auto& tx : txs) {
    std::vector<std::string> row = {
        tx.parcel_id,
        tx.building_id,
        tx.bloc_id,
        tx.city_id,
        format_double(tx.price),
        format_double(tx.area),
        std::to_string(tx.floor),
        std::to_string(tx.height),
        std::to_string(tx.construction_year),
        format_date(tx.transaction_date),
        tx.legal_status,
        format_double(tx.asset_fraction),
        tx.property_type,
        tx.x ? format_double(*tx.x) : "",
        tx.y ? format_double(*tx.y) : "",
        format_double(tx.log_price),
        format_double(tx.log_price_adj)};
    t.append_row(std::move(row));
  }
  t.write_file(path);
}

std::vector<Transaction> read_clean_transactions(const std::string& path) {
  const CsvTable t = CsvTable::read_file(path);
  std::vector<Transaction> txs;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    Transaction tx;
    tx.parcel_id = t.cell(r, t.column("parcel_id"));
    tx.building_id = t.cell(r, t.column("building_id"));
    tx.bloc_id = t.cell(r, t.column("bloc_id"));
    tx.city_id = t.cell(r, t.column("city_id"));
    tx.price = std::stod(t.cell(r, t.column("price")));
    tx.area = std::stod(t.cell(r, t.column("area")));
    tx.floor = std::stoi(t.cell(r, t.column("floor")));
    tx.height = std::stoi(t.cell(r, t.column("height")));
    tx.construction_year = std::stoi(t.cell(r, t.column("construction_year")));
    tx.transaction_date = parse_date(t.cell(r, t.column("transaction_date")));
    tx.legal_status = t.cell(r, t.column("legal_status"));
    tx.asset_fraction = std::stod(t.cell(r, t.column("asset_fraction")));
    tx.property_type = t.cell(r, t.column("property_type"));
    const std::string& xs = t.cell(r, t.column("x"));
    const std::string& ys = t.cell(r, t.column("y"));
    if (!xs.empty() && !ys.empty()) {
      tx.x = std::stod(xs);
      tx.y = std::stod(ys);
    }
    tx.log_price = std::stod(t.cell(r, t.column("log_price")));
    tx.log_price_adj = std::stod(t.cell(r, t.column("log_price_adj")));
    txs.push_back(std::move(tx));
  }
  return txs;
}

void write_index_csv(const std::string& path, const PriceIndexSeries& s) {
  CsvTable t({"date", "index"});
  for (const auto& [d, v] : s.points) t.append_row({format_date(d), format_double(v)});
  t.write_file(path);
}

void require_artifact(const std::string& path, const std::string& producer_cmd) {
  if (!std::filesystem::exists(path)) {
    throw UserError("missing artifact '" + path + "'; run `frontier " + producer_cmd +
                    "` first");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UserError("cannot write '" + path + "'");
  out << text;
}

}  // namespace frontier
