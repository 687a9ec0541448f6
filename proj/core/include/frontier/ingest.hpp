#pragma once

#include <string>
#include <vector>

#include "frontier/types.hpp"

namespace frontier {

// Reads a transactions CSV against the schema's column mapping. Rows that
// violate the record invariants (price/area > 0, floor <= height, parse
// failures) are collected into the rejects report, not dropped silently.
// Throws UserError when the reject share exceeds schema.reject_threshold.
LoadResult load_transactions(const std::string& path, const TransactionSchema& schema);

LoadResult load_transactions_text(const std::string& text, const std::string& name,
                                  const TransactionSchema& schema);

// Applies the sample rules (sale within a year of construction, whole-asset
// sales, no single-family homes, no missing fields, at least two transactions
// per building) plus the nominal-price tail trim. Order: trim first on the
// loaded sample, then rules 1-4, then the per-building count rule.
std::vector<Transaction> apply_sample_filters(const std::vector<Transaction>& txs,
                                              const FilterConfig& rules,
                                              FilterReport* report = nullptr);

// Fills log_price = ln((price/area) * cpi(base)/cpi(date) * cost(base)/cost(date)).
// base_year is anchored at July 1. Throws UserError when a date lies outside
// either index's coverage.
void deflate_prices(std::vector<Transaction>& txs, const PriceIndexSeries& cpi,
                    const PriceIndexSeries& cost, int base_year);

PriceIndexSeries load_index_csv(const std::string& path);

void write_rejects_csv(const std::string& path, const std::vector<RejectRow>& rejects);

}  // namespace frontier
