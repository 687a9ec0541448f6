#pragma once

// Test-support: exhaustive-enumeration oracle for the constrained fit and a
// random profile-table generator.

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "frontier/likelihood.hpp"

namespace oracle {

using frontier::ProfileTable;

// exhaustive search over every monotone chain and meeting height
struct BruteResult {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> choice;
  int mes = 1;
};

inline BruteResult brute_force(const std::vector<ProfileTable>& profiles) {
  const std::size_t T = profiles.size();
  const int H = profiles.back().height;
  std::vector<std::size_t> idx(T, 0);
  BruteResult out;
  for (;;) {
    for (int mes_t = 0; mes_t < static_cast<int>(T); ++mes_t) {
      if (profiles[mes_t].height >= H && T > 1) continue;
      bool ok = true;
      for (int t = 1; t <= mes_t && ok; ++t) {
        ok = profiles[t - 1].g_values[idx[t - 1]] >= profiles[t].g_values[idx[t]];
      }
      for (std::size_t t = mes_t + 1; t < T && ok; ++t) {
        ok = profiles[t].g_values[idx[t]] >= profiles[t - 1].g_values[idx[t - 1]];
      }
      if (!ok) continue;
      double total = 0;
      for (std::size_t t = 0; t < T; ++t) total += profiles[t].loglik[idx[t]];
      if (total > out.best) {
        out.best = total;
        out.choice = idx;
        out.mes = profiles[mes_t].height;
      }
    }
    std::size_t t = 0;
    while (t < T && ++idx[t] == profiles[t].g_values.size()) {
      idx[t] = 0;
      ++t;
    }
    if (t == T) break;
  }
  return out;
}

inline std::vector<ProfileTable> random_profiles(std::mt19937_64& rng, int max_T = 5,
                                          int max_grid = 8) {
  std::uniform_int_distribution<int> T_d(2, max_T), G_d(2, max_grid);
  std::uniform_real_distribution<double> val(-50.0, 50.0), gv(8.0, 10.0);
  const int T = T_d(rng);
  std::vector<ProfileTable> profiles(T);
  for (int t = 0; t < T; ++t) {
    auto& p = profiles[t];
    p.height = t + 1;
    const int G = G_d(rng);
    for (int j = 0; j < G; ++j) p.g_values.push_back(gv(rng));
    std::sort(p.g_values.begin(), p.g_values.end());
    for (int j = 0; j < G; ++j) {
      p.loglik.push_back(val(rng));
      p.mu_u.push_back(0.3);
      p.sigma_u.push_back(0.2);
    }
    p.sigma_v = 0.1;
    p.sigma_w = 0.05;
  }
  return profiles;
}


}  // namespace oracle
