#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "frontier/rng.hpp"
#include "frontier/truncnorm.hpp"

using namespace frontier;

namespace {

// rejection-sampling oracle: draw N(mu, sigma^2), keep nonnegative
std::pair<double, double> tn_monte_carlo(double mu, double sigma, std::size_t n,
                                         std::uint64_t seed) {
  auto rng = make_rng(seed, 42);
  std::normal_distribution<double> nd(mu, sigma);
  double s = 0, s2 = 0;
  std::size_t kept = 0;
  while (kept < n) {
    const double x = nd(rng);
    if (x < 0) continue;
    s += x;
    s2 += x * x;
    ++kept;
  }
  const double mean = s / n;
  return {mean, s2 / n - mean * mean};
}

}  // namespace

TEST_CASE("half-normal variance is 1 - 2/pi") {
  CHECK(tn_variance(0.0, 1.0) == doctest::Approx(1.0 - 2.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("deep positive location leaves truncation negligible") {
  CHECK(tn_variance(100.0, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(tn_mean(100.0, 1.0) == doctest::Approx(100.0).epsilon(1e-10));
}

TEST_CASE("tn_variance matches a 1e7-draw rejection-sampling oracle within 0.2%") {
  const auto [mc_mean, mc_var] = tn_monte_carlo(1.9, 1.0, 10'000'000, 99);
  CHECK(std::fabs(tn_variance(1.9, 1.0) - mc_var) / mc_var < 0.002);
  CHECK(std::fabs(tn_mean(1.9, 1.0) - mc_mean) / mc_mean < 0.002);
}

TEST_CASE("solve_sigma_u inverts the half-normal case") {
  CHECK(solve_sigma_u(0.0, 1.0 - 2.0 / M_PI) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("solve_sigma_u round trips across random parameters") {
  auto rng = make_rng(7, 0);
  std::uniform_real_distribution<double> mu_d(-2.0, 4.0), sd_d(0.05, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double mu = mu_d(rng), sigma = sd_d(rng);
    const double target = tn_variance(mu, sigma);
    const double solved = solve_sigma_u(mu, target);
    CHECK(solved == doctest::Approx(sigma).epsilon(1e-8));
  }
}

TEST_CASE("solve_sigma_u verified by re-evaluating the forward map") {
  const double s = solve_sigma_u(1.9, 0.1225);
  CHECK(tn_variance(1.9, s) == doctest::Approx(0.1225).epsilon(1e-9));
}

TEST_CASE("tn_variance is increasing in sigma at fixed mu") {
  for (double mu : {-1.5, 0.0, 0.7, 3.0}) {
    double prev = 0;
    for (double s = 0.05; s < 5.0; s *= 1.3) {
      const double v = tn_variance(mu, s);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("log cdf branches agree where both are valid") {
  for (double x = -20.0; x <= -6.0; x += 0.25) {
    const double direct = std::log(0.5 * std::erfc(-x / std::sqrt(2.0)));
    CHECK(norm_log_cdf(x) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("inverse Mills ratio is stable far into the left tail") {
  // lambda(x) ~ -x for x -> -inf; the continued fraction must not blow up
  for (double x : {-8.0, -12.0, -40.0, -200.0}) {
    const double l = inverse_mills(x);
    CHECK(l > -x);
    CHECK(l < -x + 2.0 / -x + 1e-9);
  }
  // both branches against 40-digit reference values at the switch point
  CHECK(inverse_mills(-7.999999) == doctest::Approx(8.121367126560997770).epsilon(1e-13));
  CHECK(inverse_mills(-8.000001) == doctest::Approx(8.121369097911230883).epsilon(1e-13));
}

TEST_CASE("norm_quantile inverts norm_cdf") {
  for (double p : {1e-12, 1e-6, 0.025, 0.5, 0.8, 1.0 - 1e-10}) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("log-domain quantile reaches far beyond double underflow") {
  const double x = norm_quantile_from_log_cdf(-1e4);
  CHECK(norm_log_cdf(x) == doctest::Approx(-1e4).epsilon(1e-10));
}

TEST_CASE("tn_quantile endpoints and monotonicity") {
  const double mu = -1.2, sigma = 0.8;
  double prev = -1;
  for (double p = 0.01; p < 1.0; p += 0.01) {
    const double x = tn_quantile(mu, sigma, p);
    CHECK(x >= 0.0);
    CHECK(x >= prev);
    prev = x;
  }
}

TEST_CASE("tn samples reproduce the analytic moments") {
  auto rng = make_rng(11, 3);
  const double mu = 0.7, sigma = 0.35;
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = tn_sample(mu, sigma, rng);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(mean == doctest::Approx(tn_mean(mu, sigma)).epsilon(0.01));
  CHECK(var == doctest::Approx(tn_variance(mu, sigma)).epsilon(0.02));
}

TEST_CASE("posterior parameters: direct substitution") {
  const PosteriorU p = posterior_u(2.0, 0.0, 1.0, 1.0);
  CHECK(p.mu_star == doctest::Approx(1.0));
  CHECK(p.sigma_star == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("posterior no-noise limit collapses onto the deviation") {
  const PosteriorU p = posterior_u(0.42, 1.0, 0.5, 1e-9);
  CHECK(p.mu_star == doctest::Approx(0.42).epsilon(1e-6));
  CHECK(p.sigma_star < 1e-8);
}

TEST_CASE("posterior location is a convex combination of prior and deviation") {
  auto rng = make_rng(5, 1);
  std::uniform_real_distribution<double> d(-1.0, 2.0), s(0.05, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double dev = d(rng), mu = d(rng), su = s(rng), se = s(rng);
    const PosteriorU p = posterior_u(dev, mu, su, se);
    const double w = (su * su) / (su * su + se * se);
    CHECK(p.mu_star == doctest::Approx(w * dev + (1.0 - w) * mu).epsilon(1e-12));
    CHECK(p.sigma_star < su);
    CHECK(p.sigma_star < se);
  }
}

TEST_CASE("posterior density matches grid-Bayes normalization within 1e-6") {
  const double dev = 0.9, mu_u = 0.4, sigma_u = 0.6, sigma_eta = 0.25;
  const PosteriorU post = posterior_u(dev, mu_u, sigma_u, sigma_eta);

  // Bayes numerator on a grid: prior TN density times normal likelihood
  const int n = 20000;
  const double hi = 6.0;
  std::vector<double> numer(n);
  const double dx = hi / n;
  auto prior = [&](double u) {
    if (u < 0) return 0.0;
    const double z = (u - mu_u) / sigma_u;
    return std::exp(-0.5 * z * z) / (sigma_u * std::sqrt(2 * M_PI) * norm_cdf(mu_u / sigma_u));
  };
  auto like = [&](double u) {
    const double z = (dev - u) / sigma_eta;
    return std::exp(-0.5 * z * z) / (sigma_eta * std::sqrt(2 * M_PI));
  };
  double norm = 0;
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) * dx;
    numer[i] = prior(u) * like(u);
    norm += numer[i] * dx;
  }
  double max_err = 0;
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) * dx;
    max_err = std::max(max_err, std::fabs(numer[i] / norm - post.pdf(u)));
  }
  CHECK(max_err < 1e-6);
}
