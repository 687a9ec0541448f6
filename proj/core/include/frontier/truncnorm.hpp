#pragma once

#include <cstdint>
#include <random>

namespace frontier {

// Standard normal pdf/cdf helpers. All truncations in this project are from
// below at zero, matching the deviation model u >= 0.

double norm_pdf(double x);
double norm_cdf(double x);

// ln Phi(x), stable for arbitrarily negative x (continued-fraction Mills
// ratio below -8).
double norm_log_cdf(double x);

// Inverse Mills ratio lambda(x) = phi(x)/Phi(x).
double inverse_mills(double x);

// Phi^{-1}(p), p in (0,1). Wichura's AS 241 (PPND16).
double norm_quantile(double p);

// Solves ln Phi(x) = l for any l < 0 (Newton on the stable log-cdf); used to
// draw truncated-normal quantiles deep in the lower tail.
double norm_quantile_from_log_cdf(double l);

// Mean and variance of N(mu, sigma^2) truncated to [0, inf):
//   E[u]   = mu + sigma * lambda(mu/sigma)
//   Var[u] = sigma^2 * (1 - (mu/sigma) lambda(mu/sigma) - lambda(mu/sigma)^2)
double tn_mean(double mu, double sigma);
double tn_variance(double mu, double sigma);

// Inverts tn_variance in sigma at fixed mu by bisection (the variance is
// increasing in sigma). target_variance must be > 0; relative tolerance 1e-10.
double solve_sigma_u(double mu, double target_variance);

// p-quantile of the zero-truncated normal.
double tn_quantile(double mu, double sigma, double p);

// Inverse-CDF draw (one uniform consumed per call).
double tn_sample(double mu, double sigma, std::mt19937_64& rng);

// Conditional distribution of u given u + eta = deviation, where
// u ~ TN(mu_u, sigma_u^2) and eta ~ N(0, sigma_eta^2); again truncated
// normal with shrinkage weights sigma_u^2, sigma_eta^2.
struct PosteriorU {
  double mu_star = 0;
  double sigma_star = 0;
  double deviation = 0;
  double mu_u = 0, sigma_u = 0, sigma_eta = 0;

  double sample(std::mt19937_64& rng) const;
  double pdf(double u) const;
};

PosteriorU posterior_u(double deviation, double mu_u, double sigma_u, double sigma_eta);

}  // namespace frontier
