#include "frontier/truncnorm.hpp"

#include <cmath>
#include <limits>

#include "frontier/error.hpp"

namespace frontier {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLnSqrt2Pi = 0.9189385332046727;  // ln sqrt(2*pi)

// Mills ratio Phi(-t)/phi(t) for t > 0 via the Laplace continued fraction
//   m(t) = 1 / (t + 1/(t + 2/(t + 3/(t + ...))))
// evaluated backward at fixed depth; machine precision for t >= 6.
double mills_ratio(double t) {
  double d = t;
  for (int n = 120; n >= 1; --n) d = t + n / d;
  return 1.0 / d;
}
}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x - kLnSqrt2Pi); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_log_cdf(double x) {
  if (x >= -8.0) {
    return std::log(norm_cdf(x));
  }
  // ln Phi(x) = ln phi(x) + ln m(-x) for x << 0
  return -0.5 * x * x - kLnSqrt2Pi + std::log(mills_ratio(-x));
}

double inverse_mills(double x) {
  if (x >= -8.0) return norm_pdf(x) / norm_cdf(x);
  return 1.0 / mills_ratio(-x);
}

double norm_quantile(double p) {
  // Wichura (1988), algorithm AS 241, PPND16.
  if (!(p > 0.0 && p < 1.0)) throw InternalError("norm_quantile: p outside (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::fabs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double norm_quantile_from_log_cdf(double l) {
  if (!(l < 0.0)) throw InternalError("norm_quantile_from_log_cdf: l must be < 0");
  if (l > -700.0) {
    const double p = std::exp(l);
    if (p > 1e-300 && p < 1.0) return norm_quantile(p);
  }
  // Asymptotic start: ln Phi(x) ~ -x^2/2 - ln(-x sqrt(2 pi)) for x << 0,
  // then polish with Newton using the exact stable log-cdf.
  double t = -2.0 * l;
  double x = -std::sqrt(std::max(1.0, t - std::log(2.0 * M_PI * std::max(1.0, t))));
  for (int it = 0; it < 60; ++it) {
    const double f = norm_log_cdf(x) - l;
    const double d = inverse_mills(x);  // d/dx ln Phi
    const double step = f / d;
    x -= step;
    if (std::fabs(step) < 1e-14 * std::max(1.0, std::fabs(x))) break;
  }
  return x;
}

double tn_mean(double mu, double sigma) {
  return mu + sigma * inverse_mills(mu / sigma);
}

double tn_variance(double mu, double sigma) {
  const double t = mu / sigma;
  const double lam = inverse_mills(t);
  return sigma * sigma * (1.0 - t * lam - lam * lam);
}

double solve_sigma_u(double mu, double target_variance) {
  if (!(target_variance > 0.0)) {
    throw UserError("solve_sigma_u: target variance must be positive");
  }
  double lo = 1e-8;
  double hi = 10.0 * std::sqrt(target_variance) + std::fabs(mu);
  int guard = 0;
  while (tn_variance(mu, hi) < target_variance) {
    hi *= 2.0;
    if (++guard > 200) throw InternalError("solve_sigma_u: no bracket");
  }
  if (tn_variance(mu, lo) > target_variance) return lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tn_variance(mu, mid) < target_variance) {
      lo = mid;
    } else {
      hi = mid;
    }
    if ((hi - lo) <= 1e-10 * hi) break;
  }
  return 0.5 * (lo + hi);
}

double tn_quantile(double mu, double sigma, double p) {
  if (sigma <= 0.0) return std::max(0.0, mu);
  // P(Z <= z | Z >= alpha) = p  <=>  Phi(-z) = (1-p) Phi(-alpha), alpha = -mu/sigma.
  const double log_tail = std::log1p(-p) + norm_log_cdf(mu / sigma);
  const double z = -norm_quantile_from_log_cdf(log_tail);
  return std::max(0.0, mu + sigma * z);
}

double tn_sample(double mu, double sigma, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(
      std::numeric_limits<double>::min(), 1.0);
  const double p = 1.0 - unif(rng);  // p in [0, 1)
  return tn_quantile(mu, sigma, p);
}

PosteriorU posterior_u(double deviation, double mu_u, double sigma_u, double sigma_eta) {
  if (!(sigma_u > 0.0)) throw UserError("posterior_u: sigma_u must be positive");
  PosteriorU post;
  post.deviation = deviation;
  post.mu_u = mu_u;
  post.sigma_u = sigma_u;
  post.sigma_eta = sigma_eta;
  const double su2 = sigma_u * sigma_u;
  const double se2 = sigma_eta * sigma_eta;
  if (se2 == 0.0) {
    post.mu_star = deviation;
    post.sigma_star = 0.0;
    return post;
  }
  post.mu_star = (mu_u * se2 + deviation * su2) / (su2 + se2);
  post.sigma_star = std::sqrt(su2 * se2 / (su2 + se2));
  return post;
}

double PosteriorU::sample(std::mt19937_64& rng) const {
  if (sigma_star == 0.0) return std::max(0.0, mu_star);
  return tn_sample(mu_star, sigma_star, rng);
}

double PosteriorU::pdf(double u) const {
  if (u < 0.0) return 0.0;
  if (sigma_star == 0.0) return u == mu_star ? std::numeric_limits<double>::infinity() : 0.0;
  const double z = (u - mu_star) / sigma_star;
  const double log_norm = norm_log_cdf(mu_star / sigma_star);
  return std::exp(-0.5 * z * z - kLnSqrt2Pi - std::log(sigma_star) - log_norm);
}

}  // namespace frontier
