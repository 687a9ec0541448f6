#include "frontier/polyfit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "frontier/error.hpp"
#include "frontier/rng.hpp"

namespace frontier {

namespace {

void cheb_row(double t, int degree, double* out) {
  // T_0..T_degree at t in [-1, 1]
  out[0] = 1.0;
  if (degree >= 1) out[1] = t;
  for (int k = 2; k <= degree; ++k) out[k] = 2.0 * t * out[k - 1] - out[k - 2];
}

}  // namespace

PolyFit::PolyFit(const std::vector<double>& x, const std::vector<double>& y, int degree,
                 const std::vector<double>& weights) {
  if (x.size() != y.size()) throw InternalError("PolyFit: size mismatch");
  if (static_cast<int>(x.size()) < degree + 1) {
    throw UserError("PolyFit: need at least degree+1 observations (" +
                    std::to_string(x.size()) + " < " + std::to_string(degree + 1) + ")");
  }
  degree_ = degree;
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  x_lo_ = *lo;
  x_hi_ = *hi;
  if (x_hi_ <= x_lo_) x_hi_ = x_lo_ + 1.0;  // constant x: basis collapses to T_0

  const int n = static_cast<int>(x.size());
  const int k = degree + 1;
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd Y(n);
  std::vector<double> row(k);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * (x[i] - x_lo_) / (x_hi_ - x_lo_) - 1.0;
    cheb_row(t, degree, row.data());
    const double w = weights.empty() ? 1.0 : std::sqrt(std::max(0.0, weights[i]));
    for (int j = 0; j < k; ++j) X(i, j) = row[j] * w;
    Y(i) = y[i] * w;
  }
  Eigen::VectorXd c = X.colPivHouseholderQr().solve(Y);
  coef_.assign(c.data(), c.data() + k);
}

PolyFit PolyFit::from_parts(double x_lo, double x_hi, std::vector<double> coef) {
  PolyFit p;
  p.x_lo_ = x_lo;
  p.x_hi_ = x_hi;
  p.degree_ = static_cast<int>(coef.size()) - 1;
  p.coef_ = std::move(coef);
  return p;
}

double PolyFit::operator()(double xv) const {
  if (coef_.empty()) throw InternalError("PolyFit: not fitted");
  double t = 2.0 * (xv - x_lo_) / (x_hi_ - x_lo_) - 1.0;
  t = std::clamp(t, -2.0, 2.0);  // mild extrapolation only
  std::vector<double> row(coef_.size());
  cheb_row(t, degree_, row.data());
  double s = 0;
  for (std::size_t j = 0; j < coef_.size(); ++j) s += coef_[j] * row[j];
  return s;
}

double kfold_cv_mse(const std::vector<double>& x, const std::vector<double>& y,
                    int degree, int folds, std::uint64_t seed,
                    const std::vector<double>& weights) {
  const std::size_t n = x.size();
  if (n < static_cast<std::size_t>(degree + 1) + 1) {
    return std::numeric_limits<double>::infinity();
  }
  folds = std::min<int>(folds, static_cast<int>(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed, 0xCFu);
  std::shuffle(order.begin(), order.end(), rng);

  double sse = 0;
  double wsum = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<double> xt, yt, wt;
    std::vector<std::size_t> holdout;
    for (std::size_t idx = 0; idx < n; ++idx) {
      if (static_cast<int>(idx % folds) == f) {
        holdout.push_back(order[idx]);
      } else {
        xt.push_back(x[order[idx]]);
        yt.push_back(y[order[idx]]);
        if (!weights.empty()) wt.push_back(weights[order[idx]]);
      }
    }
    if (xt.size() < static_cast<std::size_t>(degree + 1)) {
      return std::numeric_limits<double>::infinity();
    }
    PolyFit fit(xt, yt, degree, wt);
    for (std::size_t i : holdout) {
      const double r = y[i] - fit(x[i]);
      const double w = weights.empty() ? 1.0 : weights[i];
      sse += w * r * r;
      wsum += w;
    }
  }
  return wsum > 0 ? sse / wsum : std::numeric_limits<double>::infinity();
}

double loo_cv_mse(const std::vector<double>& x, const std::vector<double>& y,
                  int degree, const std::vector<double>& weights) {
  const std::size_t n = x.size();
  if (n < static_cast<std::size_t>(degree + 2)) {
    return std::numeric_limits<double>::infinity();
  }
  double sse = 0, wsum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> xt, yt, wt;
    xt.reserve(n - 1);
    yt.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      xt.push_back(x[j]);
      yt.push_back(y[j]);
      if (!weights.empty()) wt.push_back(weights[j]);
    }
    PolyFit fit(xt, yt, degree, wt);
    const double r = y[i] - fit(x[i]);
    const double w = weights.empty() ? 1.0 : weights[i];
    sse += w * r * r;
    wsum += w;
  }
  return wsum > 0 ? sse / wsum : std::numeric_limits<double>::infinity();
}

namespace {

// smallest degree within a hair of the best CV score; keeps exactly-fitting
// data (CV error at rounding level) from promoting spurious high degrees
int pick_degree(const std::vector<double>& mse, double y_scale) {
  double best = *std::min_element(mse.begin(), mse.end());
  const double tol = best * 1e-6 + 1e-15 * y_scale;
  for (std::size_t d = 0; d < mse.size(); ++d) {
    if (mse[d] <= best + tol) return static_cast<int>(d);
  }
  return 0;
}

double scale_of(const std::vector<double>& y) {
  double s = 1.0;
  for (double v : y) s += v * v;
  return s / (y.size() + 1);
}

}  // namespace

int select_degree_kfold(const std::vector<double>& x, const std::vector<double>& y,
                        int max_degree, int folds, std::uint64_t seed) {
  std::vector<double> mse;
  for (int d = 0; d <= max_degree; ++d) mse.push_back(kfold_cv_mse(x, y, d, folds, seed));
  return pick_degree(mse, scale_of(y));
}

int select_degree_loo(const std::vector<double>& x, const std::vector<double>& y,
                      int max_degree, const std::vector<double>& weights) {
  std::vector<double> mse;
  for (int d = 0; d <= max_degree; ++d) mse.push_back(loo_cv_mse(x, y, d, weights));
  return pick_degree(mse, scale_of(y));
}

}  // namespace frontier
