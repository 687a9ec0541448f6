#pragma once

#include <cstdint>
#include <vector>

namespace frontier {

// Weighted polynomial-series least squares on a Chebyshev basis over the
// data's x-range. Degrees are selected by cross validation elsewhere.
class PolyFit {
 public:
  PolyFit() = default;
  // weights may be empty (all ones). Requires x.size() >= degree + 1.
  PolyFit(const std::vector<double>& x, const std::vector<double>& y, int degree,
          const std::vector<double>& weights = {});

  double operator()(double x) const;
  int degree() const { return degree_; }
  bool valid() const { return !coef_.empty(); }

  // serialization support
  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }
  const std::vector<double>& coefficients() const { return coef_; }
  static PolyFit from_parts(double x_lo, double x_hi, std::vector<double> coef);

 private:
  double x_lo_ = -1, x_hi_ = 1;
  int degree_ = 0;
  std::vector<double> coef_;
};

// Mean squared K-fold cross-validation error of a given degree. Folds are a
// seeded deterministic shuffle. Weighted variant uses weights in both fit and
// error.
double kfold_cv_mse(const std::vector<double>& x, const std::vector<double>& y,
                    int degree, int folds, std::uint64_t seed,
                    const std::vector<double>& weights = {});

// Leave-one-out CV error (exact refits; n is small wherever this is used).
double loo_cv_mse(const std::vector<double>& x, const std::vector<double>& y,
                  int degree, const std::vector<double>& weights = {});

// Picks the degree in [0, max_degree] minimizing K-fold CV error.
int select_degree_kfold(const std::vector<double>& x, const std::vector<double>& y,
                        int max_degree, int folds, std::uint64_t seed);

int select_degree_loo(const std::vector<double>& x, const std::vector<double>& y,
                      int max_degree, const std::vector<double>& weights = {});

}  // namespace frontier
