#pragma once

// Internal: fixed-effects least squares with group dummies absorbed by the
// within transformation, streamed group block by group block. Shared by the
// hedonic fit and the period/cohort regression.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "frontier/error.hpp"

namespace frontier::detail {

struct WithinOls {
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;  // HC1-robust, accounting for absorbed group count
  std::size_t n = 0;
  std::size_t n_groups = 0;
};

// order: row indices sorted by group. group_of(i) identifies the block,
// fill_row(i, x) writes k regressors, y_of(i) the response.
inline WithinOls within_ols(const std::vector<std::size_t>& order, std::size_t k,
                            const std::function<std::string(std::size_t)>& group_of,
                            const std::function<void(std::size_t, double*)>& fill_row,
                            const std::function<double(std::size_t)>& y_of,
                            const std::vector<std::string>& names) {
  const std::size_t n = order.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  std::size_t n_groups = 0;

  std::vector<double> rowbuf(k);
  Eigen::MatrixXd block;
  Eigen::VectorXd yblock;
  auto for_each_block = [&](auto&& fn) {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      const std::string g = group_of(order[i]);
      while (j < n && group_of(order[j]) == g) ++j;
      const std::size_t m = j - i;
      block.resize(m, k);
      yblock.resize(m);
      for (std::size_t r = 0; r < m; ++r) {
        fill_row(order[i + r], rowbuf.data());
        for (std::size_t c = 0; c < k; ++c) block(r, c) = rowbuf[c];
        yblock(r) = y_of(order[i + r]);
      }
      block.rowwise() -= block.colwise().mean();
      yblock.array() -= yblock.mean();
      fn(block, yblock);
      i = j;
    }
  };

  for_each_block([&](const Eigen::MatrixXd& Xb, const Eigen::VectorXd& yb) {
    A.selfadjointView<Eigen::Lower>().rankUpdate(Xb.transpose());
    b.noalias() += Xb.transpose() * yb;
    ++n_groups;
  });
  A = A.selfadjointView<Eigen::Lower>();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(k)) {
    const auto perm = qr.colsPermutation().indices();
    std::ostringstream msg;
    msg << "rank-deficient design after the within transformation; "
           "unidentified effects:";
    int listed = 0;
    for (Eigen::Index j = qr.rank(); j < static_cast<Eigen::Index>(k) && listed < 8;
         ++j, ++listed) {
      msg << ' ' << names[perm[j]];
    }
    throw UserError(msg.str());
  }

  WithinOls out;
  out.n = n;
  out.n_groups = n_groups;
  out.coef = qr.solve(b);

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for_each_block([&](const Eigen::MatrixXd& Xb, const Eigen::VectorXd& yb) {
    const Eigen::VectorXd e = yb - Xb * out.coef;
    for (Eigen::Index r = 0; r < Xb.rows(); ++r) {
      meat.selfadjointView<Eigen::Lower>().rankUpdate(Xb.row(r).transpose(), e(r) * e(r));
    }
  });
  meat = meat.selfadjointView<Eigen::Lower>();

  const Eigen::MatrixXd Ainv = qr.inverse();
  const double dof = static_cast<double>(n) - static_cast<double>(k) -
                     static_cast<double>(n_groups);
  const double hc1 = dof > 0 ? static_cast<double>(n) / dof : 1.0;
  out.cov = hc1 * Ainv * meat * Ainv;
  return out;
}

}  // namespace frontier::detail
