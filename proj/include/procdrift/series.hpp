#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

namespace procdrift {

/// One series per row, one column per window.
template <typename Scalar>
using SeriesMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using SeriesVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using ConstraintMatrix = SeriesMatrix<double>;

/// Mean of the per-row ranges (max - min).
template <typename Derived>
typename Derived::Scalar spread(const Eigen::MatrixBase<Derived>& rows) {
  using Scalar = typename Derived::Scalar;
  if (rows.rows() == 0) return Scalar(0);
  return (rows.rowwise().maxCoeff() - rows.rowwise().minCoeff()).mean();
}

/// Poly-line length of one series: sum of |x[j+1] - x[j]|.
template <typename Derived>
typename Derived::Scalar path_variation(const Eigen::MatrixBase<Derived>& series) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = series.size();
  if (n < 2) return Scalar(0);
  return (series.tail(n - 1) - series.head(n - 1)).cwiseAbs().sum();
}

/// Sum over rows of sqrt(1 + (variation * win_num)^2).
template <typename Derived>
typename Derived::Scalar erratic(const Eigen::MatrixBase<Derived>& rows, Eigen::Index win_num) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  const Eigen::Index n = rows.cols();
  if (n < 2) return Scalar(rows.rows());
  auto variation =
      (rows.rightCols(n - 1) - rows.leftCols(n - 1)).cwiseAbs().rowwise().sum() *
      Scalar(win_num);
  return (variation.array().square() + Scalar(1)).sqrt().sum();
}

/// Column-wise mean of the selected rows.
template <typename Derived>
SeriesVector<typename Derived::Scalar> mean_series(const Eigen::MatrixBase<Derived>& rows,
                                                   const std::vector<int>& members) {
  using Scalar = typename Derived::Scalar;
  SeriesVector<Scalar> acc = SeriesVector<Scalar>::Zero(rows.cols());
  for (int m : members) acc += rows.row(m).transpose();
  if (!members.empty()) acc /= Scalar(members.size());
  return acc;
}

template <typename Derived>
SeriesMatrix<typename Derived::Scalar> select_rows(const Eigen::MatrixBase<Derived>& rows,
                                                   const std::vector<int>& members) {
  SeriesMatrix<typename Derived::Scalar> out(static_cast<Eigen::Index>(members.size()),
                                             rows.cols());
  for (std::size_t i = 0; i < members.size(); ++i) out.row(i) = rows.row(members[i]);
  return out;
}

}  // namespace procdrift
