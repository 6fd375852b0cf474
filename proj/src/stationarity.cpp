#include "procdrift/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace procdrift {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd xtx_inv;
  double ssr = 0.0;
  int nobs = 0;
  int k = 0;
};

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  OlsFit fit;
  const Eigen::MatrixXd xtx = x.transpose() * x;
  fit.xtx_inv = xtx.completeOrthogonalDecomposition().pseudoInverse();
  fit.beta = x.completeOrthogonalDecomposition().solve(y);
  fit.ssr = (y - x * fit.beta).squaredNorm();
  fit.nobs = static_cast<int>(x.rows());
  fit.k = static_cast<int>(x.cols());
  return fit;
}

// Regression of diff[t] on [1, level[t], diff[t-1], ..., diff[t-lags]] for
// t in [first, n-1), where n = series length.
void design(std::span<const double> x, int lags, int first, Eigen::MatrixXd& X,
            Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.size());
  const int rows = n - 1 - first;
  X.resize(rows, 2 + lags);
  y.resize(rows);
  for (int r = 0; r < rows; ++r) {
    const int t = first + r;
    y[r] = x[t + 1] - x[t];
    X(r, 0) = 1.0;
    X(r, 1) = x[t];
    for (int l = 1; l <= lags; ++l) X(r, 1 + l) = x[t - l + 1] - x[t - l];
  }
}

}  // namespace

double mackinnon_p_value(double stat) {
  constexpr double tau_max = 2.74;
  constexpr double tau_min = -18.83;
  constexpr double tau_star = -1.61;
  constexpr double small[] = {2.1659, 1.4412, 0.038269};
  constexpr double large[] = {1.7339, 0.93202, -0.12745, -0.010368};
  if (std::isnan(stat)) return 1.0;
  if (stat > tau_max) return 1.0;
  if (stat < tau_min) return 0.0;
  double z;
  if (stat <= tau_star) {
    z = small[0] + stat * (small[1] + stat * small[2]);
  } else {
    z = large[0] + stat * (large[1] + stat * (large[2] + stat * large[3]));
  }
  return normal_cdf(z);
}

AdfResult adf_test(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n < 8) throw std::invalid_argument("ADF test needs at least 8 observations, got " +
                                         std::to_string(n));
  AdfResult out;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) {
    out.degenerate = true;
    out.statistic = -std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
    out.nobs = n - 1;
    return out;
  }

  const int max_lag = static_cast<int>(std::floor(std::cbrt(static_cast<double>(n - 1))));
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  // AIC over a common sample that leaves room for max_lag lags.
  int best_lag = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  design(x, max_lag, max_lag, X, y);
  for (int lag = 0; lag <= max_lag; ++lag) {
    auto fit = ols(X.leftCols(2 + lag), y);
    const double nobs = fit.nobs;
    const double llf =
        -nobs / 2.0 * (std::log(2.0 * std::numbers::pi) + std::log(fit.ssr / nobs) + 1.0);
    const double aic = -2.0 * llf + 2.0 * fit.k;
    if (aic < best_aic) {
      best_aic = aic;
      best_lag = lag;
    }
  }

  design(x, best_lag, best_lag, X, y);
  auto fit = ols(X, y);
  out.lags = best_lag;
  out.nobs = fit.nobs;
  const double dof = fit.nobs - fit.k;
  const double sigma2 = dof > 0 ? fit.ssr / dof : 0.0;
  const double se = std::sqrt(std::max(0.0, sigma2 * fit.xtx_inv(1, 1)));
  const double coef = fit.beta[1];
  if (se > 0.0 && std::isfinite(se)) {
    out.statistic = coef / se;
  } else {
    // Exact fit: the sign of the level coefficient decides.
    constexpr double eps = 1e-12;
    out.statistic = coef < -eps   ? -std::numeric_limits<double>::infinity()
                    : coef > eps ? std::numeric_limits<double>::infinity()
                                 : 0.0;
  }
  out.p_value = mackinnon_p_value(out.statistic);
  return out;
}

std::vector<AcfLag> autocorrelation(std::span<const double> x, int max_lag) {
  const int n = static_cast<int>(x.size());
  if (max_lag < 0 || max_lag >= n)
    throw std::invalid_argument("max_lag must be in [0, " + std::to_string(n) + ")");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double denom = 0.0;
  for (double v : x) denom += (v - mean) * (v - mean);

  const double band = 1.96 / std::sqrt(static_cast<double>(n));
  std::vector<AcfLag> out;
  out.reserve(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    AcfLag lag{k, 0.0, false};
    if (k == 0) {
      lag.r = 1.0;
    } else if (denom > 0.0) {
      double num = 0.0;
      for (int t = 0; t + k < n; ++t) num += (x[t] - mean) * (x[t + k] - mean);
      lag.r = num / denom;
    }
    lag.significant = (k == 0 || denom > 0.0) && std::abs(lag.r) > band;
    out.push_back(lag);
  }
  return out;
}

}  // namespace procdrift
