#include "procdrift/changepoint.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace procdrift {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

std::string_view to_string(CostKind c) {
  switch (c) {
    case CostKind::kernel_rbf: return "kernel-rbf";
    case CostKind::kernel_linear: return "kernel-linear";
    case CostKind::l2_mean: return "l2-mean";
  }
  return "kernel-rbf";
}

std::optional<CostKind> parse_cost_kind(std::string_view s) {
  if (s == "kernel-rbf" || s == "rbf") return CostKind::kernel_rbf;
  if (s == "kernel-linear" || s == "linear") return CostKind::kernel_linear;
  if (s == "l2-mean" || s == "l2") return CostKind::l2_mean;
  return std::nullopt;
}

SegmentCost::SegmentCost(const ConstraintMatrix& series, CostKind kind)
    : n_(static_cast<int>(series.cols())), kind_(kind), dims_(series.rows()) {
  const auto n = static_cast<std::size_t>(n_);
  if (kind_ == CostKind::l2_mean) {
    const auto d = static_cast<std::size_t>(dims_);
    sum_.assign((n + 1) * d, 0.0);
    sumsq_.assign(n + 1, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double x = series(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
        sum_[(t + 1) * d + k] = sum_[t * d + k] + x;
        sq += x * x;
      }
      sumsq_[t + 1] = sumsq_[t] + sq;
    }
    return;
  }

  // Squared distances between time points (columns).
  std::vector<double> d2(n * n, 0.0);
  std::vector<double> upper;
  upper.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (series.col(static_cast<Eigen::Index>(i)) -
                        series.col(static_cast<Eigen::Index>(j)))
                           .squaredNorm();
      d2[i * n + j] = d2[j * n + i] = v;
      upper.push_back(v);
    }

  gram_.assign(n * n, 0.0);
  if (kind_ == CostKind::kernel_rbf) {
    // Bandwidth from the median heuristic.
    const double med = median(upper);
    gamma_ = med > 0.0 ? 1.0 / med : 1.0;
    for (std::size_t k = 0; k < n * n; ++k) gram_[k] = std::exp(-gamma_ * d2[k]);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        gram_[i * n + j] =
            series.col(static_cast<Eigen::Index>(i)).dot(series.col(static_cast<Eigen::Index>(j)));
  }

  cum_.assign((n + 1) * (n + 1), 0.0);
  diag_cum_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    diag_cum_[i + 1] = diag_cum_[i] + gram_[i * n + i];
    for (std::size_t j = 0; j < n; ++j)
      cum_[(i + 1) * (n + 1) + (j + 1)] = gram_[i * n + j] + cum_[i * (n + 1) + (j + 1)] +
                                           cum_[(i + 1) * (n + 1) + j] - cum_[i * (n + 1) + j];
  }
}

double SegmentCost::block(int s, int e) const {
  const auto w = static_cast<std::size_t>(n_) + 1;
  return cum_[e * w + e] - cum_[s * w + e] - cum_[e * w + s] + cum_[s * w + s];
}

double SegmentCost::cost(int s, int e) const {
  const double len = e - s;
  if (len <= 0) return 0.0;
  double c;
  if (kind_ == CostKind::l2_mean) {
    const auto d = static_cast<std::size_t>(dims_);
    double sq_mean = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double m = sum_[e * d + k] - sum_[s * d + k];
      sq_mean += m * m;
    }
    c = (sumsq_[e] - sumsq_[s]) - sq_mean / len;
  } else {
    c = (diag_cum_[e] - diag_cum_[s]) - block(s, e) / len;
  }
  return std::max(0.0, c);
}

double SegmentCost::half_sq_distance(int i, int j) const {
  if (kind_ == CostKind::l2_mean) {
    const auto d = static_cast<std::size_t>(dims_);
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double xi = sum_[(i + 1) * d + k] - sum_[i * d + k];
      const double xj = sum_[(j + 1) * d + k] - sum_[j * d + k];
      acc += (xi - xj) * (xi - xj);
    }
    return 0.5 * acc;
  }
  return std::max(0.0, 0.5 * (gram(i, i) + gram(j, j)) - gram(i, j));
}

double SegmentCost::noise_level(int lag) const {
  lag = std::max(1, std::min(lag, n_ - 1));
  if (n_ < 2) return 0.0;
  // Exactly repeated columns (constant stretches) say nothing about the noise
  // of the regimes that do vary, so only non-zero differences are pooled.
  std::vector<double> half_sq;
  half_sq.reserve(n_ - lag);
  for (int t = 0; t + lag < n_; ++t)
    if (double v = half_sq_distance(t, t + lag); v > 1e-12) half_sq.push_back(v);
  return median(std::move(half_sq));
}

double auto_penalty(const SegmentCost& cost, double scale, int lag) {
  const int n = cost.length();
  if (n < 2) return 1.0;
  const double noise = cost.noise_level(lag);
  if (noise <= 1e-12) return 1.0;
  return scale * noise * std::log(static_cast<double>(n));
}

Segmentation pelt(const SegmentCost& cost, double penalty, int min_segment) {
  const int n = cost.length();
  const int m = std::max(1, min_segment);
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> best(n + 1, inf);
  std::vector<int> last(n + 1, -1);
  std::vector<int> expire(n + 1, INT_MAX);
  std::vector<int> candidates{0};
  best[0] = -penalty;

  for (int t = m; t <= n; ++t) {
    std::erase_if(candidates, [&](int tau) { return expire[tau] <= t; });
    for (int tau : candidates) {
      if (t - tau < m) continue;
      const double v = best[tau] + cost.cost(tau, t) + penalty;
      if (v < best[t]) {
        best[t] = v;
        last[t] = tau;
      }
    }
    if (best[t] == inf) continue;
    // A candidate beaten by t now stays beaten once t itself becomes
    // admissible, i.e. from t + m on.
    for (int tau : candidates)
      if (expire[tau] == INT_MAX && best[tau] + cost.cost(tau, t) > best[t]) expire[tau] = t + m;
    candidates.push_back(t);
  }

  Segmentation out;
  out.objective = best[n];
  for (int t = n; last[t] > 0; t = last[t]) out.change_points.push_back(last[t]);
  std::reverse(out.change_points.begin(), out.change_points.end());
  return out;
}

std::vector<int> detect_change_points(const ConstraintMatrix& series, const ChangePointConfig& cfg) {
  const int m = std::max(1, cfg.min_segment);
  if (series.cols() < 2 * m)
    throw std::invalid_argument("series of length " + std::to_string(series.cols()) +
                                " is shorter than 2 * min_segment (" + std::to_string(2 * m) + ")");
  SegmentCost cost(series, cfg.cost);
  const double penalty = cfg.penalty ? *cfg.penalty : auto_penalty(cost, cfg.auto_scale, cfg.noise_lag);
  return pelt(cost, penalty, m).change_points;
}

}  // namespace procdrift
