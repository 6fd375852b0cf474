#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "procdrift/series.hpp"

namespace procdrift {

enum class CostKind : std::uint8_t { kernel_rbf, kernel_linear, l2_mean };

std::string_view to_string(CostKind c);
std::optional<CostKind> parse_cost_kind(std::string_view s);

struct ChangePointConfig {
  CostKind cost = CostKind::kernel_rbf;
  std::optional<double> penalty;  ///< nullopt = auto
  double auto_scale = 3.0;        ///< c in c * noise * log(length)
  int min_segment = 2;
  /// Distance between the columns compared by the automatic noise estimate.
  /// Columns closer than this may share samples (overlapping windows).
  int noise_lag = 1;
};

/// Segment costs over the columns of a multivariate series (rows = dimensions,
/// columns = time). cost(s, e) covers columns [s, e) in O(1) after an
/// O(n^2 d) precomputation.
class SegmentCost {
 public:
  SegmentCost(const ConstraintMatrix& series, CostKind kind);

  double cost(int start, int end) const;
  int length() const { return n_; }

  /// Difference-based noise level in the cost's feature space: the median
  /// over t of the non-zero ||phi(x_t) - phi(x_{t+lag})||^2 / 2. Robust to a
  /// few change points and to constant stretches; 0 for a constant series.
  double noise_level(int lag = 1) const;

  /// ||phi(x_i) - phi(x_j)||^2 / 2.
  double half_sq_distance(int i, int j) const;

  /// RBF bandwidth parameter gamma of k(x, y) = exp(-gamma ||x - y||^2).
  double gamma() const { return gamma_; }

 private:
  double gram(int i, int j) const { return gram_[static_cast<std::size_t>(i) * n_ + j]; }
  double block(int s, int e) const;

  int n_ = 0;
  CostKind kind_;
  double gamma_ = 1.0;
  std::vector<double> gram_;      // n x n, kernels only
  std::vector<double> cum_;       // (n+1) x (n+1) 2-D prefix sums of gram_
  std::vector<double> diag_cum_;  // prefix sums of the diagonal
  // l2 route keeps per-dimension prefix sums instead.
  std::vector<double> sum_;     // (n+1) x d
  std::vector<double> sumsq_;   // n+1, summed over dimensions
  Eigen::Index dims_ = 0;
};

struct Segmentation {
  std::vector<int> change_points;  ///< strictly increasing, each in (0, n)
  double objective = 0.0;          ///< sum of segment costs + penalty * #change points
};

/// Exact penalized segmentation with pruning of dominated candidates.
/// Every segment is at least `min_segment` long.
Segmentation pelt(const SegmentCost& cost, double penalty, int min_segment);

/// c * noise_level(lag) * log(n); 1 for a constant series.
double auto_penalty(const SegmentCost& cost, double scale, int lag = 1);

/// Throws std::invalid_argument if the series has fewer than 2 * min_segment columns.
std::vector<int> detect_change_points(const ConstraintMatrix& series,
                                      const ChangePointConfig& cfg);

}  // namespace procdrift
