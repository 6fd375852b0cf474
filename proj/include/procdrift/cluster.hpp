#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "procdrift/series.hpp"

namespace procdrift {

enum class Linkage : std::uint8_t { ward, weighted };
enum class Metric : std::uint8_t { euclidean, correlation };

std::string_view to_string(Linkage l);
std::string_view to_string(Metric m);
std::optional<Linkage> parse_linkage(std::string_view s);
std::optional<Metric> parse_metric(std::string_view s);

/// One agglomeration step. Cluster ids follow the usual convention: leaves are
/// 0..n-1 and the cluster created by merge i is n+i.
struct Merge {
  int left = 0;
  int right = 0;
  double height = 0.0;
  int size = 0;
};

struct Dendrogram {
  int leaves = 0;
  std::vector<Merge> merges;  ///< n-1 merges, non-decreasing height
};

/// Pairwise distance between two series under `metric`. The correlation
/// distance is 1 - Pearson r; a zero-variance series is at distance 0 from
/// another zero-variance series and 1 from anything else.
double series_distance(const Eigen::Ref<const SeriesVector<double>>& x,
                       const Eigen::Ref<const SeriesVector<double>>& y, Metric metric);

/// Condensed row-major upper triangle, as in pdist.
std::vector<double> pairwise_distances(const ConstraintMatrix& rows, Metric metric);

/// Agglomerative clustering with Lance-Williams updates over a
/// nearest-neighbour chain; O(n^2) time and memory. Both linkages are
/// reducible, so the chain yields the same dendrogram as greedy merging.
Dendrogram hierarchical_linkage(const ConstraintMatrix& rows, Linkage linkage, Metric metric);

/// Left-to-right leaf order of the dendrogram.
std::vector<int> leaf_order(const Dendrogram& tree);

/// Flat clusters whose merge heights are <= threshold. Labels are 0-based and
/// numbered by first appearance in leaf_order().
std::vector<int> cut_tree(const Dendrogram& tree, double threshold);

/// Labels per row; throws std::invalid_argument when cut_threshold <= 0.
std::vector<int> cluster_series(const ConstraintMatrix& rows, Linkage linkage, Metric metric,
                                double cut_threshold);

}  // namespace procdrift
