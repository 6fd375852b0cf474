#include "procdrift/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace procdrift {

namespace {

inline std::size_t condensed_index(std::size_t n, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return n * i - i * (i + 1) / 2 + (j - i - 1);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
};

}  // namespace

std::string_view to_string(Linkage l) { return l == Linkage::ward ? "ward" : "weighted"; }
std::string_view to_string(Metric m) {
  return m == Metric::euclidean ? "euclidean" : "correlation";
}

std::optional<Linkage> parse_linkage(std::string_view s) {
  if (s == "ward") return Linkage::ward;
  if (s == "weighted") return Linkage::weighted;
  return std::nullopt;
}

std::optional<Metric> parse_metric(std::string_view s) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "correlation") return Metric::correlation;
  return std::nullopt;
}

double series_distance(const Eigen::Ref<const SeriesVector<double>>& x,
                       const Eigen::Ref<const SeriesVector<double>>& y, Metric metric) {
  if (metric == Metric::euclidean) return (x - y).norm();
  const auto xc = (x.array() - x.mean()).matrix();
  const auto yc = (y.array() - y.mean()).matrix();
  const double nx = xc.norm();
  const double ny = yc.norm();
  if (nx == 0.0 || ny == 0.0) return (nx == 0.0 && ny == 0.0) ? 0.0 : 1.0;
  return std::max(0.0, 1.0 - xc.dot(yc) / (nx * ny));
}

std::vector<double> pairwise_distances(const ConstraintMatrix& rows, Metric metric) {
  const auto n = static_cast<std::size_t>(rows.rows());
  std::vector<double> out(n * (n - (n > 0 ? 1 : 0)) / 2);
  if (metric == Metric::euclidean) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        out[condensed_index(n, i, j)] = (rows.row(i) - rows.row(j)).norm();
    return out;
  }
  ConstraintMatrix centered = rows.colwise() - rows.rowwise().mean();
  const SeriesVector<double> norms = centered.rowwise().norm();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d;
      if (norms[i] == 0.0 || norms[j] == 0.0) {
        d = (norms[i] == 0.0 && norms[j] == 0.0) ? 0.0 : 1.0;
      } else {
        d = std::max(0.0, 1.0 - centered.row(i).dot(centered.row(j)) / (norms[i] * norms[j]));
      }
      out[condensed_index(n, i, j)] = d;
    }
  return out;
}

Dendrogram hierarchical_linkage(const ConstraintMatrix& rows, Linkage linkage, Metric metric) {
  const auto n = static_cast<std::size_t>(rows.rows());
  Dendrogram tree;
  tree.leaves = static_cast<int>(n);
  if (n < 2) return tree;

  std::vector<double> dist = pairwise_distances(rows, metric);
  std::vector<int> size(n, 1);
  auto d = [&](std::size_t i, std::size_t j) -> double& { return dist[condensed_index(n, i, j)]; };

  struct RawMerge {
    int x, y;
    double height;
  };
  std::vector<RawMerge> raw;
  raw.reserve(n - 1);
  std::vector<std::size_t> chain;
  chain.reserve(n);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    if (chain.empty()) {
      std::size_t first = 0;
      while (size[first] == 0) ++first;
      chain.push_back(first);
    }
    std::size_t x = 0, y = 0;
    double best = 0.0;
    while (true) {
      x = chain.back();
      bool has_prev = chain.size() >= 2;
      y = has_prev ? chain[chain.size() - 2] : n;
      best = has_prev ? d(x, y) : std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (size[i] == 0 || i == x) continue;
        double di = d(x, i);
        if (di < best) {
          best = di;
          y = i;
        }
      }
      if (has_prev && y == chain[chain.size() - 2]) break;
      chain.push_back(y);
    }
    chain.pop_back();
    chain.pop_back();
    if (x > y) std::swap(x, y);

    const double nx = size[x], ny = size[y];
    raw.push_back({static_cast<int>(x), static_cast<int>(y), best});
    size[x] = 0;
    size[y] = static_cast<int>(nx + ny);
    for (std::size_t i = 0; i < n; ++i) {
      if (size[i] == 0 || i == y) continue;
      const double dxi = d(x, i), dyi = d(y, i);
      double updated;
      if (linkage == Linkage::ward) {
        const double ni = size[i];
        const double t = 1.0 / (nx + ny + ni);
        updated = std::sqrt(std::max(
            0.0, (ni + nx) * t * dxi * dxi + (ni + ny) * t * dyi * dyi - ni * t * best * best));
      } else {
        updated = 0.5 * (dxi + dyi);
      }
      d(y, i) = updated;
    }
  }

  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawMerge& a, const RawMerge& b) { return a.height < b.height; });

  // Relabel chain merges (expressed on representative leaves) into cluster ids.
  UnionFind uf(2 * n - 1);
  std::vector<int> members(2 * n - 1, 1);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    int a = uf.find(raw[i].x), b = uf.find(raw[i].y);
    if (a > b) std::swap(a, b);
    const int id = static_cast<int>(n + i);
    uf.parent[a] = id;
    uf.parent[b] = id;
    members[id] = members[a] + members[b];
    tree.merges.push_back({a, b, raw[i].height, members[id]});
  }
  return tree;
}

std::vector<int> leaf_order(const Dendrogram& tree) {
  std::vector<int> order;
  if (tree.leaves == 0) return order;
  if (tree.merges.empty()) return {0};
  std::vector<int> stack{tree.leaves + static_cast<int>(tree.merges.size()) - 1};
  while (!stack.empty()) {
    int node = stack.back();
    stack.pop_back();
    if (node < tree.leaves) {
      order.push_back(node);
      continue;
    }
    const auto& m = tree.merges[node - tree.leaves];
    stack.push_back(m.right);
    stack.push_back(m.left);
  }
  return order;
}

std::vector<int> cut_tree(const Dendrogram& tree, double threshold) {
  const auto n = static_cast<std::size_t>(tree.leaves);
  UnionFind uf(2 * n);
  for (std::size_t i = 0; i < tree.merges.size(); ++i) {
    if (tree.merges[i].height > threshold) continue;
    const int id = static_cast<int>(n + i);
    uf.parent[uf.find(tree.merges[i].left)] = id;
    uf.parent[uf.find(tree.merges[i].right)] = id;
  }
  std::vector<int> labels(n, -1);
  std::vector<int> label_of_root(2 * n, -1);
  int next = 0;
  for (int leaf : leaf_order(tree)) {
    int root = uf.find(leaf);
    if (label_of_root[root] < 0) label_of_root[root] = next++;
    labels[leaf] = label_of_root[root];
  }
  return labels;
}

std::vector<int> cluster_series(const ConstraintMatrix& rows, Linkage linkage, Metric metric,
                                double cut_threshold) {
  if (!(cut_threshold > 0.0)) throw std::invalid_argument("cut_threshold must be positive");
  return cut_tree(hierarchical_linkage(rows, linkage, metric), cut_threshold);
}

}  // namespace procdrift
