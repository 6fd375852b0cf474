#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "procdrift/cluster.hpp"

using namespace procdrift;

namespace {

/// Greedy O(n^3) agglomeration. Ward heights come from centroids
/// (sqrt(2|A||B|/(|A|+|B|)) * |cA - cB|), not from a distance update.
struct NaiveResult {
  std::vector<double> heights;
};

NaiveResult naive_cluster(const ConstraintMatrix& rows, Linkage linkage, Metric metric) {
  const int n = static_cast<int>(rows.rows());
  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) members[i] = {i};
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d[i][j] = series_distance(rows.row(i).transpose(), rows.row(j).transpose(), metric);
  std::vector<bool> alive(n, true);
  auto centroid = [&](int c) {
    SeriesVector<double> acc = SeriesVector<double>::Zero(rows.cols());
    for (int m : members[c]) acc += rows.row(m).transpose();
    return SeriesVector<double>(acc / double(members[c].size()));
  };
  auto dist = [&](int a, int b) {
    if (linkage == Linkage::ward && metric == Metric::euclidean) {
      const double na = members[a].size(), nb = members[b].size();
      return std::sqrt(2 * na * nb / (na + nb)) * (centroid(a) - centroid(b)).norm();
    }
    return d[a][b];
  };
  NaiveResult out;
  for (int step = 0; step + 1 < n; ++step) {
    int ba = -1, bb = -1;
    double best = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        if (!alive[a] || !alive[b]) continue;
        double v = dist(a, b);
        if (ba < 0 || v < best) best = v, ba = a, bb = b;
      }
    out.heights.push_back(best);
    // Lance-Williams for the matrix route.
    for (int c = 0; c < n; ++c) {
      if (!alive[c] || c == ba || c == bb) continue;
      double v;
      if (linkage == Linkage::weighted) {
        v = (d[ba][c] + d[bb][c]) / 2;
      } else {
        const double na = members[ba].size(), nb = members[bb].size(), nc = members[c].size();
        const double t = na + nb + nc;
        v = std::sqrt(std::max(0.0, ((na + nc) * d[ba][c] * d[ba][c] + (nb + nc) * d[bb][c] * d[bb][c] -
                                     nc * best * best) / t));
      }
      d[ba][c] = d[c][ba] = v;
    }
    members[ba].insert(members[ba].end(), members[bb].begin(), members[bb].end());
    alive[bb] = false;
  }
  std::sort(out.heights.begin(), out.heights.end());
  return out;
}

/// Relabel by first appearance in row order.
std::vector<int> canonical(const std::vector<int>& labels) {
  std::map<int, int> seen;
  std::vector<int> out;
  for (int l : labels) out.push_back(seen.emplace(l, int(seen.size())).first->second);
  return out;
}

std::vector<int> partition_from_heights(const Dendrogram& t, double threshold) {
  return canonical(cut_tree(t, threshold));
}

ConstraintMatrix random_rows(std::mt19937_64& rng, int n, int w) {
  std::uniform_real_distribution<double> u(0, 1);
  ConstraintMatrix m(n, w);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

}  // namespace

TEST_CASE("exact cut boundary between two constant rows") {
  const int win = 39;
  ConstraintMatrix m(2, win);
  m.row(0).setConstant(0.2);
  m.row(1).setConstant(0.9);
  const double d = 0.7 * std::sqrt(double(win));
  CHECK(series_distance(m.row(0).transpose(), m.row(1).transpose(), Metric::euclidean) ==
        doctest::Approx(d).epsilon(1e-14));
  auto tree = hierarchical_linkage(m, Linkage::ward, Metric::euclidean);
  REQUIRE(tree.merges.size() == 1);
  CHECK(tree.merges[0].height == doctest::Approx(d).epsilon(1e-14));
  CHECK(cut_tree(tree, d * (1 + 1e-9)) == std::vector<int>{0, 0});
  CHECK(cut_tree(tree, d * (1 - 1e-9)) == std::vector<int>{0, 1});
}

TEST_CASE("similar series share a cluster") {
  ConstraintMatrix m(2, 5);
  m << 0.2, 0.8, 0.9, 0.8, 0.9,
       0.23, 0.8, 0.9, 0.9, 0.9;
  const double d = std::sqrt(0.03 * 0.03 + 0.1 * 0.1);
  CHECK(d == doctest::Approx(0.104).epsilon(0.01));
  for (double t : {0.11, 0.5, 3.0}) CHECK(cluster_series(m, Linkage::ward, Metric::euclidean, t) == std::vector<int>{0, 0});
  CHECK(cluster_series(m, Linkage::ward, Metric::euclidean, 0.1) == std::vector<int>{0, 1});
}

TEST_CASE("single row") {
  ConstraintMatrix m = ConstraintMatrix::Constant(1, 4, 0.5);
  CHECK(cluster_series(m, Linkage::weighted, Metric::correlation, 1.0) == std::vector<int>{0});
  CHECK(hierarchical_linkage(m, Linkage::ward, Metric::euclidean).merges.empty());
}

TEST_CASE("bad threshold") {
  ConstraintMatrix m = ConstraintMatrix::Constant(2, 4, 0.5);
  CHECK_THROWS_AS(cluster_series(m, Linkage::ward, Metric::euclidean, 0.0), std::invalid_argument);
}

TEST_CASE("nearest-neighbour chain matches greedy agglomeration") {
  std::mt19937_64 rng(5);
  for (auto linkage : {Linkage::ward, Linkage::weighted}) {
    for (auto metric : {Metric::euclidean, Metric::correlation}) {
      for (int rep = 0; rep < 40; ++rep) {
        const int n = 2 + int(rng() % 25);
        auto m = random_rows(rng, n, 3 + int(rng() % 10));
        auto tree = hierarchical_linkage(m, linkage, metric);
        auto naive = naive_cluster(m, linkage, metric);
        REQUIRE(tree.merges.size() == naive.heights.size());
        for (std::size_t i = 0; i < naive.heights.size(); ++i) {
          CHECK(tree.merges[i].height == doctest::Approx(naive.heights[i]).epsilon(1e-9));
          if (i) CHECK(tree.merges[i].height >= tree.merges[i - 1].height);
        }
        CHECK(tree.merges.back().size == n);
        // every merge height is a cut point: one cluster fewer above it
        for (std::size_t i = 0; i + 1 < naive.heights.size(); ++i) {
          if (naive.heights[i + 1] - naive.heights[i] < 1e-7) continue;
          const double t = (naive.heights[i] + naive.heights[i + 1]) / 2;
          auto labels = partition_from_heights(tree, t);
          CHECK(*std::max_element(labels.begin(), labels.end()) == n - 2 - int(i));
        }
      }
    }
  }
}

TEST_CASE("leaf order and labels") {
  ConstraintMatrix m(4, 3);
  m << 0, 0, 0,
       1, 1, 1,
       0, 0, 0.1,
       1, 1, 0.9;
  auto tree = hierarchical_linkage(m, Linkage::ward, Metric::euclidean);
  auto order = leaf_order(tree);
  CHECK(order.size() == 4);
  auto labels = cut_tree(tree, 0.5);
  CHECK(labels[0] == labels[2]);
  CHECK(labels[1] == labels[3]);
  CHECK(labels[0] != labels[1]);
  CHECK(labels[order[0]] == 0);
}

TEST_CASE("correlation distance") {
  SeriesVector<double> x(4), y(4), flat(4);
  x << 0, 1, 0, 1;
  y << 1, 0, 1, 0;
  flat << 0.5, 0.5, 0.5, 0.5;
  CHECK(series_distance(x, x, Metric::correlation) == doctest::Approx(0.0));
  CHECK(series_distance(x, y, Metric::correlation) == doctest::Approx(2.0));
  CHECK(series_distance(flat, flat, Metric::correlation) == 0.0);
  CHECK(series_distance(flat, x, Metric::correlation) == 1.0);
  CHECK(parse_linkage("ward") == Linkage::ward);
  CHECK_FALSE(parse_metric("cosine"));
}
