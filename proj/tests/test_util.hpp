#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "subtreeopt/tree.hpp"

namespace subtreeopt::testutil {

// Uniform random recursive tree: parent of node i drawn from [0, i).
inline RootedTree random_tree(std::mt19937_64& rng, int n, int profit_lo,
                              int profit_hi, int cost_lo, int cost_hi) {
  std::vector<NodeId> parents(n);
  std::vector<double> a(n), b(n);
  parents[0] = kNoParent;
  std::uniform_int_distribution<int> pd(profit_lo, profit_hi);
  std::uniform_int_distribution<int> cd(cost_lo, cost_hi);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> up(0, i - 1);
    parents[i] = up(rng);
  }
  for (int i = 0; i < n; ++i) {
    a[i] = pd(rng);
    b[i] = cd(rng);
  }
  return RootedTree::from_parents(parents, a, b);
}

inline RootedTree path_tree(const std::vector<std::pair<double, double>>& vals) {
  std::vector<NodeId> parents(vals.size());
  std::vector<double> a(vals.size()), b(vals.size());
  parents[0] = kNoParent;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i > 0) parents[i] = static_cast<NodeId>(i - 1);
    a[i] = vals[i].first;
    b[i] = vals[i].second;
  }
  return RootedTree::from_parents(parents, a, b);
}

inline RootedTree star_tree(std::pair<double, double> root,
                            const std::vector<std::pair<double, double>>& leaves) {
  std::vector<NodeId> parents(leaves.size() + 1, 0);
  std::vector<double> a(leaves.size() + 1), b(leaves.size() + 1);
  parents[0] = kNoParent;
  a[0] = root.first;
  b[0] = root.second;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    a[i + 1] = leaves[i].first;
    b[i + 1] = leaves[i].second;
  }
  return RootedTree::from_parents(parents, a, b);
}

// Convex hull vertex set of integer points, strictly convex turns only
// (collinear interior points dropped). Exact arithmetic.
inline std::vector<std::pair<long long, long long>> hull_vertices(
    std::vector<std::pair<long long, long long>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return pts;
  auto cross = [](const std::pair<long long, long long>& o,
                  const std::pair<long long, long long>& a,
                  const std::pair<long long, long long>& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<long long, long long>> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {  // lower
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {  // upper
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  return h;
}

}  // namespace subtreeopt::testutil
