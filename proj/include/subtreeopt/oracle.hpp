#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subtreeopt/decision.hpp"
#include "subtreeopt/tree.hpp"

namespace subtreeopt {
namespace oracle {

inline constexpr std::int64_t kEnumerationGuard = 1'000'000;

struct SubtreeInfo {
  PruneSet prune;
  double sum_a = 0;
  double sum_b = 0;
  int node_count = 0;
};

using SubtreeEnumeration = std::vector<SubtreeInfo>;

// Number of root-containing subtrees: product over children of
// (1 + count(child)), saturating at `cap`.
inline std::int64_t count_subtrees(const RootedTree& t,
                                   std::int64_t cap = kEnumerationGuard) {
  std::vector<std::int64_t> cnt(t.node_count(), 1);
  for (NodeId u : t.postorder()) {
    std::int64_t c = 1;
    for (NodeId ch : t.children(u)) {
      if (c > cap / (1 + cnt[ch]) + 1) return cap + 1;
      c *= 1 + cnt[ch];
      if (c > cap) return cap + 1;
    }
    cnt[u] = c;
  }
  return cnt[0];
}

// Every root-containing subtree, as (prune set, value sums, node count).
// Children-before-parents construction, so deep trees are fine as long as
// the count guard holds.
inline SubtreeEnumeration enumerate_subtrees(const RootedTree& t) {
  if (count_subtrees(t) > kEnumerationGuard)
    throw PreconditionError("subtree enumeration exceeds guard of " +
                            std::to_string(kEnumerationGuard));

  std::vector<SubtreeEnumeration> options(t.node_count());
  for (NodeId u : t.postorder()) {
    SubtreeEnumeration opts;
    opts.push_back({PruneSet{}, t.value_a(u), t.value_b(u), 1});
    for (NodeId ch : t.children(u)) {
      SubtreeEnumeration combined;
      combined.reserve(opts.size() * (options[ch].size() + 1));
      for (const SubtreeInfo& base : opts) {
        SubtreeInfo omitted = base;
        omitted.prune.roots.push_back(ch);
        combined.push_back(std::move(omitted));
        for (const SubtreeInfo& sub : options[ch]) {
          SubtreeInfo merged = base;
          merged.sum_a += sub.sum_a;
          merged.sum_b += sub.sum_b;
          merged.node_count += sub.node_count;
          merged.prune.roots.insert(merged.prune.roots.end(),
                                    sub.prune.roots.begin(),
                                    sub.prune.roots.end());
          combined.push_back(std::move(merged));
        }
      }
      opts = std::move(combined);
      options[ch].clear();
      options[ch].shrink_to_fit();
    }
    options[u] = std::move(opts);
  }
  SubtreeEnumeration result = std::move(options[0]);
  for (SubtreeInfo& s : result) s.prune.normalize();
  return result;
}

struct BruteMaxMean {
  double optavg = 0;
  Ratio ratio;
  PruneSet prune;
};

// Argmax of sum_a/sum_b by exhaustive enumeration, cross-multiplied
// comparisons. Ties go to fewer nodes, then lexicographically smaller
// prune set.
inline BruteMaxMean brute_max_mean(const RootedTree& t) {
  if (!t.all_costs_positive())
    throw PreconditionError("brute_max_mean requires strictly positive costs");
  SubtreeEnumeration all = enumerate_subtrees(t);
  const SubtreeInfo* best = &all.front();
  for (const SubtreeInfo& s : all) {
    double lhs = s.sum_a * best->sum_b;
    double rhs = best->sum_a * s.sum_b;
    if (lhs > rhs ||
        (lhs == rhs && (s.node_count < best->node_count ||
                        (s.node_count == best->node_count &&
                         s.prune.roots < best->prune.roots))))
      best = &s;
  }
  BruteMaxMean r;
  r.ratio = Ratio{best->sum_a, best->sum_b};
  r.optavg = r.ratio.to_double();
  r.prune = best->prune;
  return r;
}

// max over subtrees of sum_a * lambda + sum_b, one value per sample point.
inline std::vector<double> brute_envelope(const RootedTree& t,
                                          std::span<const double> lambdas) {
  SubtreeEnumeration all = enumerate_subtrees(t);
  std::vector<double> out;
  out.reserve(lambdas.size());
  for (double lam : lambdas) {
    double best = all.front().sum_a * lam + all.front().sum_b;
    for (const SubtreeInfo& s : all)
      best = std::max(best, s.sum_a * lam + s.sum_b);
    out.push_back(best);
  }
  return out;
}

struct SubsetSumInstance {
  std::vector<std::int64_t> values;  // positive integers
  std::int64_t target = 0;           // positive
};

// Star gadget: root (profit 1, cost target + offset), one leaf per value
// with profit 0 and cost -value. A subset summing to the target drives the
// total cost to the offset; with offset 0 the mean is unbounded. Leaf costs
// are negative, so the fast solvers refuse these trees by design; only the
// enumerator consumes them.
inline RootedTree gadget_from_subset_sum(const SubsetSumInstance& inst,
                                         double root_cost_offset = 0) {
  if (inst.values.empty() || inst.target <= 0)
    throw PreconditionError("subset-sum instance needs values and target > 0");
  for (std::int64_t v : inst.values)
    if (v <= 0) throw PreconditionError("subset-sum values must be positive");
  auto n = static_cast<NodeId>(inst.values.size() + 1);
  std::vector<NodeId> parents(n, 0);
  std::vector<double> a(n, 0), b(n, 0);
  parents[0] = kNoParent;
  a[0] = 1;
  b[0] = static_cast<double>(inst.target) + root_cost_offset;
  for (std::size_t i = 0; i < inst.values.size(); ++i)
    b[i + 1] = -static_cast<double>(inst.values[i]);
  return RootedTree::from_parents(parents, a, b);
}

// Star instance whose parametric breakpoints are exactly the sorted input
// values: root (0,0), one leaf per value with slope 1 and intercept -value.
inline RootedTree sorting_instance(std::span<const double> values) {
  if (values.empty())
    throw PreconditionError("sorting instance needs at least one value");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i] > 0))
      throw PreconditionError("sorting instance values must be positive");
    if (i > 0 && sorted[i] == sorted[i - 1])
      throw PreconditionError("sorting instance values must be distinct");
  }
  auto n = static_cast<NodeId>(values.size() + 1);
  std::vector<NodeId> parents(n, 0);
  std::vector<double> a(n, 0), b(n, 0);
  parents[0] = kNoParent;
  for (std::size_t i = 0; i < values.size(); ++i) {
    a[i + 1] = 1;
    b[i + 1] = -values[i];
  }
  return RootedTree::from_parents(parents, a, b);
}

}  // namespace oracle
}  // namespace subtreeopt
