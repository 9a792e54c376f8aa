#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "subtreeopt/tree.hpp"

namespace subtreeopt {

// Exact cutoff num/den with den > 0. Comparisons against node ratios are done
// by cross-multiplication, so integer-valued inputs stay exact.
struct Ratio {
  double num = 0;
  double den = 1;

  double to_double() const { return num / den; }
};

struct DecisionResult {
  bool answer = false;
  PruneSet prune;           // maximal subtree roots removed by the procedure
  double root_subprofit = 0;  // sums over the nodes the procedure kept
  double root_subcost = 0;
};

namespace detail {

// Bottom-up cutoff test: a node stays when the mean of it plus its kept
// descendants clears the cutoff. Single post-order pass, no recursion.
inline DecisionResult decide_cutoff(const RootedTree& t, Ratio cutoff,
                                    bool strict) {
  if (!(cutoff.den > 0) || !std::isfinite(cutoff.num) ||
      !std::isfinite(cutoff.den))
    throw PreconditionError("cutoff must be finite with positive denominator");
  if (!t.all_costs_positive())
    throw PreconditionError("decision requires strictly positive costs");

  const NodeId n = t.node_count();
  std::vector<double> subprofit(n), subcost(n);
  std::vector<char> kept(n, 0);
  for (NodeId u : t.postorder()) {
    double p = t.value_a(u);
    double c = t.value_b(u);
    for (NodeId ch : t.children(u)) {
      if (kept[ch]) {
        p += subprofit[ch];
        c += subcost[ch];
      }
    }
    subprofit[u] = p;
    subcost[u] = c;
    // p/c >= num/den  <=>  p*den >= num*c  (c > 0, den > 0)
    double lhs = p * cutoff.den;
    double rhs = cutoff.num * c;
    kept[u] = strict ? lhs > rhs : lhs >= rhs;
  }

  DecisionResult r;
  r.answer = kept[0];
  r.root_subprofit = subprofit[0];
  r.root_subcost = subcost[0];
  // Maximal pruned nodes: pruned children of kept nodes (the root always
  // counts as kept for reporting purposes).
  std::vector<NodeId> stack{0};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId ch : t.children(u)) {
      if (kept[ch])
        stack.push_back(ch);
      else
        r.prune.roots.push_back(ch);
    }
  }
  r.prune.normalize();
  return r;
}

}  // namespace detail

inline DecisionResult has_average_at_least(const RootedTree& t, Ratio cutoff) {
  return detail::decide_cutoff(t, cutoff, /*strict=*/false);
}

inline DecisionResult has_average_at_least(const RootedTree& t, double cutoff) {
  return has_average_at_least(t, Ratio{cutoff, 1});
}

inline DecisionResult has_average_greater_than(const RootedTree& t,
                                               Ratio cutoff) {
  return detail::decide_cutoff(t, cutoff, /*strict=*/true);
}

inline DecisionResult has_average_greater_than(const RootedTree& t,
                                               double cutoff) {
  return has_average_greater_than(t, Ratio{cutoff, 1});
}

}  // namespace subtreeopt
