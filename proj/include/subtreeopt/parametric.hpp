#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "subtreeopt/plf.hpp"
#include "subtreeopt/tree.hpp"

namespace subtreeopt {

// One linear piece of the output function F: on [lambda_start, lambda_end)
// the optimal subtree has value sums (slope, intercept), i.e.
// F(lambda) = slope*lambda + intercept.
struct EnvelopeSegment {
  double lambda_start = 0;
  double lambda_end = std::numeric_limits<double>::infinity();
  double slope = 0;
  double intercept = 0;
};

enum class EventKind { kPrune, kUnprune };

struct PruneEvent {
  double lambda = 0;
  NodeId node = 0;
  EventKind kind = EventKind::kPrune;
};

struct ParametricOptions {
  // Clamp the root function at zero as well. The default keeps the
  // unclamped root function, whose segments correspond one-to-one to
  // actual root-containing subtrees even when their weight is negative.
  bool clamp_root = false;
};

struct ParametricSolution {
  std::vector<EnvelopeSegment> envelope;
  std::size_t breakpoint_count = 0;  // interior envelope breakpoints
  std::vector<PruneEvent> events;    // zeros of the per-node functions

  double value_at(double lambda) const {
    // last segment with lambda_start <= lambda
    auto it = std::upper_bound(
        envelope.begin(), envelope.end(), lambda,
        [](double l, const EnvelopeSegment& s) { return l < s.lambda_start; });
    const EnvelopeSegment& s = *std::prev(it);
    return s.slope * lambda + s.intercept;
  }
};

// Computes F(lambda), the weight of the maximum root-containing subtree for
// every lambda >= 0, where node i weighs a_i*lambda + b_i. Post-order
// accumulation of per-node piecewise linear functions; each non-root node's
// function is clamped at zero, which is exactly the prune decision.
// O(n log n).
inline ParametricSolution solve_parametric(const RootedTree& t,
                                           ParametricOptions opts = {}) {
  std::vector<Plf> fns(t.node_count());
  std::vector<PruneEvent> events;
  for (NodeId u : t.postorder()) {
    Plf f = Plf::create(0, t.value_a(u), t.value_b(u));
    for (NodeId c : t.children(u)) f = add(std::move(f), std::move(fns[c]));
    if (u != 0 || opts.clamp_root) {
      TrimInfo ti = f.trim();
      if (u != 0 && ti.clipped) {
        if (ti.lcx > 0) events.push_back({ti.lcx, u, EventKind::kPrune});
        if (std::isfinite(ti.rcx))
          events.push_back({ti.rcx, u, EventKind::kUnprune});
      }
    }
    fns[u] = std::move(f);
  }

  ParametricSolution sol;
  auto segs = fns[0].segments();
  sol.envelope.reserve(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    EnvelopeSegment e;
    e.lambda_start = segs[i].x_start;
    e.lambda_end = i + 1 < segs.size()
                       ? segs[i + 1].x_start
                       : std::numeric_limits<double>::infinity();
    e.slope = segs[i].slope;
    e.intercept = segs[i].intercept;
    sol.envelope.push_back(e);
  }
  sol.breakpoint_count = sol.envelope.size() - 1;

  std::sort(events.begin(), events.end(),
            [](const PruneEvent& a, const PruneEvent& b) {
              if (a.lambda != b.lambda) return a.lambda < b.lambda;
              if (a.node != b.node) return a.node < b.node;
              return static_cast<int>(a.kind) < static_cast<int>(b.kind);
            });
  sol.events = std::move(events);
  return sol;
}

// Optimal subtree for one fixed lambda: keep a child exactly when its
// subtree contributes positive weight. O(n).
inline std::pair<PruneSet, double> max_subtree_at(const RootedTree& t,
                                                  double lambda) {
  if (!std::isfinite(lambda) || lambda < 0)
    throw PreconditionError("max_subtree_at: lambda must be finite and >= 0");
  std::vector<double> contrib(t.node_count());
  for (NodeId u : t.postorder()) {
    double w = t.value_a(u) * lambda + t.value_b(u);
    for (NodeId c : t.children(u))
      if (contrib[c] > 0) w += contrib[c];
    contrib[u] = w;
  }
  PruneSet prune;
  std::vector<NodeId> stack{0};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId c : t.children(u)) {
      if (contrib[c] > 0)
        stack.push_back(c);
      else
        prune.roots.push_back(c);
    }
  }
  prune.normalize();
  return {std::move(prune), contrib[0]};
}

// The at most 2 zeros of each node's clamped function, in lambda order:
// where a node's contribution crosses below zero it gets pruned, where it
// crosses back it returns.
inline std::vector<PruneEvent> prune_event_sequence(const RootedTree& t) {
  return solve_parametric(t).events;
}

}  // namespace subtreeopt
