#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "subtreeopt/decision.hpp"
#include "subtreeopt/tree.hpp"

namespace subtreeopt {

struct MaxMeanOptions {
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  // Median-of-medians instead of randomized quickselect. Worst-case linear,
  // noticeably larger constant.
  bool deterministic_median = false;
};

struct MaxMeanIteration {
  std::int64_t live = 0;      // live contracted nodes at iteration start
  std::int64_t in_range = 0;  // of those, values inside (low, high)
  std::int64_t touched = 0;   // nodes the iteration operated on
};

struct MaxMeanResult {
  double optavg = 0;
  Ratio optavg_ratio;  // exact profit/cost pair of the fully contracted root
  PruneSet prune;
  int iterations = 0;
  std::vector<MaxMeanIteration> trace;
  std::int64_t final_live = 0;
  std::int64_t final_in_range = 0;
  std::int64_t total_touched = 0;
};

namespace detail {

inline bool ratio_less(const Ratio& x, const Ratio& y) {
  return x.num * y.den < y.num * x.den;
}

// k-th smallest (0-based) under cross-multiplied comparison, in place.
inline Ratio quickselect(std::vector<Ratio>& v, std::size_t k,
                         std::mt19937_64& rng) {
  std::size_t lo = 0, hi = v.size();
  while (true) {
    if (hi - lo <= 8) {
      std::sort(v.begin() + lo, v.begin() + hi,
                [](const Ratio& x, const Ratio& y) { return ratio_less(x, y); });
      return v[k];
    }
    std::uniform_int_distribution<std::size_t> dist(lo, hi - 1);
    Ratio pivot = v[dist(rng)];
    // three-way partition around pivot
    std::size_t lt = lo, i = lo, gt = hi;
    while (i < gt) {
      if (ratio_less(v[i], pivot))
        std::swap(v[i++], v[lt++]);
      else if (ratio_less(pivot, v[i]))
        std::swap(v[i], v[--gt]);
      else
        ++i;
    }
    if (k < lt)
      hi = lt;
    else if (k < gt)
      return v[k];
    else
      lo = gt;
  }
}

inline Ratio mom_select(std::vector<Ratio>& v, std::size_t k);

inline Ratio mom_pivot(std::vector<Ratio>& v) {
  std::vector<Ratio> medians;
  medians.reserve(v.size() / 5 + 1);
  for (std::size_t i = 0; i < v.size(); i += 5) {
    std::size_t j = std::min(i + 5, v.size());
    std::sort(v.begin() + i, v.begin() + j,
              [](const Ratio& x, const Ratio& y) { return ratio_less(x, y); });
    medians.push_back(v[i + (j - i - 1) / 2]);
  }
  return mom_select(medians, (medians.size() - 1) / 2);
}

inline Ratio mom_select(std::vector<Ratio>& v, std::size_t k) {
  while (true) {
    if (v.size() <= 10) {
      std::sort(v.begin(), v.end(),
                [](const Ratio& x, const Ratio& y) { return ratio_less(x, y); });
      return v[k];
    }
    Ratio pivot = mom_pivot(v);
    std::vector<Ratio> less, equal, greater;
    for (const Ratio& x : v) {
      if (ratio_less(x, pivot))
        less.push_back(x);
      else if (ratio_less(pivot, x))
        greater.push_back(x);
      else
        equal.push_back(x);
    }
    if (k < less.size()) {
      v = std::move(less);
    } else if (k < less.size() + equal.size()) {
      return pivot;
    } else {
      k -= less.size() + equal.size();
      v = std::move(greater);
    }
  }
}

}  // namespace detail

// Mutable contraction state: live nodes carry merged profit/cost sums and a
// linked child structure, plus the (low, high) bounds the optimum is known
// to lie within. The merge and prune rules only ever discard options that
// provably miss the optimum, so the contracted tree keeps the original
// optimal mean at all times.
class ContractionState {
 public:
  explicit ContractionState(const RootedTree& t, MaxMeanOptions opts = {})
      : rng_(opts.seed), deterministic_(opts.deterministic_median) {
    if (!t.all_costs_positive())
      throw PreconditionError("max-mean requires strictly positive costs");
    const NodeId n = t.node_count();
    profit_.assign(t.values_a().begin(), t.values_a().end());
    cost_.assign(t.values_b().begin(), t.values_b().end());
    parent_.resize(n);
    first_child_.assign(n, kNoParent);
    next_sib_.assign(n, kNoParent);
    prev_sib_.assign(n, kNoParent);
    live_.assign(n, 1);
    kept_.assign(n, 0);
    sub_p_.assign(n, 0);
    sub_c_.assign(n, 0);
    live_count_ = n;
    for (NodeId v = 0; v < n; ++v) {
      parent_[v] = t.parent(v);
      auto kids = t.children(v);
      NodeId prev = kNoParent;
      for (NodeId c : kids) {
        if (prev == kNoParent)
          first_child_[v] = c;
        else
          next_sib_[prev] = c;
        prev_sib_[c] = prev;
        prev = c;
      }
    }
    live_list_.resize(n);
    for (NodeId v = 0; v < n; ++v) live_list_[v] = v;

    // Initial bounds strictly outside every node value.
    NodeId lo = 0, hi = 0;
    for (NodeId v = 1; v < n; ++v) {
      if (detail::ratio_less(node_value(v), node_value(lo))) lo = v;
      if (detail::ratio_less(node_value(hi), node_value(v))) hi = v;
    }
    low_ = Ratio{profit_[lo] - cost_[lo], cost_[lo]};
    high_ = Ratio{profit_[hi] + cost_[hi], cost_[hi]};
  }

  bool root_has_children() const { return first_child_[0] != kNoParent; }
  Ratio low() const { return low_; }
  Ratio high() const { return high_; }
  // Overrides the bounds; the caller asserts that the optimum stays within
  // [low, high]. Meant for harnesses and diagnostics.
  void set_bounds(Ratio low, Ratio high) {
    low_ = low;
    high_ = high;
  }
  bool is_live(NodeId v) const { return live_[v] != 0; }
  Ratio node_value(NodeId v) const { return Ratio{profit_[v], cost_[v]}; }
  Ratio root_value() const { return Ratio{profit_[0], cost_[0]}; }
  std::int64_t live_count() const { return live_count_; }

  std::int64_t in_range_count() {
    compact_live_list();
    std::int64_t r = 0;
    for (NodeId v : live_list_)
      if (in_range(v)) ++r;
    return r;
  }

  // Finds the median of the in-range node values, runs the cutoff decision
  // on the contracted tree at that median, and moves the matching bound.
  // Returns the number of in-range nodes it saw.
  std::int64_t shrink_range() {
    compact_live_list();
    scratch_ratios_.clear();
    for (NodeId v : live_list_)
      if (in_range(v)) scratch_ratios_.push_back(node_value(v));
    if (scratch_ratios_.empty())
      throw std::logic_error("shrink_range: no in-range nodes");
    auto k = (scratch_ratios_.size() - 1) / 2;
    Ratio median = deterministic_ ? detail::mom_select(scratch_ratios_, k)
                                  : detail::quickselect(scratch_ratios_, k, rng_);
    if (decide_contracted(median))
      low_ = median;
    else
      high_ = median;
    return static_cast<std::int64_t>(scratch_ratios_.size());
  }

  // One merge/prune sweep, children before parents. Afterwards every live
  // leaf and every live single-child node sits inside (low, high), and no
  // non-root node sits at or above high.
  void contraction_pass() {
    collect_postorder();
    for (auto it = post_.rbegin(); it != post_.rend(); ++it) {
      NodeId u = *it;
      if (!live_[u]) continue;
      while (true) {
        if (u != 0 && value_ge_high(u)) {
          merge_child_into_parent(parent_[u], u);
          break;
        }
        NodeId fc = first_child_[u];
        if (u != 0 && fc == kNoParent && value_le_low(u)) {
          prune_leaf(u);
          break;
        }
        // Single-child low nodes absorb their child. A non-root node may sit
        // exactly at low: if the optimum cut below it, deleting it as well
        // stays optimal. The root cannot be deleted, so at equality the
        // root-only subtree could be the unique optimum and merging would
        // destroy it; the root therefore requires strictly below low.
        if (fc != kNoParent && next_sib_[fc] == kNoParent &&
            (u == 0 ? value_lt_low(u) : value_le_low(u))) {
          merge_child_into_parent(u, fc);
          continue;  // value and children changed, re-check the rules
        }
        break;
      }
    }
  }

 private:
  bool value_le_low(NodeId v) const {
    return profit_[v] * low_.den <= low_.num * cost_[v];
  }
  bool value_lt_low(NodeId v) const {
    return profit_[v] * low_.den < low_.num * cost_[v];
  }
  bool value_ge_high(NodeId v) const {
    return profit_[v] * high_.den >= high_.num * cost_[v];
  }
  bool in_range(NodeId v) const {
    return !value_le_low(v) && !value_ge_high(v);
  }

  void compact_live_list() {
    live_list_.erase(std::remove_if(live_list_.begin(), live_list_.end(),
                                    [&](NodeId v) { return !live_[v]; }),
                     live_list_.end());
  }

  void collect_postorder() {
    post_.clear();
    stack_.clear();
    stack_.push_back(0);
    while (!stack_.empty()) {
      NodeId u = stack_.back();
      stack_.pop_back();
      post_.push_back(u);
      for (NodeId c = first_child_[u]; c != kNoParent; c = next_sib_[c])
        stack_.push_back(c);
    }
    // reverse iteration of post_ gives children-before-parents
  }

  bool decide_contracted(Ratio cutoff) {
    collect_postorder();
    for (auto it = post_.rbegin(); it != post_.rend(); ++it) {
      NodeId u = *it;
      double p = profit_[u];
      double c = cost_[u];
      for (NodeId ch = first_child_[u]; ch != kNoParent; ch = next_sib_[ch])
        if (kept_[ch]) {
          p += sub_p_[ch];
          c += sub_c_[ch];
        }
      sub_p_[u] = p;
      sub_c_[u] = c;
      kept_[u] = p * cutoff.den >= cutoff.num * c;
    }
    return kept_[0];
  }

  // Detaches `ch` from `pa`'s child list, splicing ch's children into its
  // place, and folds ch's sums into pa.
  void merge_child_into_parent(NodeId pa, NodeId ch) {
    profit_[pa] += profit_[ch];
    cost_[pa] += cost_[ch];
    NodeId first = first_child_[ch];
    NodeId prev = prev_sib_[ch];
    NodeId next = next_sib_[ch];
    NodeId head = next, tail_prev = prev;
    if (first != kNoParent) {
      NodeId last = first;
      parent_[first] = pa;
      while (next_sib_[last] != kNoParent) {
        last = next_sib_[last];
        parent_[last] = pa;
      }
      next_sib_[last] = next;
      if (next != kNoParent) prev_sib_[next] = last;
      prev_sib_[first] = prev;
      head = first;
      tail_prev = prev;
    } else if (next != kNoParent) {
      prev_sib_[next] = prev;
    }
    if (tail_prev == kNoParent)
      first_child_[pa] = head;
    else
      next_sib_[tail_prev] = head;
    live_[ch] = 0;
    --live_count_;
  }

  void prune_leaf(NodeId u) {
    NodeId pa = parent_[u];
    NodeId prev = prev_sib_[u];
    NodeId next = next_sib_[u];
    if (prev == kNoParent)
      first_child_[pa] = next;
    else
      next_sib_[prev] = next;
    if (next != kNoParent) prev_sib_[next] = prev;
    live_[u] = 0;
    --live_count_;
  }

  std::mt19937_64 rng_;
  bool deterministic_;
  std::vector<double> profit_, cost_;
  std::vector<NodeId> parent_, first_child_, next_sib_, prev_sib_;
  std::vector<char> live_;
  std::int64_t live_count_ = 0;
  Ratio low_, high_;
  std::vector<NodeId> live_list_, post_, stack_;
  std::vector<Ratio> scratch_ratios_;
  std::vector<char> kept_;
  std::vector<double> sub_p_, sub_c_;
};

// Exact optimal mean over all root-containing subtrees, positive costs.
// Expected linear time; the number of contraction iterations is
// logarithmic and the per-iteration work shrinks geometrically.
inline MaxMeanResult solve_max_mean(const RootedTree& t,
                                    MaxMeanOptions opts = {}) {
  ContractionState st(t, opts);
  MaxMeanResult r;
  while (st.root_has_children()) {
    MaxMeanIteration it;
    it.live = st.live_count();
    it.in_range = st.shrink_range();
    it.touched = it.live;
    st.contraction_pass();
    r.trace.push_back(it);
    r.total_touched += it.touched;
    ++r.iterations;
  }
  r.final_live = st.live_count();
  r.final_in_range = st.in_range_count();
  r.optavg_ratio = st.root_value();
  r.optavg = r.optavg_ratio.to_double();
  // Witness pruning on the original input at the exact optimum.
  DecisionResult witness = has_average_at_least(t, r.optavg_ratio);
  r.prune = std::move(witness.prune);
  return r;
}

}  // namespace subtreeopt
