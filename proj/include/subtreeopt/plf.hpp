#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "subtreeopt/tree.hpp"

namespace subtreeopt {

// One linear piece: f(x) = slope*x + intercept for x >= x_start, up to the
// next segment.
struct PlfSegment {
  double x_start = 0;
  double slope = 0;
  double intercept = 0;

  bool operator==(const PlfSegment&) const = default;
};

struct TrimInfo {
  bool clipped = false;
  double lcx = 0;  // left end of the zeroed range
  double rcx = std::numeric_limits<double>::infinity();  // right end; inf if unbounded
};

namespace plf_detail {

inline thread_local std::int64_t g_comparisons = 0;

struct Node;
using NodePtr = std::unique_ptr<Node>;

// Breakpoint node: key x plus the slope/intercept change at x, with cached
// subtree delta sums for prefix queries.
struct Node {
  double x;
  double da, db;
  double da_total, db_total;
  std::int32_t height = 1;
  std::uint32_t count = 1;
  NodePtr left, right;

  Node(double x_, double da_, double db_)
      : x(x_), da(da_), db(db_), da_total(da_), db_total(db_) {}
};

inline std::int32_t height(const NodePtr& n) { return n ? n->height : 0; }
inline std::uint32_t count(const NodePtr& n) { return n ? n->count : 0; }
inline double da_total(const NodePtr& n) { return n ? n->da_total : 0.0; }
inline double db_total(const NodePtr& n) { return n ? n->db_total : 0.0; }

inline void pull(Node* n) {
  n->height = 1 + std::max(height(n->left), height(n->right));
  n->count = 1 + count(n->left) + count(n->right);
  n->da_total = n->da + da_total(n->left) + da_total(n->right);
  n->db_total = n->db + db_total(n->left) + db_total(n->right);
}

inline NodePtr rotate_left(NodePtr n) {
  NodePtr r = std::move(n->right);
  n->right = std::move(r->left);
  pull(n.get());
  r->left = std::move(n);
  pull(r.get());
  return r;
}

inline NodePtr rotate_right(NodePtr n) {
  NodePtr l = std::move(n->left);
  n->left = std::move(l->right);
  pull(n.get());
  l->right = std::move(n);
  pull(l.get());
  return l;
}

inline NodePtr rebalance(NodePtr n) {
  pull(n.get());
  int bf = height(n->left) - height(n->right);
  if (bf > 1) {
    if (height(n->left->left) < height(n->left->right))
      n->left = rotate_left(std::move(n->left));
    return rotate_right(std::move(n));
  }
  if (bf < -1) {
    if (height(n->right->right) < height(n->right->left))
      n->right = rotate_right(std::move(n->right));
    return rotate_left(std::move(n));
  }
  return n;
}

// Joins l < mid < r into one balanced tree, O(|height(l) - height(r)|).
inline NodePtr join(NodePtr l, NodePtr mid, NodePtr r) {
  if (height(l) > height(r) + 1) {
    l->right = join(std::move(l->right), std::move(mid), std::move(r));
    return rebalance(std::move(l));
  }
  if (height(r) > height(l) + 1) {
    r->left = join(std::move(l), std::move(mid), std::move(r->left));
    return rebalance(std::move(r));
  }
  mid->left = std::move(l);
  mid->right = std::move(r);
  pull(mid.get());
  return mid;
}

inline NodePtr detach_max(NodePtr t, NodePtr& out_max) {
  if (!t->right) {
    out_max = std::move(t);
    return std::move(out_max->left);
  }
  t->right = detach_max(std::move(t->right), out_max);
  return rebalance(std::move(t));
}

inline NodePtr join2(NodePtr l, NodePtr r) {
  if (!l) return r;
  if (!r) return l;
  NodePtr m;
  l = detach_max(std::move(l), m);
  return join(std::move(l), std::move(m), std::move(r));
}

struct SplitResult {
  NodePtr left, eq, right;  // keys < key, the node at key if present, keys > key
};

inline SplitResult split(NodePtr t, double key) {
  if (!t) return {};
  ++g_comparisons;
  NodePtr l = std::move(t->left);
  NodePtr r = std::move(t->right);
  if (key == t->x) return {std::move(l), std::move(t), std::move(r)};
  if (key < t->x) {
    SplitResult s = split(std::move(l), key);
    s.right = join(std::move(s.right), std::move(t), std::move(r));
    return s;
  }
  SplitResult s = split(std::move(r), key);
  s.left = join(std::move(l), std::move(t), std::move(s.left));
  return s;
}

// Set union driven by the structure of `src` (the smaller side): each src
// node splits what remains of dst. Equal keys combine by summing deltas;
// pairs that cancel to (0, 0) are dropped. O(m log(n/m + 1)) for sizes
// m <= n.
inline NodePtr merge_union(NodePtr dst, NodePtr src) {
  if (!src) return dst;
  if (!dst) return src;
  NodePtr sl = std::move(src->left);
  NodePtr sr = std::move(src->right);
  SplitResult s = split(std::move(dst), src->x);
  if (s.eq) {
    src->da += s.eq->da;
    src->db += s.eq->db;
  }
  NodePtr l = merge_union(std::move(s.left), std::move(sl));
  NodePtr r = merge_union(std::move(s.right), std::move(sr));
  if (src->da == 0.0 && src->db == 0.0)
    return join2(std::move(l), std::move(r));
  return join(std::move(l), std::move(src), std::move(r));
}

}  // namespace plf_detail

// Convex piecewise linear function on [0, inf), represented as a balanced
// tree of breakpoint deltas. Before the first breakpoint the function is
// identically zero; at breakpoint x the slope changes by deltaA and the
// intercept by deltaB. An empty tree is the zero function.
//
// Functions are exclusively owned: add() consumes both operands. Structural
// decisions use exact double comparisons throughout; there are no epsilons.
class Plf {
 public:
  Plf() = default;
  Plf(Plf&&) = default;
  Plf& operator=(Plf&&) = default;

  // Function that is 0 before z and a*x + b from z on.
  static Plf create(double z, double a, double b) {
    if (!std::isfinite(z) || z < 0 || !std::isfinite(a) || !std::isfinite(b))
      throw PreconditionError("plf create: needs finite a, b and z >= 0");
    Plf f;
    f.insert(z, a, b);
    return f;
  }

  // Pointwise sum; the larger operand is kept as the destination.
  friend Plf add(Plf f, Plf g) {
    Plf out;
    if (plf_detail::count(f.root_) >= plf_detail::count(g.root_))
      out.root_ = plf_detail::merge_union(std::move(f.root_), std::move(g.root_));
    else
      out.root_ = plf_detail::merge_union(std::move(g.root_), std::move(f.root_));
    return out;
  }

  // Adds (da, db) to the breakpoint at x, creating it if needed and dropping
  // it if the deltas cancel.
  void insert(double x, double da, double db) {
    if (da == 0.0 && db == 0.0) return;
    auto s = plf_detail::split(std::move(root_), x);
    plf_detail::NodePtr mid;
    if (s.eq) {
      s.eq->da += da;
      s.eq->db += db;
      if (s.eq->da == 0.0 && s.eq->db == 0.0) {
        root_ = plf_detail::join2(std::move(s.left), std::move(s.right));
        return;
      }
      mid = std::move(s.eq);
    } else {
      mid = std::make_unique<plf_detail::Node>(x, da, db);
    }
    root_ = plf_detail::join(std::move(s.left), std::move(mid), std::move(s.right));
  }

  // Removes the breakpoint with key x.
  void erase(double x) {
    auto s = plf_detail::split(std::move(root_), x);
    root_ = plf_detail::join2(std::move(s.left), std::move(s.right));
    if (!s.eq)
      throw PreconditionError("plf erase: no breakpoint at the given key");
  }

  // Slope and intercept of the piece active at z: prefix delta sums over
  // keys <= z. O(log n) via the cached subtree totals.
  std::pair<double, double> function_at(double z) const {
    double a = 0, b = 0;
    const plf_detail::Node* t = root_.get();
    while (t) {
      ++plf_detail::g_comparisons;
      if (z < t->x) {
        t = t->left.get();
      } else {
        a += plf_detail::da_total(t->left) + t->da;
        b += plf_detail::db_total(t->left) + t->db;
        t = t->right.get();
      }
    }
    return {a, b};
  }

  double value_at(double z) const {
    auto [a, b] = function_at(z);
    return a * z + b;
  }

  // Replaces f by max(f, 0) on [0, inf). Assumes f is convex and continuous;
  // crossings are found by slope descent and exact division on the local
  // piece. Amortized O(log n) plus the freed breakpoints.
  TrimInfo trim() {
    TrimInfo info;
    if (!root_) return info;
    const double inf = std::numeric_limits<double>::infinity();

    // Minimum: leftmost breakpoint whose piece slope is >= 0. With no such
    // breakpoint the function decreases forever.
    const plf_detail::Node* argmin = nullptr;
    {
      const plf_detail::Node* t = root_.get();
      double acc = 0;
      while (t) {
        ++plf_detail::g_comparisons;
        double slope_incl = acc + plf_detail::da_total(t->left) + t->da;
        if (slope_incl >= 0) {
          argmin = t;
          t = t->left.get();
        } else {
          acc = slope_incl;
          t = t->right.get();
        }
      }
    }
    double min_bound = inf;
    if (argmin) {
      double fmin = value_at(argmin->x);
      if (fmin >= 0) return info;  // nonnegative everywhere already
      min_bound = argmin->x;
    }

    // Left crossing: last breakpoint at or before the minimum where the
    // function is still >= 0; the crossing sits on that piece.
    double lcx = 0;
    {
      const plf_detail::Node* t = root_.get();
      double acc_a = 0, acc_b = 0;
      bool found = false;
      double cx = 0, ca = 0, cb = 0, cval = 0;
      while (t) {
        ++plf_detail::g_comparisons;
        if (t->x > min_bound) {
          t = t->left.get();
          continue;
        }
        double a = acc_a + plf_detail::da_total(t->left) + t->da;
        double b = acc_b + plf_detail::db_total(t->left) + t->db;
        double val = a * t->x + b;
        if (val >= 0) {
          found = true;
          cx = t->x;
          ca = a;
          cb = b;
          cval = val;
          acc_a = a;
          acc_b = b;
          t = t->right.get();
        } else {
          t = t->left.get();
        }
      }
      if (found) {
        if (cval == 0) {
          lcx = cx;
        } else {
          if (ca >= 0)
            throw std::logic_error("plf trim: function is not convex");
          lcx = std::max(-cb / ca, cx);
        }
      }
    }

    // Right crossing: exists exactly when the final slope is positive.
    double rcx = inf;
    double saved_a = 0, saved_b = 0;
    if (root_->da_total > 0) {
      const plf_detail::Node* t = root_.get();
      double acc_a = 0, acc_b = 0;
      bool found = false;
      double cx = 0, ca = 0, cb = 0;
      while (t) {
        ++plf_detail::g_comparisons;
        double a = acc_a + plf_detail::da_total(t->left) + t->da;
        double b = acc_b + plf_detail::db_total(t->left) + t->db;
        double val = a * t->x + b;
        if (val < 0) {
          found = true;
          cx = t->x;
          ca = a;
          cb = b;
          acc_a = a;
          acc_b = b;
          t = t->right.get();
        } else if (a < 0) {
          acc_a = a;
          acc_b = b;
          t = t->right.get();
        } else {
          t = t->left.get();
        }
      }
      if (!found || ca <= 0)
        throw std::logic_error("plf trim: function is not convex");
      rcx = std::max(-cb / ca, cx);
      std::tie(saved_a, saved_b) = function_at(rcx);
    }

    // Drop every breakpoint in [lcx, rcx], zero the range, restore the tail.
    auto s1 = plf_detail::split(std::move(root_), lcx);
    double prefix_a = plf_detail::da_total(s1.left);
    double prefix_b = plf_detail::db_total(s1.left);
    plf_detail::NodePtr tail;
    if (rcx < inf) {
      auto s2 = plf_detail::split(std::move(s1.right), rcx);
      tail = std::move(s2.right);
    }
    root_ = plf_detail::join2(std::move(s1.left), std::move(tail));
    insert(lcx, -prefix_a, -prefix_b);
    if (rcx < inf) insert(rcx, saved_a, saved_b);

    info.clipped = true;
    info.lcx = lcx;
    info.rcx = rcx;
    return info;
  }

  // Materialized pieces in increasing x order; adjacent pieces with equal
  // slope and intercept are coalesced. The zero function yields one zero
  // segment.
  std::vector<PlfSegment> segments() const {
    std::vector<PlfSegment> out;
    out.reserve(plf_detail::count(root_) + 1);
    double a = 0, b = 0;
    std::vector<const plf_detail::Node*> stack;
    const plf_detail::Node* t = root_.get();
    while (t || !stack.empty()) {
      while (t) {
        stack.push_back(t);
        t = t->left.get();
      }
      t = stack.back();
      stack.pop_back();
      a += t->da;
      b += t->db;
      if (!out.empty() && out.back().slope == a && out.back().intercept == b) {
        // coalesce
      } else {
        out.push_back({t->x, a, b});
      }
      t = t->right.get();
    }
    if (out.empty() || out.front().x_start > 0)
      out.insert(out.begin(), {0, 0, 0});
    return out;
  }

  // Debug dump: one line per segment, `x_start slope intercept`, 17
  // significant digits.
  std::string dump() const {
    std::string out;
    for (const PlfSegment& s : segments()) {
      out += detail::format_double(s.x_start);
      out += ' ';
      out += detail::format_double(s.slope);
      out += ' ';
      out += detail::format_double(s.intercept);
      out += '\n';
    }
    return out;
  }

  std::size_t size() const { return plf_detail::count(root_); }
  bool empty() const { return root_ == nullptr; }
  int height() const { return plf_detail::height(root_); }

  // Full structural audit: key order, AVL balance, cached heights, counts
  // and delta sums (exact). Throws std::logic_error on any mismatch.
  void check_valid() const {
    check_node(root_.get(), nullptr, nullptr);
  }

  static std::int64_t comparison_count() { return plf_detail::g_comparisons; }
  static void reset_comparison_count() { plf_detail::g_comparisons = 0; }

 private:
  struct Audit {
    double da = 0, db = 0;
    std::int32_t height = 0;
    std::uint32_t count = 0;
  };

  static Audit check_node(const plf_detail::Node* t, const double* lo,
                          const double* hi) {
    if (!t) return {};
    if (lo && !(t->x > *lo))
      throw std::logic_error("plf: key order violated");
    if (hi && !(t->x < *hi))
      throw std::logic_error("plf: key order violated");
    if (t->da == 0.0 && t->db == 0.0)
      throw std::logic_error("plf: zero delta pair retained");
    Audit l = check_node(t->left.get(), lo, &t->x);
    Audit r = check_node(t->right.get(), &t->x, hi);
    if (std::abs(l.height - r.height) > 1)
      throw std::logic_error("plf: AVL balance violated");
    Audit self;
    self.height = 1 + std::max(l.height, r.height);
    self.count = 1 + l.count + r.count;
    // identical association order as pull(), so the comparison is exact
    self.da = t->da + l.da + r.da;
    self.db = t->db + l.db + r.db;
    if (self.height != t->height || self.count != t->count)
      throw std::logic_error("plf: cached height/count stale");
    if (self.da != t->da_total || self.db != t->db_total)
      throw std::logic_error("plf: cached delta sums stale");
    return self;
  }

  plf_detail::NodePtr root_;
};

}  // namespace subtreeopt
