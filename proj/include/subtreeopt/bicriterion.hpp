#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "subtreeopt/parametric.hpp"
#include "subtreeopt/tree.hpp"

namespace subtreeopt {

class DomainError : public std::domain_error {
  using std::domain_error::domain_error;
};

enum class ObjectiveTag { kRatio, kReliability, kStochastic, kVariance, kCustom };
enum class Direction { kMaximize, kMinimize };

// Bivariate objective over the two value sums (X, Y). Built-ins cover the
// standard bicriterion applications; custom evaluators must be convex when
// maximizing and concave when minimizing over the region that contains all
// hull points (quasiconvex/quasiconcave also works). That precondition is
// the caller's to uphold.
struct Objective {
  ObjectiveTag tag = ObjectiveTag::kCustom;
  Direction direction = Direction::kMaximize;
  std::function<double(double, double)> evaluator;

  // X/Y, maximized; needs every achievable Y positive.
  static Objective ratio() {
    return {ObjectiveTag::kRatio, Direction::kMaximize, [](double x, double y) {
              if (!(y > 0)) throw DomainError("ratio objective needs Y > 0");
              return x / y;
            }};
  }
  // X * e^Y, minimized (cost over reliability with Y the summed log terms).
  static Objective reliability() {
    return {ObjectiveTag::kReliability, Direction::kMinimize,
            [](double x, double y) { return x * std::exp(y); }};
  }
  // X + sqrt(Y), minimized; needs Y >= 0.
  static Objective stochastic() {
    return {ObjectiveTag::kStochastic, Direction::kMinimize,
            [](double x, double y) {
              if (y < 0)
                throw DomainError("stochastic objective needs Y >= 0");
              return x + std::sqrt(y);
            }};
  }
  // X - Y^2, minimized.
  static Objective variance() {
    return {ObjectiveTag::kVariance, Direction::kMinimize,
            [](double x, double y) { return x - y * y; }};
  }
  static Objective custom(Direction dir,
                          std::function<double(double, double)> f) {
    return {ObjectiveTag::kCustom, dir, std::move(f)};
  }
};

inline double evaluate_objective(const Objective& obj, double x, double y) {
  double v = obj.evaluator(x, y);
  if (!std::isfinite(v))
    throw DomainError("objective evaluated to a non-finite value");
  return v;
}

enum class HullSide { kUpper, kLower };

// One vertex of the convex hull of the (X_S, Y_S) cloud over all
// root-containing subtrees S. The witness subtree is recoverable via
// max_subtree_at on the sign-transformed instance at representative_lambda.
struct HullPoint {
  double x = 0;
  double y = 0;
  double representative_lambda = 0;
  HullSide orientation = HullSide::kUpper;
  int transform = 0;  // index into the four sign-flipped solves
};

namespace detail {

// Sign flips covering the whole hull with the nonnegative-lambda solver:
// max over (a, b) and (-a, b) traces the upper hull, max over (-a, -b) and
// (a, -b) (values flipped back) traces the lower hull.
inline constexpr double kSignA[4] = {1, -1, -1, 1};
inline constexpr double kSignB[4] = {1, 1, -1, -1};

inline RootedTree transformed_tree(const RootedTree& t, int k) {
  std::vector<double> a(t.values_a().begin(), t.values_a().end());
  std::vector<double> b(t.values_b().begin(), t.values_b().end());
  for (double& v : a) v *= kSignA[k];
  for (double& v : b) v *= kSignB[k];
  return t.with_values(std::move(a), std::move(b));
}

}  // namespace detail

// All hull vertices of the subtree point cloud, each realized by an actual
// subtree. Four parametric solves, O(n log n).
inline std::vector<HullPoint> hull_points(const RootedTree& t) {
  std::vector<HullPoint> pts;
  for (int k = 0; k < 4; ++k) {
    RootedTree tk = detail::transformed_tree(t, k);
    ParametricSolution sol = solve_parametric(tk);
    for (const EnvelopeSegment& seg : sol.envelope) {
      HullPoint p;
      p.x = detail::kSignA[k] * seg.slope;
      p.y = detail::kSignB[k] * seg.intercept;
      p.representative_lambda = std::isfinite(seg.lambda_end)
                                    ? (seg.lambda_start + seg.lambda_end) / 2
                                    : seg.lambda_start + 1;
      p.orientation = k < 2 ? HullSide::kUpper : HullSide::kLower;
      p.transform = k;
      pts.push_back(p);
    }
  }
  // Drop exact duplicate (x, y) pairs, keeping the first occurrence.
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    if (pts[i].x != pts[j].x) return pts[i].x < pts[j].x;
    if (pts[i].y != pts[j].y) return pts[i].y < pts[j].y;
    return i < j;
  });
  std::vector<char> keep(pts.size(), 0);
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (i == 0 || pts[idx[i]].x != pts[idx[i - 1]].x ||
        pts[idx[i]].y != pts[idx[i - 1]].y)
      keep[idx[i]] = 1;
  std::vector<HullPoint> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) out.push_back(pts[i]);
  return out;
}

struct BicriterionResult {
  PruneSet prune;
  double x = 0;
  double y = 0;
  double value = 0;
};

// Evaluates the objective at every hull vertex and returns the best, with
// its witness subtree. Ties go to smaller Y, then smaller X.
inline BicriterionResult optimize(const RootedTree& t, const Objective& obj) {
  std::vector<HullPoint> pts = hull_points(t);
  if (obj.tag == ObjectiveTag::kRatio) {
    for (const HullPoint& p : pts)
      if (!(p.y > 0))
        throw DomainError(
            "ratio objective: some subtree has non-positive total Y");
  }
  const HullPoint* best = nullptr;
  double best_val = 0;
  for (const HullPoint& p : pts) {
    double v = evaluate_objective(obj, p.x, p.y);
    bool better;
    if (!best) {
      better = true;
    } else if (v == best_val) {
      better = p.y < best->y || (p.y == best->y && p.x < best->x);
    } else {
      better = obj.direction == Direction::kMaximize ? v > best_val
                                                     : v < best_val;
    }
    if (better) {
      best = &p;
      best_val = v;
    }
  }
  RootedTree tk = detail::transformed_tree(t, best->transform);
  auto [prune, weight] = max_subtree_at(tk, best->representative_lambda);
  (void)weight;
  return {std::move(prune), best->x, best->y, best_val};
}

}  // namespace subtreeopt
