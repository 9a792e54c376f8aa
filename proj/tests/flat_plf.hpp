#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace subtreeopt::testutil {

// Naive reference for the piecewise linear function structure: breakpoints
// kept in a sorted vector, every operation a linear scan. Used as an
// independent evaluation oracle for the balanced-tree implementation.
struct FlatPlf {
  struct Bp {
    double x, da, db;
  };
  std::vector<Bp> bps;  // sorted by x, no (0,0) delta pairs

  static FlatPlf create(double z, double a, double b) {
    FlatPlf f;
    f.insert(z, a, b);
    return f;
  }

  void insert(double x, double da, double db) {
    if (da == 0.0 && db == 0.0) return;
    for (std::size_t i = 0; i < bps.size(); ++i) {
      if (bps[i].x == x) {
        bps[i].da += da;
        bps[i].db += db;
        if (bps[i].da == 0.0 && bps[i].db == 0.0) bps.erase(bps.begin() + i);
        return;
      }
      if (bps[i].x > x) {
        bps.insert(bps.begin() + i, {x, da, db});
        return;
      }
    }
    bps.push_back({x, da, db});
  }

  void add(const FlatPlf& g) {
    for (const Bp& bp : g.bps) insert(bp.x, bp.da, bp.db);
  }

  std::pair<double, double> function_at(double z) const {
    double a = 0, b = 0;
    for (const Bp& bp : bps) {
      if (bp.x > z) break;
      a += bp.da;
      b += bp.db;
    }
    return {a, b};
  }

  double value_at(double z) const {
    auto [a, b] = function_at(z);
    return a * z + b;
  }

  void trim() {
    const double inf = std::numeric_limits<double>::infinity();
    if (bps.empty()) return;
    // prefix pairs at each breakpoint
    std::vector<double> pa(bps.size()), pb(bps.size());
    double a = 0, b = 0;
    for (std::size_t i = 0; i < bps.size(); ++i) {
      a += bps[i].da;
      b += bps[i].db;
      pa[i] = a;
      pb[i] = b;
    }
    std::size_t argmin = bps.size();
    for (std::size_t i = 0; i < bps.size(); ++i)
      if (pa[i] >= 0) {
        argmin = i;
        break;
      }
    if (argmin < bps.size()) {
      double fmin = pa[argmin] * bps[argmin].x + pb[argmin];
      if (fmin >= 0) return;
    }
    double lcx = 0;
    for (std::size_t i = 0; i < bps.size() && i <= argmin; ++i) {
      double val = pa[i] * bps[i].x + pb[i];
      if (val >= 0)
        lcx = val == 0 ? bps[i].x : std::max(-pb[i] / pa[i], bps[i].x);
    }
    double rcx = inf;
    double saved_a = 0, saved_b = 0;
    if (pa.back() > 0) {
      for (std::size_t i = 0; i < bps.size(); ++i) {
        double val = pa[i] * bps[i].x + pb[i];
        if (val < 0) rcx = std::max(-pb[i] / pa[i], bps[i].x);
      }
      std::tie(saved_a, saved_b) = function_at(rcx);
    }
    double prefix_a = 0, prefix_b = 0;
    std::vector<Bp> next;
    for (const Bp& bp : bps) {
      if (bp.x < lcx) {
        prefix_a += bp.da;
        prefix_b += bp.db;
        next.push_back(bp);
      } else if (bp.x > rcx) {
        next.push_back(bp);
      }
    }
    bps = std::move(next);
    insert(lcx, -prefix_a, -prefix_b);
    if (rcx < inf) insert(rcx, saved_a, saved_b);
  }
};

}  // namespace subtreeopt::testutil
