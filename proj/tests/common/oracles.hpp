#pragma once

// Test-side reference computations. They share no code with the library
// beyond the Point type: centers come from golden-section search, partitions
// from brute-force label enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "qcoef/geometry.hpp"

namespace oracle {

using qcoef::Point;

inline double cost_at(const std::vector<Point>& pts, const std::vector<double>& w, Point c, double r) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    s += w[i] * std::pow(std::hypot(pts[i].x - c.x, pts[i].y - c.y), r);
  return s;
}

template <class F>
double golden_min(F f, double a, double b, double* value = nullptr) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc <= fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d);
    }
  }
  const double x = fc <= fd ? c : d;
  if (value) *value = std::min(fc, fd);
  return x;
}

/// min_c sum w |x - c|^r for r >= 1 (convex), by golden section; nested in 2D.
inline double cell_cost(const std::vector<Point>& pts, const std::vector<double>& w, double r) {
  if (pts.size() == 1) return 0.0;
  double lx = pts[0].x, hx = pts[0].x, ly = pts[0].y, hy = pts[0].y;
  for (const Point& p : pts) {
    lx = std::min(lx, p.x);
    hx = std::max(hx, p.x);
    ly = std::min(ly, p.y);
    hy = std::max(hy, p.y);
  }
  if (hy == ly) {
    double v = 0.0;
    golden_min([&](double x) { return cost_at(pts, w, {x, ly}, r); }, lx, hx, &v);
    // endpoints and data points for the piecewise-linear r = 1 case
    for (const Point& p : pts) v = std::min(v, cost_at(pts, w, {p.x, ly}, r));
    return v;
  }
  auto inner = [&](double x) {
    double v = 0.0;
    golden_min([&](double y) { return cost_at(pts, w, {x, y}, r); }, ly, hy, &v);
    return v;
  };
  double v = 0.0;
  golden_min(inner, lx, hx, &v);
  for (const Point& p : pts) v = std::min(v, cost_at(pts, w, p, r));
  return v;
}

/// min over labelings of the points into at most n cells of the summed cell
/// costs, with per-subset memoization.
inline double partition_error(const std::vector<Point>& pts, const std::vector<double>& w,
                              std::size_t n, double r) {
  const std::size_t m = pts.size();
  if (n >= m) return 0.0;
  std::vector<double> memo(std::size_t{1} << m, -1.0);
  auto subset = [&](std::uint32_t mask) {
    if (memo[mask] >= 0.0) return memo[mask];
    std::vector<Point> p;
    std::vector<double> ww;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1u) {
        p.push_back(pts[i]);
        ww.push_back(w[i]);
      }
    memo[mask] = p.empty() ? 0.0 : cell_cost(p, ww, r);
    return memo[mask];
  };
  std::vector<std::size_t> label(m, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::uint32_t> masks(n, 0);
    for (std::size_t i = 0; i < m; ++i) masks[label[i]] |= 1u << i;
    double total = 0.0;
    for (auto mk : masks) total += subset(mk);
    best = std::min(best, total);
    std::size_t i = 0;
    while (i < m && ++label[i] == n) label[i++] = 0;
    if (i == m) break;
  }
  return best;
}

}  // namespace oracle
