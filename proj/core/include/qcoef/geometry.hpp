#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace qcoef {

// Points live in R^2; one-dimensional systems keep y == 0 throughout.
struct Point {
  double x = 0.0;
  double y = 0.0;

  constexpr Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  constexpr Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  constexpr Point operator*(double k) const { return {x * k, y * k}; }
  constexpr bool operator==(const Point&) const = default;
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

/// Row-major 2x2 matrix.
struct Mat2 {
  double a = 1.0, b = 0.0;
  double c = 0.0, d = 1.0;

  static constexpr Mat2 identity() { return {}; }
  static Mat2 rotation(double angle);
  /// Orthogonal part of a 1D similarity: x -> sign * x.
  static constexpr Mat2 orientation(int sign) { return {sign < 0 ? -1.0 : 1.0, 0.0, 0.0, 1.0}; }

  constexpr Point operator*(Point p) const { return {a * p.x + b * p.y, c * p.x + d * p.y}; }
  constexpr Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  constexpr Mat2 transposed() const { return {a, c, b, d}; }
  constexpr bool operator==(const Mat2&) const = default;

  bool is_orthogonal(double tol = 1e-12) const;
};

/// x -> ratio * orth * x + translation, with 0 < ratio and orth orthogonal.
struct Similarity {
  double ratio = 1.0;
  Mat2 orth{};
  Point translation{};

  Point operator()(Point p) const { return orth * p * ratio + translation; }

  /// (*this)(other(x)).
  Similarity compose(const Similarity& inner) const;
  Similarity inverse() const;

  bool operator==(const Similarity&) const = default;
};

enum class DomainKind { interval, box, ball };

/// Compact convex ambient set X. Intervals are stored as boxes with
/// half_height == 0 and live on the x-axis.
class Domain {
 public:
  static Domain interval(double lo, double hi);
  static Domain box(Point center, double half_width, double half_height);
  static Domain ball(Point center, double radius);

  DomainKind kind() const { return kind_; }
  int dimension() const { return kind_ == DomainKind::interval ? 1 : 2; }
  Point center() const { return center_; }
  double half_width() const { return hw_; }
  double half_height() const { return hh_; }
  double radius() const { return hw_; }
  double diameter() const;

  /// Interval endpoints or box corners; empty for a ball.
  std::vector<Point> extreme_points() const;

  bool contains(Point p, double tol = 1e-12) const;

  /// True when sim(X) is a subset of X (up to tol).
  bool maps_into_self(const Similarity& sim, double tol = 1e-12) const;

  /// Euclidean distance between the compact sets a(X) and b(X); zero when they
  /// intersect.
  double image_distance(const Similarity& a, const Similarity& b) const;

  bool operator==(const Domain&) const = default;

 private:
  Domain(DomainKind kind, Point center, double hw, double hh)
      : kind_(kind), center_(center), hw_(hw), hh_(hh) {}

  DomainKind kind_ = DomainKind::interval;
  Point center_{};
  double hw_ = 0.5;
  double hh_ = 0.0;
};

double segment_distance(Point p0, Point p1, Point q0, Point q1);

/// Distance between two convex polygons given as vertex loops (either
/// orientation). Zero when they overlap.
double convex_polygon_distance(std::span<const Point> a, std::span<const Point> b);

}  // namespace qcoef
