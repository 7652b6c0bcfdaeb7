#include "qcoef/geometry.hpp"

#include <algorithm>
#include <limits>

#include "qcoef/errors.hpp"

namespace qcoef {

Mat2 Mat2::rotation(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c, -s, s, c};
}

bool Mat2::is_orthogonal(double tol) const {
  const Mat2 g = transposed() * *this;
  return std::abs(g.a - 1.0) <= tol && std::abs(g.d - 1.0) <= tol && std::abs(g.b) <= tol &&
         std::abs(g.c) <= tol;
}

Similarity Similarity::compose(const Similarity& inner) const {
  return {ratio * inner.ratio, orth * inner.orth, (*this)(inner.translation)};
}

Similarity Similarity::inverse() const {
  const Mat2 ot = orth.transposed();
  const double k = 1.0 / ratio;
  return {k, ot, ot * translation * (-k)};
}

Domain Domain::interval(double lo, double hi) {
  if (!(hi > lo)) throw ValidationError("interval domain needs lo < hi");
  return Domain(DomainKind::interval, {0.5 * (lo + hi), 0.0}, 0.5 * (hi - lo), 0.0);
}

Domain Domain::box(Point center, double half_width, double half_height) {
  if (!(half_width > 0.0) || !(half_height > 0.0))
    throw ValidationError("box domain needs positive half-widths");
  return Domain(DomainKind::box, center, half_width, half_height);
}

Domain Domain::ball(Point center, double radius) {
  if (!(radius > 0.0)) throw ValidationError("ball domain needs a positive radius");
  return Domain(DomainKind::ball, center, radius, radius);
}

double Domain::diameter() const {
  switch (kind_) {
    case DomainKind::interval: return 2.0 * hw_;
    case DomainKind::box: return 2.0 * std::hypot(hw_, hh_);
    case DomainKind::ball: return 2.0 * hw_;
  }
  return 0.0;
}

std::vector<Point> Domain::extreme_points() const {
  switch (kind_) {
    case DomainKind::interval:
      return {{center_.x - hw_, 0.0}, {center_.x + hw_, 0.0}};
    case DomainKind::box:
      return {{center_.x - hw_, center_.y - hh_},
              {center_.x + hw_, center_.y - hh_},
              {center_.x + hw_, center_.y + hh_},
              {center_.x - hw_, center_.y + hh_}};
    case DomainKind::ball:
      return {};
  }
  return {};
}

bool Domain::contains(Point p, double tol) const {
  switch (kind_) {
    case DomainKind::interval:
      return std::abs(p.y) <= tol && std::abs(p.x - center_.x) <= hw_ + tol;
    case DomainKind::box:
      return std::abs(p.x - center_.x) <= hw_ + tol && std::abs(p.y - center_.y) <= hh_ + tol;
    case DomainKind::ball:
      return distance(p, center_) <= hw_ + tol;
  }
  return false;
}

bool Domain::maps_into_self(const Similarity& sim, double tol) const {
  if (kind_ == DomainKind::ball) {
    return distance(sim(center_), center_) + sim.ratio * hw_ <= hw_ + tol;
  }
  // X is convex, so checking the images of its extreme points suffices.
  for (const Point& p : extreme_points())
    if (!contains(sim(p), tol)) return false;
  return true;
}

double segment_distance(Point p0, Point p1, Point q0, Point q1) {
  auto point_segment = [](Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
  };
  auto cross = [](Point o, Point a, Point b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  const double d1 = cross(p0, p1, q0);
  const double d2 = cross(p0, p1, q1);
  const double d3 = cross(q0, q1, p0);
  const double d4 = cross(q0, q1, p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return 0.0;
  return std::min({point_segment(p0, q0, q1), point_segment(p1, q0, q1),
                   point_segment(q0, p0, p1), point_segment(q1, p0, p1)});
}

namespace {

bool inside_convex(Point p, std::span<const Point> poly) {
  int sign = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % poly.size()];
    const double c = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    const int s = c > 0 ? 1 : (c < 0 ? -1 : 0);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

}  // namespace

double convex_polygon_distance(std::span<const Point> a, std::span<const Point> b) {
  if (inside_convex(a.front(), b) || inside_convex(b.front(), a)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      best = std::min(best, segment_distance(a[i], a[(i + 1) % a.size()], b[j],
                                             b[(j + 1) % b.size()]));
  return best;
}

double Domain::image_distance(const Similarity& s1, const Similarity& s2) const {
  switch (kind_) {
    case DomainKind::interval: {
      double lo1 = s1({center_.x - hw_, 0.0}).x, hi1 = s1({center_.x + hw_, 0.0}).x;
      double lo2 = s2({center_.x - hw_, 0.0}).x, hi2 = s2({center_.x + hw_, 0.0}).x;
      if (lo1 > hi1) std::swap(lo1, hi1);
      if (lo2 > hi2) std::swap(lo2, hi2);
      return std::max({0.0, lo2 - hi1, lo1 - hi2});
    }
    case DomainKind::ball: {
      const double gap = distance(s1(center_), s2(center_)) - (s1.ratio + s2.ratio) * hw_;
      return std::max(0.0, gap);
    }
    case DomainKind::box: {
      std::vector<Point> pa, pb;
      for (const Point& p : extreme_points()) {
        pa.push_back(s1(p));
        pb.push_back(s2(p));
      }
      return convex_polygon_distance(pa, pb);
    }
  }
  return 0.0;
}

}  // namespace qcoef
