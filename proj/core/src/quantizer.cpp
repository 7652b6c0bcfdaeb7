#include "qcoef/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "qcoef/parallel.hpp"
#include "qcoef/series.hpp"

namespace qcoef {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::lloyd: return "lloyd";
    case Provenance::constructive: return "constructive";
    case Provenance::user: return "user";
  }
  return "user";
}

double rpow(double d, double r) {
  if (r == 2.0) return d * d;
  if (r == 1.0) return d;
  return std::pow(d, r);
}

namespace {

constexpr std::size_t kAssignChunk = 8192;
constexpr double kInf = std::numeric_limits<double>::infinity();

double weight_at(std::span<const double> w, std::size_t i) { return w.empty() ? 1.0 : w[i]; }

double scale_of(std::span<const Point> pts) {
  double lo_x = kInf, hi_x = -kInf, lo_y = kInf, hi_y = -kInf;
  for (const Point& p : pts) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  return std::max({hi_x - lo_x, hi_y - lo_y, std::abs(lo_x), std::abs(hi_x), std::abs(lo_y),
                   std::abs(hi_y), 1e-300});
}

Point weighted_mean(std::span<const Point> pts, std::span<const double> w) {
  CompensatedSum sx, sy, sw;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double wi = weight_at(w, i);
    sx.add(wi * pts[i].x);
    sy.add(wi * pts[i].y);
    sw.add(wi);
  }
  return {sx.total() / sw.total(), sy.total() / sw.total()};
}

std::vector<std::size_t> order_by_x(std::span<const Point> pts) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return pts[a].x < pts[b].x; });
  return idx;
}

double median_1d(std::span<const Point> pts, std::span<const double> w) {
  const auto idx = order_by_x(pts);
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) total += weight_at(w, i);
  double cum = 0.0;
  for (std::size_t k : idx) {
    cum += weight_at(w, k);
    if (cum >= 0.5 * total * (1.0 - 1e-15)) return pts[k].x;
  }
  return pts[idx.back()].x;
}

// Root of the increasing derivative sum w sign(c-x)|c-x|^{r-1}, r > 1.
double derivative_root_1d(std::span<const Point> pts, std::span<const double> w, double r,
                          double tol) {
  double lo = kInf, hi = -kInf;
  for (const Point& p : pts) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  const double scale = std::max({std::abs(lo), std::abs(hi), hi - lo, 1e-300});
  auto g = [&](double c) {
    CompensatedSum s;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = c - pts[i].x;
      const double m = std::pow(std::abs(d), r - 1.0);
      s.add(weight_at(w, i) * (d < 0 ? -m : m));
    }
    return s.total();
  };
  for (int it = 0; it < 200 && hi - lo > tol * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// 0 < r < 1: the cost is concave between consecutive data points, so its
// minimum sits on a data point.
double concave_center_1d(std::span<const Point> pts, std::span<const double> w, double r) {
  std::vector<double> xs;
  xs.reserve(pts.size());
  for (const Point& p : pts) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  auto cost = [&](double c) { return r_cost(pts, w, {c, 0.0}, r); };
  constexpr std::size_t kExhaustive = 4096;
  std::size_t first = 0, last = xs.size();
  if (xs.size() > kExhaustive) {
    // golden section to localize, then scan a window of data points around it
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = xs.front(), b = xs.back();
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = cost(c), fd = cost(d);
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
      if (fc <= fd) {
        b = d; d = c; fd = fc; c = b - g * (b - a); fc = cost(c);
      } else {
        a = c; c = d; fc = fd; d = a + g * (b - a); fd = cost(d);
      }
    }
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(xs.begin(), xs.end(), 0.5 * (a + b)) - xs.begin());
    first = pos > 256 ? pos - 256 : 0;
    last = std::min(xs.size(), pos + 256);
  }
  double best = xs[first], best_cost = kInf;
  for (std::size_t k = first; k < last; ++k) {
    const double f = cost(xs[k]);
    if (f < best_cost) {
      best_cost = f;
      best = xs[k];
    }
  }
  return best;
}

Point weiszfeld(std::span<const Point> pts, std::span<const double> w, double tol, int max_iters) {
  const double scale = scale_of(pts);
  const double coincide = 1e-14 * scale;
  Point y = weighted_mean(pts, w);
  Point best = y;
  double best_cost = r_cost(pts, w, y, 1.0);
  for (int it = 0; it < max_iters; ++it) {
    double eta = 0.0, den = 0.0;
    Point num{}, grad{};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double wi = weight_at(w, i);
      const double d = distance(pts[i], y);
      if (d <= coincide) {
        eta += wi;
        continue;
      }
      num = num + pts[i] * (wi / d);
      den += wi / d;
      grad = grad + (pts[i] - y) * (wi / d);
    }
    if (den == 0.0) return y;
    const double gnorm = norm(grad);
    if (gnorm <= eta) return y;  // optimality at a data point
    const Point t = num * (1.0 / den);
    const double lam = eta > 0.0 ? std::min(1.0, eta / gnorm) : 0.0;
    const Point next = t * (1.0 - lam) + y * lam;
    const double step = distance(next, y);
    y = next;
    const double f = r_cost(pts, w, y, 1.0);
    if (f < best_cost) {
      best_cost = f;
      best = y;
    }
    if (step <= tol * scale) break;
    if (it + 1 == max_iters) throw CenterBudgetError("Weiszfeld iteration cap reached", best);
  }
  // snap onto a data point if that point is itself optimal
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (distance(pts[i], best) < distance(pts[nearest], best)) nearest = i;
  if (distance(pts[nearest], best) <= 1e-7 * scale) {
    const Point c = pts[nearest];
    if (r_cost(pts, w, c, 1.0) <= best_cost) return c;
  }
  return best;
}

// Reweighted fixed point c <- sum w d^{r-2} x / sum w d^{r-2}, halving the
// step whenever the cost would increase.
Point reweighted_center(std::span<const Point> pts, std::span<const double> w, double r, double tol,
                        int max_iters) {
  const double scale = scale_of(pts);
  Point y = weighted_mean(pts, w);
  double fy = r_cost(pts, w, y, r);
  for (int it = 0; it < max_iters; ++it) {
    Point num{};
    double den = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = std::max(distance(pts[i], y), 1e-300);
      const double k = weight_at(w, i) * std::pow(d, r - 2.0);
      num = num + pts[i] * k;
      den += k;
    }
    Point next = num * (1.0 / den);
    if (!std::isfinite(next.x) || !std::isfinite(next.y)) return y;
    double fn = r_cost(pts, w, next, r);
    double damp = 1.0;
    while (fn > fy && damp > 1e-12) {
      damp *= 0.5;
      next = y + (next - y) * 0.5;
      fn = r_cost(pts, w, next, r);
    }
    if (fn > fy) return y;
    const double step = distance(next, y);
    y = next;
    fy = fn;
    if (step <= tol * scale) return y;
  }
  throw CenterBudgetError("reweighted center iteration cap reached", y);
}

/// Nearest-center lookup along the x-axis: centers sorted once, duplicates
/// collapsed onto their lowest index.
class Nearest1D {
 public:
  explicit Nearest1D(std::span<const Point> centers) {
    std::vector<std::size_t> idx(centers.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return centers[a].x < centers[b].x;
    });
    for (std::size_t k : idx) {
      if (!pos_.empty() && pos_.back() == centers[k].x) continue;
      pos_.push_back(centers[k].x);
      id_.push_back(k);
    }
  }

  std::size_t operator()(double x) const {
    const auto it = std::lower_bound(pos_.begin(), pos_.end(), x);
    const auto k = static_cast<std::size_t>(it - pos_.begin());
    if (k == 0) return id_[0];
    if (k == pos_.size()) return id_.back();
    const double dl = x - pos_[k - 1], dr = pos_[k] - x;
    if (dl < dr) return id_[k - 1];
    if (dr < dl) return id_[k];
    return std::min(id_[k - 1], id_[k]);
  }

 private:
  std::vector<double> pos_;
  std::vector<std::size_t> id_;
};

bool on_axis(std::span<const Point> pts) {
  return std::all_of(pts.begin(), pts.end(), [](const Point& p) { return p.y == 0.0; });
}

struct Assignment {
  std::vector<std::size_t> label;
  std::vector<double> cost;  // d^r to the assigned center
};

void assign_into(std::span<const Point> points, std::span<const Point> centers, double r,
                 Assignment& out) {
  out.label.resize(points.size());
  out.cost.resize(points.size());
  const bool axis = on_axis(points) && on_axis(centers);
  const std::size_t chunks = (points.size() + kAssignChunk - 1) / kAssignChunk;
  if (axis) {
    const Nearest1D nearest(centers);
    parallel_for(chunks, [&](std::size_t c) {
      const std::size_t end = std::min(points.size(), (c + 1) * kAssignChunk);
      for (std::size_t i = c * kAssignChunk; i < end; ++i) {
        const std::size_t k = nearest(points[i].x);
        out.label[i] = k;
        out.cost[i] = rpow(std::abs(points[i].x - centers[k].x), r);
      }
    });
    return;
  }
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(points.size(), (c + 1) * kAssignChunk);
    for (std::size_t i = c * kAssignChunk; i < end; ++i) {
      std::size_t best = 0;
      double bd = kInf;
      for (std::size_t k = 0; k < centers.size(); ++k) {
        const Point d = points[i] - centers[k];
        const double d2 = d.x * d.x + d.y * d.y;
        if (d2 < bd) {
          bd = d2;
          best = k;
        }
      }
      out.label[i] = best;
      out.cost[i] = rpow(std::sqrt(bd), r);
    }
  });
}

double mean_of(const std::vector<double>& v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return v.empty() ? 0.0 : s.total() / static_cast<double>(v.size());
}

DistortionEstimate estimate_from(const std::vector<double>& v) {
  DistortionEstimate e;
  e.mean = mean_of(v);
  if (v.size() < 2) return e;
  CompensatedSum ss;
  for (double x : v) ss.add((x - e.mean) * (x - e.mean));
  const double n = static_cast<double>(v.size());
  e.std_error = std::sqrt(ss.total() / (n - 1.0) / n);
  return e;
}

std::size_t draw_weighted(const std::vector<double>& w, double total, std::mt19937_64& gen) {
  const double u = uniform01(gen) * total;
  double cum = 0.0;
  std::size_t pick = w.size() - 1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    cum += w[i];
    if (cum > u) {
      pick = i;
      break;
    }
  }
  while (w[pick] == 0.0 && pick > 0) --pick;
  return pick;
}

// Greedy D^r seeding: each new center is the best of a few candidates drawn
// with probability proportional to the current d^r.
std::vector<Point> seed_centers(std::span<const Point> pts, std::size_t n, double r,
                                std::mt19937_64& gen) {
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(n)));
  std::vector<Point> centers;
  centers.reserve(n);
  centers.push_back(pts[std::min(pts.size() - 1,
                                 static_cast<std::size_t>(uniform01(gen) * pts.size()))]);
  std::vector<double> dr(pts.size()), cand(pts.size()), best_dr(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) dr[i] = rpow(distance(pts[i], centers[0]), r);
  while (centers.size() < n) {
    CompensatedSum total;
    for (double d : dr) total.add(d);
    if (!(total.total() > 0.0)) {
      centers.push_back(pts[0]);
      continue;
    }
    double best_total = kInf;
    std::size_t best_pick = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t pick = draw_weighted(dr, total.total(), gen);
      CompensatedSum after;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        cand[i] = std::min(dr[i], rpow(distance(pts[i], pts[pick]), r));
        after.add(cand[i]);
      }
      if (after.total() < best_total) {
        best_total = after.total();
        best_pick = pick;
        best_dr.swap(cand);
      }
    }
    centers.push_back(pts[best_pick]);
    dr.swap(best_dr);
  }
  return centers;
}

struct Run {
  std::vector<Point> centers;
  std::vector<double> history;
  std::size_t iterations = 0;
  double distortion = kInf;
  std::vector<std::string> warnings;
};

Run lloyd_run(std::span<const Point> pts, int dimension, std::size_t n, double r,
              const LloydOptions& opts, std::uint64_t restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                    static_cast<std::uint32_t>(restart), 0x51edu};
  std::mt19937_64 gen(seq);
  Run run;
  run.centers = seed_centers(pts, n, r, gen);
  Assignment a;
  std::vector<std::vector<Point>> cells(n);
  double prev = kInf;
  for (int it = 0;; ++it) {
    assign_into(pts, run.centers, r, a);
    const double d = mean_of(a.cost);
    run.history.push_back(d);
    run.distortion = d;
    run.iterations = static_cast<std::size_t>(it);
    if (it > 0 && prev - d <= opts.tol * prev) break;
    if (it >= opts.max_iters || d == 0.0) break;
    prev = d;

    std::vector<CompensatedSum> old_cost(n);
    std::vector<std::size_t> cell_size(n, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      old_cost[a.label[i]].add(a.cost[i]);
      ++cell_size[a.label[i]];
    }
    std::vector<double> cell_cost(n);
    for (std::size_t k = 0; k < n; ++k) cell_cost[k] = old_cost[k].total();
    std::vector<Point> updated = run.centers;
    if (r == 2.0) {
      std::vector<CompensatedSum> sx(n), sy(n);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        sx[a.label[i]].add(pts[i].x);
        sy[a.label[i]].add(pts[i].y);
      }
      for (std::size_t k = 0; k < n; ++k)
        if (cell_size[k] > 0) {
          const double m = static_cast<double>(cell_size[k]);
          updated[k] = {sx[k].total() / m, sy[k].total() / m};
        }
    } else {
      for (auto& c : cells) c.clear();
      for (std::size_t i = 0; i < pts.size(); ++i) cells[a.label[i]].push_back(pts[i]);
      for (std::size_t k = 0; k < n; ++k) {
        if (cells[k].empty()) continue;
        try {
          updated[k] = r_center(cells[k], {}, r, dimension);
        } catch (const CenterBudgetError& e) {
          updated[k] = e.best();
        }
      }
    }
    // keep a new center only when it lowers its own cell's cost
    std::vector<CompensatedSum> new_cost(n);
    for (std::size_t i = 0; i < pts.size(); ++i)
      new_cost[a.label[i]].add(rpow(distance(pts[i], updated[a.label[i]]), r));
    for (std::size_t k = 0; k < n; ++k)
      if (cell_size[k] > 0 && new_cost[k].total() < cell_cost[k]) run.centers[k] = updated[k];
    // reseed empty cells at the farthest sample points
    for (std::size_t k = 0; k < n; ++k) {
      if (cell_size[k] != 0) continue;
      const auto far = static_cast<std::size_t>(
          std::max_element(a.cost.begin(), a.cost.end()) - a.cost.begin());
      if (a.cost[far] == 0.0) break;
      run.centers[k] = pts[far];
      a.cost[far] = 0.0;
    }
  }
  return run;
}

}  // namespace

double r_cost(std::span<const Point> points, std::span<const double> weights, Point c, double r) {
  CompensatedSum s;
  for (std::size_t i = 0; i < points.size(); ++i)
    s.add(weight_at(weights, i) * rpow(distance(points[i], c), r));
  return s.total();
}

Point r_center(std::span<const Point> points, std::span<const double> weights, double r,
               int dimension, double tol, int max_iters) {
  if (points.empty()) throw PreconditionError("r_center needs at least one point");
  if (!(r > 0.0)) throw PreconditionError("r_center needs r > 0");
  if (!weights.empty()) {
    if (weights.size() != points.size()) throw PreconditionError("weights/points size mismatch");
    for (double w : weights)
      if (!(w > 0.0)) throw PreconditionError("r_center weights must be positive");
  }
  if (points.size() == 1) return points[0];
  if (r == 2.0) return weighted_mean(points, weights);
  if (dimension == 1) {
    if (r == 1.0) return {median_1d(points, weights), 0.0};
    if (r > 1.0) return {derivative_root_1d(points, weights, r, tol), 0.0};
    return {concave_center_1d(points, weights, r), 0.0};
  }
  if (r < 1.0) throw PreconditionError("r < 1 centers are only supported in dimension 1");
  if (r == 1.0) return weiszfeld(points, weights, tol, max_iters);
  return reweighted_center(points, weights, r, tol, max_iters);
}

std::vector<std::size_t> assign(std::span<const Point> points, std::span<const Point> centers) {
  if (centers.empty()) throw PreconditionError("assign needs at least one center");
  Assignment a;
  assign_into(points, centers, 1.0, a);
  return a.label;
}

DistortionEstimate distortion(std::span<const Point> points, std::span<const Point> centers,
                              double r) {
  if (centers.empty()) throw PreconditionError("distortion needs at least one center");
  if (!(r > 0.0)) throw PreconditionError("distortion needs r > 0");
  Assignment a;
  assign_into(points, centers, r, a);
  return estimate_from(a.cost);
}

DistortionEstimate distortion(const EmpiricalMeasure& empirical, std::span<const Point> centers,
                              double r) {
  return distortion(std::span<const Point>(empirical.points), centers, r);
}

Quantizer lloyd(std::span<const Point> points, int dimension, std::size_t n, double r,
                const LloydOptions& opts) {
  if (n == 0) throw PreconditionError("lloyd needs n >= 1");
  if (points.empty()) throw PreconditionError("lloyd needs a nonempty sample");
  if (!(r > 0.0)) throw PreconditionError("lloyd needs r > 0");
  if (dimension == 2 && r < 1.0) throw PreconditionError("r < 1 is only supported in dimension 1");
  Quantizer q;
  q.r = r;
  q.provenance = Provenance::lloyd;

  std::vector<Point> distinct(points.begin(), points.end());
  std::sort(distinct.begin(), distinct.end(),
            [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() <= n) {
    q.centers = distinct;
    q.warnings.push_back("n is at least the number of distinct sample points; returning them");
    q.history = {0.0};
    return q;
  }

  const int restarts = std::max(1, opts.restarts);
  std::vector<Run> runs(static_cast<std::size_t>(restarts));
  parallel_for(runs.size(), [&](std::size_t k) {
    runs[k] = lloyd_run(points, dimension, n, r, opts, static_cast<std::uint64_t>(k));
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k)
    if (runs[k].distortion < runs[best].distortion) best = k;

  Run& win = runs[best];
  q.centers = std::move(win.centers);
  q.history = std::move(win.history);
  q.iterations = win.iterations;
  const DistortionEstimate e = distortion(points, q.centers, r);
  q.distortion_estimate = e.mean;
  q.distortion_stderr = e.std_error;
  if (static_cast<int>(q.iterations) >= opts.max_iters)
    q.warnings.push_back("iteration cap reached before the tolerance");
  return q;
}

Quantizer lloyd(const EmpiricalMeasure& empirical, std::size_t n, double r,
                const LloydOptions& opts) {
  return lloyd(std::span<const Point>(empirical.points), empirical.dimension, n, r, opts);
}

}  // namespace qcoef
