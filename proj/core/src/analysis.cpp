#include "qcoef/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qcoef/errors.hpp"
#include "qcoef/parallel.hpp"
#include "qcoef/thermodynamics.hpp"

namespace qcoef {

namespace {

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  bool ok = false;
};

Fit least_squares(std::span<const double> x, std::span<const double> y) {
  Fit f;
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.ok = true;
  return f;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(v.size() - 1, lo + 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace

std::string to_string(CurveMethod m) {
  return m == CurveMethod::constructive ? "constructive" : "lloyd";
}

std::vector<std::size_t> DistortionCurve::monotonicity_violations() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const CurveEntry& a = entries[i - 1];
    const CurveEntry& b = entries[i];
    if (b.V - a.V > 2.0 * std::hypot(a.std_error, b.std_error)) out.push_back(b.n);
  }
  return out;
}

DimensionEstimate estimate_dimension(const DistortionCurve& curve, const BootstrapOptions& opts) {
  DimensionEstimate est;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < curve.entries.size(); ++i) {
    const CurveEntry& e = curve.entries[i];
    if (i > 0 && e.n <= curve.entries[i - 1].n)
      throw PreconditionError("distortion curve n values must be strictly increasing");
    if (!(e.V > 0.0) || e.n == 0) {
      est.warnings.push_back("dropped entry n = " + std::to_string(e.n) + " with nonpositive V");
      continue;
    }
    lx.push_back(std::log(static_cast<double>(e.n)));
    ly.push_back(std::log(e.V));
  }
  est.used = lx.size();
  if (est.used < 4) throw InsufficientDataError("dimension fit needs at least 4 usable entries");
  const Fit f = least_squares(lx, ly);
  if (!f.ok || !(f.slope < 0.0))
    throw InsufficientDataError("distortion does not decrease with n; no dimension estimate");
  est.slope = f.slope;
  est.intercept = f.intercept;
  est.dimension = -curve.r / f.slope;

  std::mt19937_64 gen(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, lx.size() - 1);
  std::vector<double> dims;
  dims.reserve(opts.resamples);
  std::vector<double> bx(lx.size()), by(ly.size());
  for (std::size_t b = 0; b < opts.resamples; ++b) {
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const std::size_t k = pick(gen);
      bx[i] = lx[k];
      by[i] = ly[k];
    }
    const Fit g = least_squares(bx, by);
    if (g.ok && g.slope < 0.0) dims.push_back(-curve.r / g.slope);
  }
  if (dims.empty()) {
    est.ci_low = est.ci_high = est.dimension;
    est.warnings.push_back("bootstrap produced no usable resample");
  } else {
    const double a = 0.5 * (1.0 - opts.level);
    est.ci_low = quantile(dims, a);
    est.ci_high = quantile(dims, 1.0 - a);
  }
  return est;
}

std::vector<CoefficientPoint> coefficient_curve(const DistortionCurve& curve, double kappa) {
  if (!(kappa > 0.0)) throw PreconditionError("coefficient curve needs kappa > 0");
  std::vector<CoefficientPoint> out;
  out.reserve(curve.entries.size());
  for (const CurveEntry& e : curve.entries)
    out.push_back({e.n, static_cast<double>(e.n) * std::pow(e.V, kappa / curve.r)});
  return out;
}

double last_third_slope(std::span<const CoefficientPoint> points) {
  if (points.size() < 2) throw InsufficientDataError("trend needs at least two points");
  const std::size_t take = std::max<std::size_t>(2, (points.size() + 2) / 3);
  std::vector<double> lx, ly;
  for (std::size_t i = points.size() - take; i < points.size(); ++i) {
    if (!(points[i].value > 0.0)) continue;
    lx.push_back(std::log(static_cast<double>(points[i].n)));
    ly.push_back(std::log(points[i].value));
  }
  const Fit f = least_squares(lx, ly);
  if (!f.ok) throw InsufficientDataError("trend needs two distinct positive points");
  return f.slope;
}

DistortionCurve lloyd_curve(const EmpiricalMeasure& empirical, std::span<const std::size_t> n_grid,
                            double r, const LloydOptions& opts, const std::string& system_id) {
  DistortionCurve curve;
  curve.r = r;
  curve.system_id = system_id;
  curve.seeds = {empirical.seed, opts.seed};
  curve.entries.resize(n_grid.size());
  parallel_for(n_grid.size(), [&](std::size_t i) {
    const Quantizer q = lloyd(empirical, n_grid[i], r, opts);
    curve.entries[i] = {n_grid[i], q.distortion_estimate, q.distortion_stderr, CurveMethod::lloyd};
  });
  return curve;
}

WitnessReport witness_from_curve(const DistortionCurve& curve, double kappa_minus,
                                 double kappa_plus, double kappa_r) {
  if (curve.entries.size() < 2) throw InsufficientDataError("witness needs at least two grid points");
  if (!(kappa_minus < kappa_r)) {
    std::ostringstream os;
    os << "kappa_minus = " << kappa_minus << " must be below kappa_r = " << kappa_r;
    throw PreconditionError(os.str());
  }
  if (!(kappa_plus > kappa_r)) {
    std::ostringstream os;
    os << "kappa_plus = " << kappa_plus << " must be above kappa_r = " << kappa_r;
    throw PreconditionError(os.str());
  }
  WitnessReport w;
  w.r = curve.r;
  w.kappa_minus = kappa_minus;
  w.kappa_plus = kappa_plus;
  w.kappa_r = kappa_r;
  w.curve = curve;
  w.lower = coefficient_curve(curve, kappa_minus);
  w.upper = coefficient_curve(curve, kappa_plus);
  w.critical = coefficient_curve(curve, kappa_r);
  std::vector<double> lower_values;
  for (const auto& c : w.lower) lower_values.push_back(c.value);
  w.lower_min = *std::min_element(lower_values.begin(), lower_values.end());
  w.lower_median = median(lower_values);
  w.upper_slope = last_third_slope(w.upper);
  w.critical_slope = last_third_slope(w.critical);
  w.lower_pass = w.lower_min > kLowerWitnessRatio * w.lower_median;
  w.upper_pass = w.upper_slope < 0.0;
  return w;
}

WitnessReport coefficient_witness(const InfiniteIFS& system, double r, double kappa_minus,
                              double kappa_plus, std::span<const std::size_t> n_grid,
                              const WitnessOptions& opts) {
  if (n_grid.size() < 2) throw InsufficientDataError("witness needs at least two grid points");
  const double kappa_r = quantization_dimension(system, r).kappa;
  if (!(kappa_minus < kappa_r) || !(kappa_plus > kappa_r)) {
    std::ostringstream os;
    os << "need kappa_minus < kappa_r = " << kappa_r << " < kappa_plus";
    throw PreconditionError(os.str());
  }
  const EmpiricalMeasure em = sample(system, opts.samples, opts.eps, opts.seed);
  LloydOptions lo;
  lo.seed = opts.seed;
  lo.restarts = opts.restarts;
  lo.max_iters = opts.max_iters;
  lo.tol = opts.tol;
  const DistortionCurve curve = lloyd_curve(em, n_grid, r, lo, system.id());
  return witness_from_curve(curve, kappa_minus, kappa_plus, kappa_r);
}

}  // namespace qcoef
