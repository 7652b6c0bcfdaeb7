#include "qcoef/thermodynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qcoef/errors.hpp"
#include "qcoef/parallel.hpp"

namespace qcoef {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::uint64_t kMaxTerms = std::uint64_t{1} << 24;
constexpr int kMaxBisection = 200;

struct PartialSum {
  double explicit_sum = 0.0;
  Enclosure tail;
  std::uint64_t terms = 0;

  double estimate() const { return explicit_sum + tail.value; }
  double error() const { return tail.error + 8.0 * kEps * explicit_sum; }
};

double term(const InfiniteIFS& system, Symbol j, double q, double t) {
  double log_term = 0.0;
  if (q != 0.0) log_term += q * std::log(system.probability(j));
  if (t != 0.0) log_term += t * std::log(system.ratio(j));
  return std::exp(log_term);
}

PartialSum partial_sum(const InfiniteIFS& system, double q, double t, std::uint64_t n) {
  PartialSum ps;
  const std::uint64_t m = system.explicit_count();
  n = system.finite() ? m : std::max<std::uint64_t>({n, m, 1});
  CompensatedSum s;
  for (Symbol j = 1; j <= n; ++j) s.add(term(system, j, q, t));
  ps.explicit_sum = s.total();
  ps.terms = n;
  if (!system.finite()) ps.tail = system.pressure_series(q, t).tail(n);
  return ps;
}

void require_convergent(const InfiniteIFS& system, double q, double t) {
  const double th = theta(system, q);
  if (!(t > th)) {
    std::ostringstream os;
    os << "pressure diverges: t = " << t << " is not above theta(" << q << ") = " << th;
    throw DivergenceError(os.str());
  }
}

// Sign of P(q,t), i.e. whether the sum is >= 1, decided on a certified
// enclosure whenever possible.
int pressure_sign(const InfiniteIFS& system, double q, double t) {
  require_convergent(system, q, t);
  std::uint64_t n = std::max<std::uint64_t>(system.explicit_count(), 16);
  PartialSum ps;
  while (true) {
    ps = partial_sum(system, q, t, n);
    if (std::isinf(ps.explicit_sum)) return 1;
    const double lo = ps.explicit_sum * (1.0 - 8.0 * kEps) +
                      (ps.tail.certified() ? std::max(0.0, ps.tail.value - ps.tail.error) : 0.0);
    if (lo >= 1.0) return 1;
    if (ps.tail.certified()) {
      const double hi = ps.estimate() + ps.error();
      if (hi < 1.0) return -1;
      if (ps.error() <= 64.0 * kEps * ps.estimate()) break;
    }
    if (system.finite() || n >= kMaxTerms) break;
    n *= 2;
  }
  if (!ps.tail.certified()) throw BudgetError("pressure tail not certifiable within term budget");
  return ps.estimate() >= 1.0 ? 1 : -1;
}

struct Bracket {
  double lo;  // P(lo) >= 0
  double hi;  // P(hi) < 0
};

// Bracket the zero of the decreasing function t -> P(q,t) on (theta(q), inf).
Bracket bracket_zero(const InfiniteIFS& system, double q) {
  const double th = theta(system, q);
  if (th == kInf) throw ValidationError("pressure diverges for every t");
  const double t0 = std::isfinite(th) ? th + 1.0 : 1.0;
  if (pressure_sign(system, q, t0) >= 0) {
    double step = 1.0;
    for (int k = 0; k < 64; ++k, step *= 2.0)
      if (pressure_sign(system, q, t0 + step) < 0) return {t0 + step / 2.0 * (k > 0), t0 + step};
    throw ValidationError("pressure does not become negative; sup of ratios must be < 1");
  }
  if (!std::isfinite(th)) {
    double step = 1.0;
    for (int k = 0; k < 64; ++k, step *= 2.0)
      if (pressure_sign(system, q, t0 - step) >= 0) return {t0 - step, t0 - step / 2.0 * (k > 0)};
  } else {
    double width = t0 - th;
    double prev = t0;
    for (int k = 0; k < 60; ++k) {
      width *= 0.5;
      const double t = th + width;
      if (pressure_sign(system, q, t) >= 0) return {t, prev};
      prev = t;
    }
  }
  throw ValidationError("no u with P(q,u) >= 0 for q = " + std::to_string(q) +
                        "; the finiteness condition fails");
}

// Bisection on a decreasing sign function until the bracket collapses.
template <class Sign>
Bracket bisect(Bracket b, Sign&& sign) {
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (b.lo + b.hi);
    if (mid <= b.lo || mid >= b.hi) break;
    if (b.hi - b.lo <= 2.0 * kEps * std::max({1.0, std::abs(b.lo), std::abs(b.hi)})) break;
    if (sign(mid) >= 0) b.lo = mid;
    else b.hi = mid;
  }
  return b;
}

}  // namespace

double theta(const InfiniteIFS& system, double q) {
  if (system.finite()) return -kInf;
  const RatioTail& rt = system.maps().tail();
  const ProbabilityTail& pt = system.probs().tail();
  const double lq = (pt.kind == TailKind::geometric && q != 0.0) ? q * std::log(pt.rho) : 0.0;
  const double eq = (pt.kind == TailKind::power_law) ? q * pt.exponent : 0.0;
  if (rt.kind == TailKind::geometric) {
    // rho^q gamma^t < 1; the boundary itself counts as divergent.
    return lq == 0.0 ? 0.0 : -lq / std::log(rt.gamma);
  }
  // Power-law ratios: lambda = rho^q does not depend on t.
  if (lq < 0.0) return -kInf;
  if (lq > 0.0) return kInf;
  return (1.0 - eq) / rt.exponent;
}

PressureValue pressure_with_terms(const InfiniteIFS& system, double q, double t, std::uint64_t n) {
  require_convergent(system, q, t);
  const PartialSum ps = partial_sum(system, q, t, n);
  PressureValue pv;
  pv.terms_used = ps.terms;
  const double a = ps.estimate();
  pv.value = std::log(a);
  const double err = ps.error();
  if (!ps.tail.certified() || !(err < a)) {
    pv.tail_bound = kInf;
  } else {
    pv.tail_bound = -std::log1p(-err / a) + 2.0 * kEps * std::abs(pv.value);
  }
  return pv;
}

PressureValue pressure(const InfiniteIFS& system, double q, double t, double tol) {
  if (!(tol > 0.0)) throw PreconditionError("pressure tolerance must be positive");
  std::uint64_t n = std::max<std::uint64_t>(system.explicit_count(), 16);
  while (true) {
    const PressureValue pv = pressure_with_terms(system, q, t, n);
    if (pv.tail_bound <= tol || system.finite()) return pv;
    if (n >= kMaxTerms) {
      std::ostringstream os;
      os << "pressure tolerance " << tol << " not reached with " << n << " terms (bound "
         << pv.tail_bound << ")";
      throw BudgetError(os.str());
    }
    n *= 2;
  }
}

double beta(const InfiniteIFS& system, double q, double tol) {
  if (!(q >= 0.0 && q <= 1.0)) throw PreconditionError("beta needs q in [0,1]");
  // P(1, 0) = log sum_j p_j = 0
  if (q == 1.0) return 0.0;
  Bracket b = bracket_zero(system, q);
  b = bisect(b, [&](double t) { return pressure_sign(system, q, t); });
  const PressureValue plo = pressure(system, q, b.lo, std::min(tol, 1e-12));
  const PressureValue phi = pressure(system, q, b.hi, std::min(tol, 1e-12));
  const bool use_lo = std::abs(plo.value) <= std::abs(phi.value);
  const double t = use_lo ? b.lo : b.hi;
  const double residual = std::abs(use_lo ? plo.value : phi.value);
  if (residual > tol) {
    std::ostringstream os;
    os << "beta(" << q << "): residual " << residual << " exceeds tolerance " << tol;
    throw BudgetError(os.str());
  }
  return t;
}

double solve_q_r(const InfiniteIFS& system, double r, double tol) {
  if (!(r > 0.0)) throw PreconditionError("order r must be positive");
  // g(q) = beta(q) - r q is strictly decreasing with g(0) > 0 > g(1).
  const double inner = std::min(tol, 1e-12);
  auto g = [&](double q) { return beta(system, q, inner) - r * q; };
  Bracket b{0.0, 1.0};
  b = bisect(b, [&](double q) { return g(q) >= 0.0 ? 1 : -1; });
  const double glo = g(b.lo), ghi = g(b.hi);
  const bool use_lo = std::abs(glo) <= std::abs(ghi);
  const double residual = std::abs(use_lo ? glo : ghi);
  if (residual > tol) throw BudgetError("q_r residual exceeds tolerance");
  return use_lo ? b.lo : b.hi;
}

PressureValue exponent_sum(const InfiniteIFS& system, double r, double eta, double tol) {
  PressureValue pv = pressure(system, eta, r * eta, tol);
  const double v = std::exp(pv.value);
  pv.tail_bound = v * std::expm1(pv.tail_bound);
  pv.value = v;
  return pv;
}

DimensionResult quantization_dimension(const InfiniteIFS& system, double r, double tol,
                                       bool cross_check) {
  if (!(r > 0.0)) throw PreconditionError("order r must be positive");
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  auto converges = [&](double eta) { return r * eta > theta(system, eta); };
  auto sign = [&](double eta) { return pressure_sign(system, eta, r * eta); };

  // Smallest exponent at which the sum converges (0 unless both tails are
  // power laws).
  double floor = 0.0;
  if (!converges(0.5)) {
    Bracket fb{0.5, 1.0};
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (fb.lo + fb.hi);
      if (converges(mid)) fb.hi = mid;
      else fb.lo = mid;
    }
    floor = fb.hi;
  }
  if (!converges(1.0) || sign(1.0) >= 0)
    throw ValidationError("sum of p_j s_j^r is not below 1");

  // The sum decreases in the exponent; widen the lower end towards the
  // convergence floor until it is >= 1.
  Bracket b{0.0, 1.0};
  bool found = false;
  double width = 1.0 - floor;
  for (int k = 1; k <= 80; ++k) {
    width *= 0.5;
    const double eta = floor + width;
    if (!converges(eta)) continue;
    if (sign(eta) >= 0) {
      b.lo = eta;
      found = true;
      break;
    }
    b.hi = eta;
  }
  if (!found) throw ValidationError("sum equation has no root: sum stays below 1");
  b = bisect(b, sign);

  DimensionResult res;
  res.r = r;
  const PressureValue slo = exponent_sum(system, r, b.lo);
  const PressureValue shi = exponent_sum(system, r, b.hi);
  const bool use_lo = std::abs(slo.value - 1.0) <= std::abs(shi.value - 1.0);
  res.eta = use_lo ? b.lo : b.hi;
  res.residual = std::abs((use_lo ? slo.value : shi.value) - 1.0);
  res.tail_bound = use_lo ? slo.tail_bound : shi.tail_bound;
  res.kappa = r * res.eta / (1.0 - res.eta);
  if (res.residual > tol) {
    std::ostringstream os;
    os << "kappa_r residual " << res.residual << " exceeds tolerance " << tol;
    throw BudgetError(os.str());
  }

  if (cross_check) {
    res.q_r = solve_q_r(system, r, tol);
    res.kappa_via_beta = beta(system, res.q_r, std::min(tol, 1e-12)) / (1.0 - res.q_r);
    if (std::abs(res.kappa_via_beta - res.kappa) > 10.0 * tol) {
      std::ostringstream os;
      os.precision(17);
      os << "kappa_r routes disagree: sum equation " << res.kappa << " vs beta route "
         << res.kappa_via_beta;
      throw BudgetError(os.str());
    }
  }
  return res;
}

std::vector<double> unit_grid(std::size_t points) {
  if (points < 2) throw PreconditionError("grid needs at least two points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

TemperatureCurve temperature_curve(const InfiniteIFS& system, std::span<const double> grid,
                                   double tol) {
  TemperatureCurve c;
  c.q_grid.assign(grid.begin(), grid.end());
  c.tolerance = tol;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw PreconditionError("grid must lie in [0,1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw PreconditionError("grid must be increasing");
  }
  c.beta_values.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    c.beta_values[i] = beta(system, grid[i], std::min(tol, 1e-12));
  });

  c.min_decrease = kInf;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    c.min_decrease = std::min(c.min_decrease, c.beta_values[i] - c.beta_values[i + 1]);
  c.strictly_decreasing = c.min_decrease > 0.0;
  if (!c.strictly_decreasing) {
    std::ostringstream os;
    os << "beta not strictly decreasing on grid (min step " << c.min_decrease << ")";
    c.diagnostics.push_back(os.str());
  }

  c.min_convexity_residual = kInf;
  const double match = 1e-12;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 2; j < grid.size(); ++j) {
      const double mid = 0.5 * (grid[i] + grid[j]);
      const auto it = std::lower_bound(grid.begin() + static_cast<std::ptrdiff_t>(i),
                                       grid.begin() + static_cast<std::ptrdiff_t>(j), mid - match);
      if (it == grid.end() || std::abs(*it - mid) > match) continue;
      const std::size_t k = static_cast<std::size_t>(it - grid.begin());
      const double res = 0.5 * (c.beta_values[i] + c.beta_values[j]) - c.beta_values[k];
      c.min_convexity_residual = std::min(c.min_convexity_residual, res);
    }
  }
  // Consecutive chords: slopes must not decrease.
  for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
    const double s1 = (c.beta_values[i + 1] - c.beta_values[i]) / (grid[i + 1] - grid[i]);
    const double s2 = (c.beta_values[i + 2] - c.beta_values[i + 1]) / (grid[i + 2] - grid[i + 1]);
    const double res = 0.5 * (s2 - s1) * std::min(grid[i + 1] - grid[i], grid[i + 2] - grid[i + 1]);
    c.min_convexity_residual = std::min(c.min_convexity_residual, res);
  }
  c.midpoint_convex = c.min_convexity_residual >= -tol;
  if (!c.midpoint_convex) {
    std::ostringstream os;
    os << "beta fails midpoint convexity on grid (residual " << c.min_convexity_residual
       << "); solver tolerance too loose?";
    c.diagnostics.push_back(os.str());
  }
  return c;
}

void require_pressure_condition(const InfiniteIFS& system, std::size_t grid_points) {
  for (double q : unit_grid(grid_points)) {
    try {
      (void)bracket_zero(system, q);
    } catch (const BudgetError& e) {
      throw ValidationError(std::string("finiteness condition could not be verified: ") + e.what());
    } catch (const DivergenceError& e) {
      throw ValidationError(std::string("finiteness condition fails: ") + e.what());
    }
  }
}

}  // namespace qcoef
