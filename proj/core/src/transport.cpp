#include "qcoef/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "qcoef/errors.hpp"
#include "qcoef/quantizer.hpp"
#include "qcoef/series.hpp"

namespace qcoef {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t common_denominator(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  for (std::size_t d = 1; d <= kMaxAssignmentAtoms; ++d) {
    auto fits = [&](const DiscreteMeasure& m) {
      return std::all_of(m.masses.begin(), m.masses.end(), [&](double w) {
        const double k = w * static_cast<double>(d);
        return std::abs(k - std::round(k)) <= 1e-9 && std::round(k) >= 1.0;
      });
    };
    if (fits(a) && fits(b)) return d;
  }
  throw InstanceTooLargeError("masses need a common denominator above " +
                              std::to_string(kMaxAssignmentAtoms));
}

std::vector<std::size_t> expand(const DiscreteMeasure& m, std::size_t d) {
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto k = static_cast<std::size_t>(std::llround(m.masses[i] * static_cast<double>(d)));
    owner.insert(owner.end(), k, i);
  }
  return owner;
}

void finish(TransportResult& t, double r) {
  t.rho = t.cost > 0.0 ? std::pow(t.cost, 1.0 / r) : 0.0;
  std::sort(t.coupling.begin(), t.coupling.end(), [](const CouplingEntry& a, const CouplingEntry& b) {
    return a.i < b.i || (a.i == b.i && a.j < b.j);
  });
}

}  // namespace

int DiscreteMeasure::dimension() const {
  return std::all_of(atoms.begin(), atoms.end(), [](const Point& p) { return p.y == 0.0; }) ? 1 : 2;
}

void DiscreteMeasure::validate(double tol) const {
  if (atoms.empty()) throw ValidationError("discrete measure has no atoms");
  if (atoms.size() != masses.size()) throw ValidationError("atoms and masses differ in length");
  CompensatedSum s;
  for (double m : masses) {
    if (!(m > 0.0)) throw ValidationError("discrete measure masses must be positive");
    s.add(m);
  }
  if (std::abs(s.total() - 1.0) > tol) throw ValidationError("discrete measure masses must sum to 1");
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (atoms[i] == atoms[j]) throw ValidationError("discrete measure atoms must be distinct");
}

DiscreteMeasure DiscreteMeasure::uniform(std::vector<Point> atoms) {
  DiscreteMeasure m;
  m.masses.assign(atoms.size(), atoms.empty() ? 0.0 : 1.0 / static_cast<double>(atoms.size()));
  m.atoms = std::move(atoms);
  return m;
}

TransportResult wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double r) {
  if (!(r >= 1.0))
    throw PreconditionError("the monotone coupling needs r >= 1; use wasserstein_assignment");
  mu.validate();
  nu.validate();
  if (mu.dimension() != 1 || nu.dimension() != 1)
    throw PreconditionError("wasserstein_1d needs measures on the line");
  auto order = [](const DiscreteMeasure& m) {
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return m.atoms[a].x < m.atoms[b].x; });
    return idx;
  };
  const auto a = order(mu), b = order(nu);
  TransportResult t;
  CompensatedSum cost;
  std::size_t i = 0, j = 0;
  double ra = mu.masses[a[0]], rb = nu.masses[b[0]];
  while (i < a.size() && j < b.size()) {
    const double m = std::min(ra, rb);
    if (m > 0.0) {
      cost.add(m * rpow(std::abs(mu.atoms[a[i]].x - nu.atoms[b[j]].x), r));
      t.coupling.push_back({a[i], b[j], m});
    }
    ra -= m;
    rb -= m;
    const bool last_a = i + 1 == a.size(), last_b = j + 1 == b.size();
    // mass left over from rounding is pushed onto the final atoms
    if (ra <= 1e-15 && !last_a) ra = mu.masses[a[++i]];
    else if (ra <= 1e-15) ++i;
    if (rb <= 1e-15 && !last_b) rb = nu.masses[b[++j]];
    else if (rb <= 1e-15) ++j;
  }
  t.cost = cost.total();
  finish(t, r);
  return t;
}

std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
  if (cost.size() != n * n) throw PreconditionError("assignment cost matrix must be n x n");
  // Shortest augmenting paths with potentials, 1-based with a sentinel column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

TransportResult wasserstein_assignment(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       double r) {
  if (!(r > 0.0)) throw PreconditionError("wasserstein_assignment needs r > 0");
  mu.validate();
  nu.validate();
  const std::size_t d = common_denominator(mu, nu);
  const auto ra = expand(mu, d), rb = expand(nu, d);
  if (ra.size() != d || rb.size() != d)
    throw PreconditionError("masses do not expand to a common number of atoms");
  std::vector<double> cost(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      cost[i * d + j] = rpow(distance(mu.atoms[ra[i]], nu.atoms[rb[j]]), r);
  const auto match = solve_assignment(cost, d);
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
  CompensatedSum total;
  for (std::size_t i = 0; i < d; ++i) {
    ++counts[{ra[i], rb[match[i]]}];
    total.add(cost[i * d + match[i]]);
  }
  TransportResult t;
  t.cost = total.total() / static_cast<double>(d);
  for (const auto& [key, c] : counts)
    t.coupling.push_back({key.first, key.second, static_cast<double>(c) / static_cast<double>(d)});
  finish(t, r);
  return t;
}

DiscreteApproximation best_discrete_approx(const DiscreteMeasure& p, std::size_t n, double r) {
  if (n == 0) throw PreconditionError("best_discrete_approx needs n >= 1");
  if (!(r > 0.0)) throw PreconditionError("best_discrete_approx needs r > 0");
  p.validate();
  const std::size_t m = p.size();
  if (m > kMaxApproxAtoms)
    throw InstanceTooLargeError("best_discrete_approx supports at most " +
                                std::to_string(kMaxApproxAtoms) + " atoms");
  DiscreteApproximation best;
  if (n >= m) {
    best.q = p;
    best.cells.resize(m);
    std::iota(best.cells.begin(), best.cells.end(), std::size_t{0});
    return best;
  }
  const int dim = p.dimension();
  if (dim == 2 && r < 1.0) throw PreconditionError("r < 1 centers are only supported in dimension 1");

  // cost and center of every subset, memoized by bit mask
  const std::size_t subsets = std::size_t{1} << m;
  std::vector<double> subset_cost(subsets, -1.0);
  std::vector<Point> subset_center(subsets);
  auto cell = [&](std::size_t mask) {
    if (subset_cost[mask] >= 0.0) return subset_cost[mask];
    std::vector<Point> pts;
    std::vector<double> w;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1u) {
        pts.push_back(p.atoms[i]);
        w.push_back(p.masses[i]);
      }
    Point c;
    try {
      c = r_center(pts, w, r, dim);
    } catch (const CenterBudgetError& e) {
      c = e.best();
    }
    subset_center[mask] = c;
    subset_cost[mask] = r_cost(pts, w, c, r);
    return subset_cost[mask];
  };

  // restricted growth strings: label[0] = 0, label[i] <= 1 + max(label[<i])
  std::vector<std::size_t> label(m, 0), prefix_max(m, 0);
  double best_cost = kInf;
  std::vector<std::size_t> best_label;
  auto evaluate = [&](std::size_t blocks) {
    std::vector<std::size_t> masks(blocks, 0);
    for (std::size_t i = 0; i < m; ++i) masks[label[i]] |= std::size_t{1} << i;
    double total = 0.0;
    for (std::size_t mask : masks) total += cell(mask);
    if (total < best_cost) {
      best_cost = total;
      best_label = label;
    }
  };
  // iterative enumeration over position m-1 .. 1
  std::size_t i = m - 1;
  while (true) {
    evaluate(prefix_max[m - 1] + 1);
    // advance to the next string with at most n blocks
    i = m - 1;
    while (i > 0) {
      const std::size_t limit = std::min(prefix_max[i - 1] + 1, n - 1);
      if (label[i] < limit) break;
      --i;
    }
    if (i == 0) break;
    ++label[i];
    prefix_max[i] = std::max(prefix_max[i - 1], label[i]);
    for (std::size_t k = i + 1; k < m; ++k) {
      label[k] = 0;
      prefix_max[k] = prefix_max[i];
    }
  }

  const std::size_t blocks = *std::max_element(best_label.begin(), best_label.end()) + 1;
  std::vector<std::size_t> masks(blocks, 0);
  for (std::size_t k = 0; k < m; ++k) masks[best_label[k]] |= std::size_t{1} << k;
  best.cells.resize(m);
  best.cost = best_cost;
  best.rho = best_cost > 0.0 ? std::pow(best_cost, 1.0 / r) : 0.0;
  // merge cells whose centers coincide so the atoms stay distinct
  for (std::size_t b = 0; b < blocks; ++b) {
    double mass = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      if (best_label[k] == b) mass += p.masses[k];
    const Point c = subset_center[masks[b]];
    const auto it = std::find(best.q.atoms.begin(), best.q.atoms.end(), c);
    const auto slot = static_cast<std::size_t>(it - best.q.atoms.begin());
    if (it != best.q.atoms.end()) {
      best.q.masses[slot] += mass;
    } else {
      best.q.atoms.push_back(c);
      best.q.masses.push_back(mass);
    }
    for (std::size_t k = 0; k < m; ++k)
      if (best_label[k] == b) best.cells[k] = slot;
  }
  return best;
}

}  // namespace qcoef
