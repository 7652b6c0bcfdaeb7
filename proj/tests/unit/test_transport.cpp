#include <cmath>
#include <random>

#include "../common/oracles.hpp"
#include "doctest.h"
#include "qcoef/errors.hpp"
#include "qcoef/transport.hpp"

using namespace qcoef;

namespace {

DiscreteMeasure on_line(std::vector<double> xs, std::vector<double> m) {
  DiscreteMeasure d;
  for (double x : xs) d.atoms.push_back({x, 0.0});
  d.masses = std::move(m);
  return d;
}

/// Random measure with masses k/den on up to `atoms` distinct grid points.
DiscreteMeasure random_measure(std::mt19937_64& gen, std::size_t atoms, std::size_t den, bool planar) {
  std::uniform_int_distribution<int> coord(0, 40);
  DiscreteMeasure d;
  while (d.atoms.size() < atoms) {
    const Point p{coord(gen) / 8.0, planar ? coord(gen) / 8.0 : 0.0};
    if (std::find(d.atoms.begin(), d.atoms.end(), p) == d.atoms.end()) d.atoms.push_back(p);
  }
  std::vector<std::size_t> units(atoms, 1);
  for (std::size_t k = atoms; k < den; ++k) units[gen() % atoms] += 1;
  for (std::size_t u : units) d.masses.push_back(static_cast<double>(u) / static_cast<double>(den));
  return d;
}

void check_coupling(const TransportResult& t, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<double> row(mu.size(), 0.0), col(nu.size(), 0.0);
  for (const CouplingEntry& e : t.coupling) {
    CHECK(e.mass > 0.0);
    row.at(e.i) += e.mass;
    col.at(e.j) += e.mass;
  }
  for (std::size_t i = 0; i < mu.size(); ++i) CHECK(row[i] == doctest::Approx(mu.masses[i]).epsilon(1e-12));
  for (std::size_t j = 0; j < nu.size(); ++j) CHECK(col[j] == doctest::Approx(nu.masses[j]).epsilon(1e-12));
}

}  // namespace

TEST_CASE("wasserstein_1d examples") {
  const DiscreteMeasure a = on_line({0.0, 1.0}, {0.5, 0.5});
  CHECK(wasserstein_1d(a, a, 2.0).rho == 0.0);
  CHECK(wasserstein_1d(on_line({0.0}, {1.0}), on_line({1.0}, {1.0}), 2.0).rho == doctest::Approx(1.0));
  const TransportResult half = wasserstein_1d(a, on_line({0.5}, {1.0}), 1.0);
  CHECK(half.rho == doctest::Approx(0.5));
  check_coupling(half, a, on_line({0.5}, {1.0}));
  CHECK_THROWS_AS(wasserstein_1d(a, a, 0.5), PreconditionError);
}

TEST_CASE("wasserstein_assignment examples") {
  const DiscreteMeasure mu = DiscreteMeasure::uniform({{0.0, 0.0}, {1.0, 1.0}});
  const DiscreteMeasure nu = DiscreteMeasure::uniform({{1.0, 0.0}, {0.0, 1.0}});
  CHECK(wasserstein_assignment(mu, nu, 2.0).rho == doctest::Approx(1.0));
  for (double r : {0.5, 1.0, 2.0}) CHECK(wasserstein_assignment(mu, mu, r).rho == 0.0);
  const DiscreteMeasure odd = on_line({0.0, 1.0}, {1.0 / 3.0, 2.0 / 3.0});
  const TransportResult t = wasserstein_assignment(odd, on_line({0.0, 1.0}, {0.5, 0.5}), 1.0);
  CHECK(t.rho == doctest::Approx(1.0 / 6.0));
  const DiscreteMeasure irrational = on_line({0.0, 1.0}, {1.0 / M_PI, 1.0 - 1.0 / M_PI});
  CHECK_THROWS_AS(wasserstein_assignment(irrational, odd, 1.0), InstanceTooLargeError);
}

TEST_CASE("solve_assignment finds the minimum") {
  const std::vector<double> cost{4, 1, 3, 2, 0, 5, 3, 2, 2};
  const auto a = solve_assignment(cost, 3);
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) total += cost[i * 3 + a[i]];
  CHECK(total == 5.0);
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5;
    std::vector<double> c(n * n);
    for (double& v : c) v = static_cast<double>(gen() % 100);
    const auto best = solve_assignment(c, n);
    double got = 0.0;
    for (std::size_t i = 0; i < n; ++i) got += c[i * n + best[i]];
    std::vector<std::size_t> perm{0, 1, 2, 3, 4};
    double brute = 1e300;
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += c[i * n + perm[i]];
      brute = std::min(brute, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got == brute);
  }
}

TEST_CASE("transport solvers agree and satisfy the metric axioms") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    const bool planar = trial % 2 == 1;
    const DiscreteMeasure a = random_measure(gen, 2 + gen() % 4, 12, planar);
    const DiscreteMeasure b = random_measure(gen, 2 + gen() % 4, 12, planar);
    const DiscreteMeasure c = random_measure(gen, 2 + gen() % 4, 12, planar);
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
      const TransportResult ab = wasserstein_assignment(a, b, r);
      check_coupling(ab, a, b);
      CHECK(ab.cost == doctest::Approx(std::pow(ab.rho, r)));
      CHECK(wasserstein_assignment(b, a, r).rho == doctest::Approx(ab.rho).epsilon(1e-12));
      CHECK(wasserstein_assignment(a, a, r).rho == 0.0);
      if (r >= 1.0) {
        const double ac = wasserstein_assignment(a, c, r).rho;
        const double cb = wasserstein_assignment(c, b, r).rho;
        CHECK(ab.rho <= ac + cb + 1e-12);
        if (!planar) {
          const TransportResult one = wasserstein_1d(a, b, r);
          CHECK(std::abs(one.rho - ab.rho) <= 1e-10);
          check_coupling(one, a, b);
        }
      }
    }
  }
}

TEST_CASE("best_discrete_approx examples") {
  const DiscreteMeasure two = DiscreteMeasure::uniform({{0.0, 0.0}, {1.0, 0.0}});
  const DiscreteApproximation one = best_discrete_approx(two, 1, 2.0);
  REQUIRE(one.q.size() == 1);
  CHECK(one.q.atoms[0].x == doctest::Approx(0.5));
  CHECK(one.cost == doctest::Approx(0.25));
  CHECK(best_discrete_approx(two, 2, 2.0).rho == 0.0);
  CHECK(best_discrete_approx(two, 5, 1.0).rho == 0.0);

  const DiscreteMeasure three = DiscreteMeasure::uniform({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}});
  const DiscreteApproximation b = best_discrete_approx(three, 2, 2.0);
  CHECK(b.cost == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  REQUIRE(b.q.size() == 2);
  CHECK(b.cells[0] == b.cells[1]);
  CHECK(b.cells[0] != b.cells[2]);
  CHECK(b.q.atoms[b.cells[0]].x == doctest::Approx(0.5));
  CHECK(b.q.masses[b.cells[0]] == doctest::Approx(2.0 / 3.0));
  CHECK(b.q.atoms[b.cells[2]].x == doctest::Approx(2.0));
  // the transport distance to the returned Q is the same number
  CHECK(wasserstein_assignment(three, b.q, 2.0).cost == doctest::Approx(b.cost));

  std::vector<Point> many;
  for (int i = 0; i < 13; ++i) many.push_back({static_cast<double>(i), 0.0});
  CHECK_THROWS_AS(best_discrete_approx(DiscreteMeasure::uniform(many), 2, 2.0), InstanceTooLargeError);
  CHECK_THROWS_AS(best_discrete_approx(three, 0, 2.0), PreconditionError);
}

TEST_CASE("best_discrete_approx matches the partition oracle") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 15; ++trial) {
    const bool planar = trial % 3 == 0;
    const DiscreteMeasure p = random_measure(gen, 3 + gen() % 5, 20, planar);
    for (double r : {1.0, 2.0})
      for (std::size_t n : {1u, 2u, 3u}) {
        const DiscreteApproximation a = best_discrete_approx(p, n, r);
        CHECK(a.q.size() <= n);
        CHECK(a.cost == doctest::Approx(oracle::partition_error(p.atoms, p.masses, n, r)).epsilon(1e-8));
        CHECK(a.rho == doctest::Approx(std::pow(a.cost, 1.0 / r)));
      }
  }
}

TEST_CASE("DiscreteMeasure validation") {
  CHECK_THROWS_AS(on_line({0.0, 1.0}, {0.5, 0.6}).validate(), ValidationError);
  CHECK_THROWS_AS(on_line({0.0, 0.0}, {0.5, 0.5}).validate(), ValidationError);
  CHECK_THROWS_AS(on_line({0.0, 1.0}, {1.0, 0.0}).validate(), ValidationError);
  CHECK_NOTHROW(on_line({0.0, 1.0}, {0.25, 0.75}).validate());
  CHECK(on_line({0.0, 1.0}, {0.25, 0.75}).dimension() == 1);
  CHECK(DiscreteMeasure::uniform({{0.0, 1.0}}).dimension() == 2);
}
