#include <cmath>
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "qcoef/errors.hpp"
#include "qcoef/series.hpp"
#include "qcoef/thermodynamics.hpp"

using namespace qcoef;

namespace {

const double kLog2Log3 = std::log(2.0) / std::log(3.0);

// p_j = j^-2 / zeta(2) with s_j = 3^-j, placed like gamma3.
SystemDescription power_law_probs() {
  SystemDescription d = builtin_system("gamma3");
  d.id = "zeta-probs";
  d.prob_tail = {TailKind::power_law, 6.0 / (M_PI * M_PI), 0.5, 2.0};
  return d;
}

// Direct summation of sum_j (p_j s_j^r)^eta, truncated where terms vanish.
double direct_sum(double r, double eta) {
  double s = 0.0;
  for (int j = 4000; j >= 1; --j) {
    const double p = 6.0 / (M_PI * M_PI) / (double(j) * j);
    s += std::pow(p * std::pow(3.0, -r * j), eta);
  }
  return s;
}

double direct_kappa(double r) {
  double lo = 1e-9, hi = 1.0 - 1e-9;  // eta
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (direct_sum(r, mid) > 1.0) lo = mid;
    else hi = mid;
  }
  const double eta = 0.5 * (lo + hi);
  return r * eta / (1.0 - eta);
}

}  // namespace

TEST_CASE("theta follows the tail families") {
  const InfiniteIFS g = fixtures::builtin("gamma3");
  for (double q : {0.0, 0.3, 1.0})
    CHECK(theta(g, q) == doctest::Approx(-q * kLog2Log3).epsilon(1e-14));
  CHECK(theta(fixtures::builtin("uniform4"), 0.5) == -std::numeric_limits<double>::infinity());
  const InfiniteIFS z(power_law_probs());
  CHECK(theta(z, 0.2) == 0.0);
  CHECK(theta(z, 0.9) == 0.0);
}

TEST_CASE("dyadic pressure closed form log(1/(2^{q+t}-1))") {
  const InfiniteIFS d = fixtures::builtin("dyadic");
  CHECK(std::abs(pressure(d, 1.0, 0.0).value) <= 1e-12);
  CHECK(std::abs(pressure(d, 0.0, 1.0).value) <= 1e-12);
  for (double q : {0.0, 0.25, 0.7, 1.0}) {
    const PressureValue p = pressure(d, q, 2.0 - q, 1e-13);
    CHECK(p.value == doctest::Approx(-std::log(3.0)).epsilon(1e-12));
    CHECK(p.tail_bound <= 1e-13);
    CHECK(p.terms_used >= 1);
  }
  const PressureValue coarse = pressure_with_terms(d, 0.5, 1.0, 4);
  CHECK(coarse.value == doctest::Approx(-std::log(std::pow(2.0, 1.5) - 1.0)).epsilon(1e-12));
}

TEST_CASE("pressure rejects divergent arguments and reports tail bounds") {
  const InfiniteIFS g = fixtures::builtin("gamma3");
  CHECK_THROWS_AS(pressure(g, 1.0, -kLog2Log3), DivergenceError);
  CHECK_THROWS_AS(pressure(g, 1.0, -1.0), DivergenceError);
  CHECK_THROWS_AS(pressure(g, 1.0, 0.0, 0.0), PreconditionError);
  const InfiniteIFS z(power_law_probs());
  const PressureValue p = pressure(z, 0.5, 0.5, 1e-12);
  CHECK(p.tail_bound <= 1e-12);
  double direct = 0.0;
  for (int j = 4000; j >= 1; --j)
    direct += std::sqrt(6.0 / (M_PI * M_PI) / (double(j) * j)) * std::pow(3.0, -0.5 * j);
  CHECK(p.value == doctest::Approx(std::log(direct)).epsilon(1e-12));
}

TEST_CASE("beta solves P(q, beta(q)) = 0") {
  const InfiniteIFS d = fixtures::builtin("dyadic");
  for (double q : unit_grid(21)) CHECK(std::abs(beta(d, q, 1e-12) - (1.0 - q)) <= 1e-9);
  const InfiniteIFS g = fixtures::builtin("gamma3");
  CHECK(beta(g, 0.0, 1e-12) == doctest::Approx(kLog2Log3).epsilon(1e-10));
  for (const char* name : {"dyadic", "gamma3", "disk-gamma", "uniform4"})
    CHECK(std::abs(beta(fixtures::builtin(name), 1.0)) <= 1e-10);
  CHECK(std::abs(beta(InfiniteIFS(power_law_probs()), 1.0)) <= 1e-10);
  CHECK_THROWS_AS(beta(g, 1.5), PreconditionError);
}

TEST_CASE("solve_q_r on the dyadic family") {
  const InfiniteIFS d = fixtures::builtin("dyadic");
  CHECK(solve_q_r(d, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(solve_q_r(d, 3.0) == doctest::Approx(0.25).epsilon(1e-9));
  const InfiniteIFS g = fixtures::builtin("gamma3");
  for (double r : {0.5, 1.0, 2.0}) {
    const double q = solve_q_r(g, r);
    CHECK(q > 0.0);
    CHECK(q < 1.0);
    CHECK(std::abs(beta(g, q, 1e-12) - r * q) <= 1e-9);
  }
  CHECK_THROWS_AS(solve_q_r(g, 0.0), PreconditionError);
}

TEST_CASE("quantization dimension on closed-form families") {
  const InfiniteIFS g = fixtures::builtin("gamma3");
  for (double r : {1.0, 2.0}) {
    const DimensionResult res = quantization_dimension(g, r);
    CHECK(std::abs(res.kappa - kLog2Log3) <= 1e-9);
    CHECK(std::abs(res.kappa_via_beta - kLog2Log3) <= 1e-9);
    CHECK(res.residual <= 1e-10);
    CHECK(res.eta == doctest::Approx(res.kappa / (r + res.kappa)));
  }
  const InfiniteIFS u = fixtures::builtin("uniform4");
  for (double r : {1.0, 2.0})
    CHECK(std::abs(quantization_dimension(u, r).kappa - std::log(4.0) / std::log(5.0)) <= 1e-9);

  // s_i = gamma^i, p_i = gamma^{a i}, a = log 2 / |log gamma|: kappa = log 2 / |log gamma|
  for (double gamma : {0.2, 0.25}) {
    SystemDescription desc = builtin_system("gamma3");
    desc.map_tail.gamma = gamma;
    const InfiniteIFS s(desc);
    for (double r : {0.5, 1.0, 3.0})
      CHECK(std::abs(quantization_dimension(s, r).kappa - std::log(2.0) / -std::log(gamma)) <= 1e-9);
  }
}

TEST_CASE("quantization dimension matches direct summation for power-law weights") {
  const InfiniteIFS z(power_law_probs());
  for (double r : {1.0, 2.0}) {
    const DimensionResult res = quantization_dimension(z, r);
    CHECK(res.kappa == doctest::Approx(direct_kappa(r)).epsilon(1e-9));
    CHECK(std::abs(res.kappa - res.kappa_via_beta) <= 1e-9);
  }
}

TEST_CASE("exponent_sum is exp P(eta, r eta)") {
  const InfiniteIFS g = fixtures::builtin("gamma3");
  // sum 6^{-eta j} = x / (1 - x), x = 6^{-eta}
  const double eta = 0.7 / 1.7;
  const double x = std::pow(6.0, -eta);
  CHECK(exponent_sum(g, 1.0, eta).value == doctest::Approx(x / (1 - x)).epsilon(1e-13));
}

TEST_CASE("temperature curves decrease and are convex") {
  const InfiniteIFS d = fixtures::builtin("dyadic");
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const TemperatureCurve t = temperature_curve(d, grid);
  CHECK(t.beta_values[0] == doctest::Approx(1.0));
  CHECK(t.beta_values[1] == doctest::Approx(0.5));
  CHECK(std::abs(t.beta_values[2]) <= 1e-10);
  for (const char* name : {"dyadic", "gamma3", "disk-gamma", "uniform4"}) {
    const TemperatureCurve c = temperature_curve(fixtures::builtin(name), unit_grid(41), 1e-8);
    CHECK(c.strictly_decreasing);
    CHECK(c.midpoint_convex);
    CHECK(c.min_convexity_residual >= -1e-8);
    CHECK(std::abs(c.beta_values.back()) <= 1e-10);
  }
}

TEST_CASE("pressure condition is enforced for power-law ratios") {
  // s_j = j^-1.5 / 4 with geometric weights: P(q,u) is finite for u above
  // (1 - 0) / 1.5 at q = 0 and finite everywhere for q > 0.
  SystemDescription d;
  d.id = "power-ratios";
  d.domain = Domain::interval(0.0, 1.0);
  d.map_tail = {TailKind::power_law, 0.25, 0.5, 1.5};
  d.prob_tail = {TailKind::geometric, 1.0, 0.5, 2.0};
  d.placement.rule = Placement::Rule::packed;
  d.thermodynamics_only = true;
  const InfiniteIFS s(d);
  CHECK(theta(s, 0.0) == doctest::Approx(1.0 / 1.5));
  CHECK(theta(s, 0.5) == -std::numeric_limits<double>::infinity());
  CHECK_NOTHROW(require_pressure_condition(s));
  CHECK(std::abs(beta(s, 1.0)) <= 1e-10);
}

TEST_CASE("series utilities") {
  const Enclosure z = hurwitz_zeta(2.0, 1.0);
  CHECK(z.value == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-14));
  CHECK(z.error <= 1e-13);
  PowerGeometricSeries geo{0.0, 0.0, std::log(0.5)};
  CHECK(geo.converges());
  CHECK(geo.tail(3).value == doctest::Approx(0.125).epsilon(1e-15));
  PowerGeometricSeries harmonic{0.0, 1.0, 0.0};
  CHECK_FALSE(harmonic.converges());
  CompensatedSum s;
  s.add(1.0);
  s.add(1e-17);
  s.add(-1.0);
  CHECK(s.total() == doctest::Approx(1e-17));
}
