#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "qcoef/errors.hpp"
#include "qcoef/ifs.hpp"

using namespace qcoef;

namespace {

// Interval image of [0,1] under a 1D similarity.
std::pair<double, double> image(const Similarity& s) {
  const double a = s({0.0, 0.0}).x, b = s({1.0, 0.0}).x;
  return {std::min(a, b), std::max(a, b)};
}

Word random_word(std::mt19937_64& gen, std::size_t max_len, Symbol max_symbol) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<Symbol> sym(1, max_symbol);
  Word w;
  const std::size_t n = len(gen);
  for (std::size_t i = 0; i < n; ++i) w.symbols.push_back(sym(gen));
  return w;
}

}  // namespace

TEST_CASE("map_for_index reads the prefix and evaluates the tail formula") {
  const InfiniteIFS g = fixtures::builtin("gamma3");
  CHECK(map_for_index(g, 1).ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(map_for_index(g, 4).ratio == doctest::Approx(1.0 / 81.0).epsilon(1e-15));
  const InfiniteIFS two(fixtures::two_map_description());
  CHECK(map_for_index(two, 2).ratio == doctest::Approx(1.0 / 9.0));
  CHECK_THROWS_AS(map_for_index(two, 3), IndexOutOfFamilyError);
  CHECK_THROWS_AS(map_for_index(two, 0), PreconditionError);
}

TEST_CASE("apply_word composes left to right as S_w1 o S_w2") {
  const InfiniteIFS two(fixtures::two_map_description());
  CHECK(apply_word(two, Word{}, {0.3, 0.0}).x == doctest::Approx(0.3));
  CHECK(apply_word(two, Word{1, 2}, {0.0, 0.0}).x == doctest::Approx(8.0 / 27.0).epsilon(1e-15));
  CHECK(apply_word(two, Word{2, 1}, {0.0, 0.0}).x == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  const Similarity m = word_map(two, Word{1, 2});
  CHECK(m({0.5, 0.0}).x == doctest::Approx(apply_word(two, Word{1, 2}, {0.5, 0.0}).x));
}

TEST_CASE("word_ratio is the product of ratios and bounded by s^n") {
  const InfiniteIFS g = fixtures::builtin("gamma3");
  CHECK(word_ratio(g, Word{}) == 1.0);
  CHECK(word_ratio(g, Word{1, 2}) == doctest::Approx(1.0 / 27.0).epsilon(1e-15));
  std::mt19937_64 gen(7);
  for (int k = 0; k < 200; ++k) {
    const Word w = random_word(gen, 12, 40);
    CHECK(word_ratio(g, w) <= std::pow(g.sup_ratio(), static_cast<double>(w.length())) * (1 + 1e-12));
  }
}

TEST_CASE("word helpers") {
  const Word w{1, 2, 3};
  CHECK(w.parent() == Word{1, 2});
  CHECK(Word{}.parent() == Word{});
  CHECK(w.child(4) == Word{1, 2, 3, 4});
  CHECK(Word{1, 2}.is_prefix_of(w));
  CHECK_FALSE(Word{2}.is_prefix_of(w));
  CHECK(Word{}.is_prefix_of(w));
  CHECK(to_string(w) == "(1,2,3)");
}

TEST_CASE("similarities scale distances by their ratio") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<Symbol> js(1, 1000);
  for (const char* name : {"gamma3", "disk-gamma"}) {
    const InfiniteIFS s = fixtures::builtin(name);
    for (int k = 0; k < 300; ++k) {
      const Symbol j = js(gen);
      Point x{u(gen), s.dimension() == 2 ? u(gen) : 0.0};
      Point y{u(gen), s.dimension() == 2 ? u(gen) : 0.0};
      if (s.dimension() == 1) {
        x.x = 0.5 + 0.5 * x.x;
        y.x = 0.5 + 0.5 * y.x;
      }
      const Similarity m = s.map(j);
      const double d = distance(x, y);
      CHECK(std::abs(distance(m(x), m(y)) - s.ratio(j) * d) <= 1e-10 * d);
      CHECK(m.ratio == doctest::Approx(std::pow(1.0 / 3.0, static_cast<double>(j))).epsilon(1e-12));
    }
  }
}

TEST_CASE("cylinder diameters match word ratios and cylinders are nested") {
  std::mt19937_64 gen(3);
  for (const char* name : {"gamma3", "disk-gamma", "uniform4"}) {
    const InfiniteIFS s = fixtures::builtin(name);
    const Symbol top = s.finite() ? 4 : 30;
    const Domain& X = s.domain();
    const Point a = s.dimension() == 1 ? Point{0.0, 0.0} : Point{-1.0, 0.0};
    const Point b = s.dimension() == 1 ? Point{1.0, 0.0} : Point{1.0, 0.0};
    for (int k = 0; k < 100; ++k) {
      const Word w = random_word(gen, 12, top);
      const double geometric = distance(apply_word(s, w, a), apply_word(s, w, b));
      CHECK(std::abs(geometric - word_ratio(s, w) * X.diameter()) <= 1e-10);
      CHECK(cylinder_diameter(s, w) == doctest::Approx(word_ratio(s, w) * X.diameter()));
      if (!w.empty()) {
        // S_w = S_{w^-} o S_{w_last} and S_{w_last}(X) lies in X
        const Similarity last = s.map(w.symbols.back());
        CHECK(X.maps_into_self(last, 1e-12));
        for (const Point& e : X.extreme_points())
          CHECK(distance(apply_word(s, w, e), apply_word(s, w.parent(), last(e))) <= 1e-12);
      }
    }
  }
}

TEST_CASE("validate_separation reports gaps and overlaps") {
  SystemDescription d;
  d.domain = Domain::interval(0.0, 1.0);
  d.map_prefix = {{1.0 / 3.0, Mat2::identity(), {0.0, 0.0}},
                  {1.0 / 3.0, Mat2::identity(), {2.0 / 3.0, 0.0}}};
  d.prob_prefix = {0.5, 0.5};
  const InfiniteIFS cantor(d);
  const SeparationReport rep = validate_separation(cantor, 2, 1);
  CHECK(rep.passed);
  CHECK(rep.min_gap == doctest::Approx(1.0 / 3.0));

  d.map_prefix = {{0.5, Mat2::identity(), {0.0, 0.0}}, {0.5, Mat2::identity(), {0.25, 0.0}}};
  CHECK_THROWS_AS(InfiniteIFS{d}, ValidationError);
  d.thermodynamics_only = true;
  const InfiniteIFS overlapping(d);
  const SeparationReport bad = validate_separation(overlapping, 2, 1);
  CHECK_FALSE(bad.passed);
  CHECK(bad.min_gap == 0.0);
  CHECK_THROWS_AS(validate_separation(overlapping, 1, 1), PreconditionError);
}

TEST_CASE("disk placement gap equals the shell geometry") {
  const InfiniteIFS disk = fixtures::builtin("disk-gamma");
  const double phi = disk.description().placement.angle_step;
  const std::size_t k = 12;
  double expected = 1e300;
  for (std::size_t i = 1; i <= k; ++i)
    for (std::size_t j = i + 1; j <= k; ++j) {
      const double si = std::pow(3.0, -static_cast<double>(i));
      const double sj = std::pow(3.0, -static_cast<double>(j));
      const Point ci{(1 - 3 * si) * std::cos(phi * i), (1 - 3 * si) * std::sin(phi * i)};
      const Point cj{(1 - 3 * sj) * std::cos(phi * j), (1 - 3 * sj) * std::sin(phi * j)};
      expected = std::min(expected, distance(ci, cj) - si - sj);
    }
  const SeparationReport rep = validate_separation(disk, k, 1);
  CHECK(rep.passed);
  CHECK(rep.level_gaps.at(0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("truncation absorbs the tail into the hull map") {
  const InfiniteIFS g = fixtures::builtin("gamma3");
  for (std::uint64_t N = 1; N <= 30; ++N) {
    const FiniteTruncation t = truncate(g, N);
    REQUIRE(t.maps.size() == N + 1);
    double sum = 0.0;
    for (double p : t.probs) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(t.probs.back() == doctest::Approx(std::pow(0.5, static_cast<double>(N))).epsilon(1e-14));
    // every S_j(X), j > N, sits inside T_1(X) = [0, 3^-N]
    const auto [hlo, hhi] = image(t.maps.back());
    for (Symbol j = N + 1; j <= N + 40; ++j) {
      const auto [lo, hi] = image(g.map(j));
      CHECK(lo >= hlo - 1e-15);
      CHECK(hi <= hhi + 1e-15);
    }
  }
  CHECK(truncate(g, 3).probs.back() == doctest::Approx(0.125));

  SystemDescription d = builtin_system("gamma3");
  d.j0 = 3;
  const InfiniteIFS late(d);
  CHECK_THROWS_AS(truncate(late, 2), PreconditionError);

  const InfiniteIFS two(fixtures::two_map_description());
  CHECK_THROWS_AS(truncate(two, 1), PreconditionError);

  // a hull too small to hold the tail is rejected
  const Similarity tiny{1e-6, Mat2::identity(), {0.0, 0.0}};
  CHECK_THROWS_AS(truncate(g, 3, tiny), PreconditionError);
}

TEST_CASE("families reject invalid parameters") {
  SystemDescription d = builtin_system("uniform4");
  d.prob_prefix = {0.25, 0.25, 0.25, 0.2};
  CHECK_THROWS_AS(InfiniteIFS{d}, ValidationError);
  d = builtin_system("uniform4");
  d.map_prefix[0].ratio = 1.2;
  CHECK_THROWS_AS(InfiniteIFS{d}, ValidationError);
  d = builtin_system("gamma3");
  d.prob_tail.normalizer = 0.9;
  CHECK_THROWS_AS(InfiniteIFS{d}, ValidationError);
  d = builtin_system("gamma3");
  d.placement.rule = Placement::Rule::disk_shells;
  CHECK_THROWS_AS(InfiniteIFS{d}, ValidationError);
}

TEST_CASE("probability tails have closed-form sums") {
  const InfiniteIFS g = fixtures::builtin("gamma3");
  for (std::uint64_t n : {0u, 1u, 5u, 40u})
    CHECK(g.probs().tail_sum(n) == doctest::Approx(std::pow(0.5, static_cast<double>(n))).epsilon(1e-14));
  const ProbabilityFamily zeta2({}, {TailKind::power_law, 6.0 / (M_PI * M_PI), 0.5, 2.0});
  double direct = 0.0;
  for (int j = 1000000; j > 10; --j) direct += 6.0 / (M_PI * M_PI) / (double(j) * j);
  CHECK(zeta2.tail_sum(10) == doctest::Approx(direct + 6.0 / (M_PI * M_PI) / 1000000.0).epsilon(1e-9));
}
