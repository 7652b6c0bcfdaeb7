#include "qcoef/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qcoef/errors.hpp"
#include "qcoef/parallel.hpp"

namespace qcoef {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr Symbol kMaxSymbol = Symbol{1} << 53;
constexpr std::size_t kMapCache = 256;

// sum_{m < i <= j} p_i > target, with T(j) = sum_{i>j} p_i.
Symbol search_tail(const ProbabilityFamily& probs, double target) {
  const std::uint64_t m = probs.size();
  const double tm = probs.tail_sum(m);
  double goal = tm - target;  // find the smallest j > m with T(j) < goal
  if (!(goal > 0.0)) goal = tm * 0x1.0p-60;
  const ProbabilityTail& tail = probs.tail();
  if (tail.kind == TailKind::geometric) {
    // T(j) = c rho^{j+1} / (1 - rho)
    const double x = std::log(goal * (1.0 - tail.rho) / tail.normalizer) / std::log(tail.rho) - 1.0;
    Symbol j = m + 1;
    if (x > static_cast<double>(m + 1))
      j = static_cast<Symbol>(std::min(std::floor(x), static_cast<double>(kMaxSymbol)));
    while (j > m + 1 && probs.tail_sum(j - 1) < goal) --j;
    while (j < kMaxSymbol && !(probs.tail_sum(j) < goal)) ++j;
    return j;
  }
  // power law: exponential then binary search on the decreasing T(j)
  Symbol lo = m, hi = m + 1;
  while (!(probs.tail_sum(hi) < goal)) {
    lo = hi;
    if (hi >= kMaxSymbol / 2) return kMaxSymbol;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const Symbol mid = lo + (hi - lo) / 2;
    if (probs.tail_sum(mid) < goal) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace

Symbol draw_symbol(const ProbabilityFamily& probs, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw PreconditionError("draw_symbol needs u in [0,1)");
  CompensatedSum cum;
  const auto& prefix = probs.prefix();
  for (std::size_t j = 0; j < prefix.size(); ++j) {
    cum.add(prefix[j]);
    if (cum.total() > u) return j + 1;
  }
  if (probs.finite()) return prefix.size();
  return search_tail(probs, u - cum.total());
}

std::size_t coding_depth(const InfiniteIFS& system, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("sampling accuracy eps must be positive");
  const double s = system.sup_ratio();
  const double diam = system.domain().diameter();
  if (diam <= eps) return 0;
  auto n = static_cast<std::size_t>(std::max(0.0, std::ceil(std::log(eps / diam) / std::log(s))));
  while (std::pow(s, static_cast<double>(n)) * diam > eps) ++n;
  while (n > 0 && std::pow(s, static_cast<double>(n - 1)) * diam <= eps) --n;
  return n;
}

EmpiricalMeasure sample(const InfiniteIFS& system, std::size_t count, double eps,
                        std::uint64_t seed) {
  EmpiricalMeasure em;
  em.dimension = system.dimension();
  em.seed = seed;
  em.epsilon = eps;
  em.coding_depth = coding_depth(system, eps);
  em.spatial_error =
      std::pow(system.sup_ratio(), static_cast<double>(em.coding_depth)) * system.domain().diameter();
  em.generator = kSamplerGenerator;
  em.points.resize(count);
  if (count == 0) return em;

  const std::size_t cached = system.finite() ? system.maps().size() : kMapCache;
  std::vector<Similarity> maps;
  maps.reserve(cached);
  for (Symbol j = 1; j <= cached; ++j) maps.push_back(system.map(j));
  auto map_of = [&](Symbol j) { return j <= cached ? maps[j - 1] : system.map(j); };

  const Point x0 = system.domain().center();
  const std::size_t depth = em.coding_depth;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    std::mt19937_64 gen(seq);
    std::vector<Symbol> code(depth);
    const std::size_t end = std::min(count, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      for (std::size_t k = 0; k < depth; ++k) code[k] = draw_symbol(system.probs(), uniform01(gen));
      Point x = x0;
      for (std::size_t k = depth; k-- > 0;) x = map_of(code[k])(x);
      em.points[i] = x;
    }
  });
  return em;
}

double cylinder_mass(const InfiniteIFS& system, const Word& w) {
  double p = 1.0;
  for (Symbol j : w.symbols) p *= system.probability(j);
  return p;
}

}  // namespace qcoef
