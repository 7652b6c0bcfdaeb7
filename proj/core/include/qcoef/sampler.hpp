#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qcoef/ifs.hpp"

namespace qcoef {

/// Monte-Carlo sample of the self-similar measure. Every point carries weight
/// 1/size().
struct EmpiricalMeasure {
  std::vector<Point> points;
  int dimension = 1;
  std::uint64_t seed = 0;
  std::size_t coding_depth = 0;
  double epsilon = 0.0;
  /// s^depth * diam(X); each point is within this distance of the exact
  /// image of its coding sequence.
  double spatial_error = 0.0;
  std::string generator;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double weight() const { return points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size()); }
};

/// Identifier recorded in EmpiricalMeasure::generator.
inline constexpr const char* kSamplerGenerator =
    "mt19937_64/seed_seq(seed_lo,seed_hi,chunk_lo,chunk_hi)/chunk=4096/u=(x>>11)*2^-53";

/// Uniform double in [0,1) built from the top 53 bits of one draw.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF draw over the countable alphabet: the smallest j with
/// sum_{i<=j} p_i > u.
Symbol draw_symbol(const ProbabilityFamily& probs, double u);

/// Smallest n with s^n diam(X) <= eps.
std::size_t coding_depth(const InfiniteIFS& system, double eps);

/// i.i.d. points S_{w|n}(x0) for the domain center x0 and random codes w.
/// Bit-for-bit deterministic in (system, count, eps, seed), independent of
/// the thread count.
EmpiricalMeasure sample(const InfiniteIFS& system, std::size_t count, double eps,
                        std::uint64_t seed);

/// p_w = p_{w1} ... p_{wn}, the mass of the cylinder S_w(X).
double cylinder_mass(const InfiniteIFS& system, const Word& w);

}  // namespace qcoef
