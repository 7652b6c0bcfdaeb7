#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qcoef/ifs.hpp"
#include "qcoef/quantizer.hpp"
#include "qcoef/sampler.hpp"

namespace qcoef {

/// Stopping-rule antichain over the alphabet {1..N+1}: words whose weight
/// gamma_w first drops to 1/(n rho) or below, rho = min_i gamma_i.
struct FnWordSet {
  std::vector<Word> words;
  std::vector<double> gamma;
  double rho = 0.0;
  std::size_t n = 0;
  double threshold = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  std::uint64_t N = 0;
};

/// Breadth-first expansion from the root. When the threshold is at least 1
/// the set is the empty word alone.
FnWordSet build_F_n(std::span<const double> gammas, std::size_t n);

struct ConstructiveResult {
  Quantizer quantizer;
  FnWordSet words;
  double kappa = 0.0;
  double kappa_r = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  /// sum_j (p_j s_j^r)^eta for the full system.
  double exponent_sum = 0.0;
  std::uint64_t N = 0;
  /// sum over F_n of p~_w s~_w^r.
  double bound_sum = 0.0;
  /// distortion / bound_sum.
  double ratio = 0.0;
};

/// One center at S~_w(x0) for each w in F_n, built on the truncation at the
/// smallest N with (sum_{j>N} p_j)^eta < (1 - alpha)/2. kappa defaults to
/// 1.05 kappa_r and must exceed kappa_r.
ConstructiveResult constructive_quantizer(const InfiniteIFS& system,
                                          const EmpiricalMeasure& empirical, std::size_t n,
                                          double r, std::optional<double> kappa = std::nullopt,
                                          double tol = 1e-10);

}  // namespace qcoef
