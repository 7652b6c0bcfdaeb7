#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcoef/ifs.hpp"
#include "qcoef/quantizer.hpp"
#include "qcoef/sampler.hpp"

namespace qcoef {

enum class CurveMethod { lloyd, constructive };
std::string to_string(CurveMethod m);

struct CurveEntry {
  std::size_t n = 0;
  double V = 0.0;
  double std_error = 0.0;
  CurveMethod method = CurveMethod::lloyd;
};

/// Estimated n-point distortions V_{n,r} over increasing n.
struct DistortionCurve {
  std::vector<CurveEntry> entries;
  double r = 2.0;
  std::string system_id;
  std::vector<std::uint64_t> seeds;

  /// Values of n where V rises above its predecessor by more than twice the
  /// combined standard error.
  std::vector<std::size_t> monotonicity_violations() const;
};

struct DimensionEstimate {
  double dimension = 0.0;
  /// Fit log V = intercept + slope log n.
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t used = 0;
  std::vector<std::string> warnings;
};

struct BootstrapOptions {
  std::size_t resamples = 2000;
  std::uint64_t seed = 0x5eedULL;
  double level = 0.95;
};

/// D = -r / slope of the unweighted least-squares fit of log V on log n, with a
/// percentile bootstrap interval over entries. Nonpositive V entries are
/// dropped with a warning; fewer than 4 usable entries is an error.
DimensionEstimate estimate_dimension(const DistortionCurve& curve, const BootstrapOptions& opts = {});

struct CoefficientPoint {
  std::size_t n = 0;
  double value = 0.0;
};

/// n * V^{kappa/r} per entry.
std::vector<CoefficientPoint> coefficient_curve(const DistortionCurve& curve, double kappa);

/// Least-squares slope of log value against log n over the last third of the
/// points (at least two).
double last_third_slope(std::span<const CoefficientPoint> points);

/// Lloyd distortions for each n on one sample.
DistortionCurve lloyd_curve(const EmpiricalMeasure& empirical, std::span<const std::size_t> n_grid,
                            double r, const LloydOptions& opts, const std::string& system_id = {});

struct WitnessOptions {
  std::size_t samples = 100000;
  double eps = 1e-6;
  std::uint64_t seed = 0;
  int restarts = 5;
  int max_iters = 300;
  double tol = 1e-10;
};

/// Finite-grid witnesses for the coefficient bounds: the kappa_minus
/// coefficients should stay away from zero and the kappa_plus coefficients
/// should trend down. Heuristic evidence, not a limit statement.
struct WitnessReport {
  double r = 0.0;
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;
  double kappa_r = 0.0;
  DistortionCurve curve;
  std::vector<CoefficientPoint> lower;
  std::vector<CoefficientPoint> upper;
  /// Coefficients at kappa_r itself; reported, never thresholded.
  std::vector<CoefficientPoint> critical;
  double lower_min = 0.0;
  double lower_median = 0.0;
  double upper_slope = 0.0;
  double critical_slope = 0.0;
  bool lower_pass = false;
  bool upper_pass = false;
  bool passed() const { return lower_pass && upper_pass; }
};

/// Lower witness passes when min n V^{kappa_minus/r} > lower_ratio * median;
/// upper witness passes when the last-third slope of n V^{kappa_plus/r} < 0.
inline constexpr double kLowerWitnessRatio = 0.1;

WitnessReport witness_from_curve(const DistortionCurve& curve, double kappa_minus,
                                 double kappa_plus, double kappa_r);

/// Samples the measure, runs Lloyd over the grid and evaluates both witnesses.
/// Requires kappa_minus < kappa_r < kappa_plus and at least two grid points.
WitnessReport coefficient_witness(const InfiniteIFS& system, double r, double kappa_minus,
                              double kappa_plus, std::span<const std::size_t> n_grid,
                              const WitnessOptions& opts = {});

}  // namespace qcoef
