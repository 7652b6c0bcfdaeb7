#include "qcoef/series.hpp"

#include <array>
#include <cmath>

#include "qcoef/errors.hpp"

namespace qcoef {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

// B_{2j} / (2j)! for j = 1..7
constexpr std::array<double, 7> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
};

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
  ++n_;
}

Enclosure hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0)) throw PreconditionError("hurwitz_zeta needs s > 1 and a > 0");
  CompensatedSum head;
  double x = a;
  while (x < 12.0) {
    head.add(std::pow(x, -s));
    x += 1.0;
  }
  CompensatedSum total;
  total.add(head.total());
  total.add(std::pow(x, 1.0 - s) / (s - 1.0));
  total.add(0.5 * std::pow(x, -s));

  double rising = s;  // (s)_{2j-1}
  double omitted = 0.0;
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    const double power = std::pow(x, -s - 2.0 * static_cast<double>(j) - 1.0);
    const double correction = kBernoulliOverFactorial[j] * rising * power;
    if (j + 1 == kBernoulliOverFactorial.size()) {
      omitted = std::abs(correction);
    } else {
      total.add(correction);
    }
    rising *= (s + 2.0 * static_cast<double>(j) + 1.0) * (s + 2.0 * static_cast<double>(j) + 2.0);
  }
  const double v = total.total();
  return {v, omitted + 16.0 * kEps * std::abs(v)};
}

double PowerGeometricSeries::term(std::uint64_t j) const {
  const double jd = static_cast<double>(j);
  return std::exp(log_scale - exponent * std::log(jd) + jd * log_base);
}

bool PowerGeometricSeries::converges() const {
  if (log_base < 0.0) return true;
  if (log_base == 0.0) return exponent > 1.0;
  return false;
}

Enclosure PowerGeometricSeries::tail(std::uint64_t n) const {
  if (!converges()) return {kInf, kInf};
  const double first = static_cast<double>(n + 1);
  if (log_base == 0.0) {
    const Enclosure z = hurwitz_zeta(exponent, first);
    const double k = std::exp(log_scale);
    return {k * z.value, k * z.error + 4.0 * kEps * k * z.value};
  }
  if (exponent == 0.0) {
    // A * lambda^{n+1} / (1 - lambda)
    const double v = std::exp(log_scale + first * log_base - std::log(-std::expm1(log_base)));
    return {v, 8.0 * kEps * v};
  }
  // Ratio of consecutive terms past n is at most lambda * (1 + 1/(n+1))^{max(0,-e)}.
  double log_ratio = log_base;
  if (exponent < 0.0) log_ratio += -exponent * std::log1p(1.0 / first);
  if (log_ratio >= 0.0) return {kInf, kInf};
  const double lead = term(n + 1);
  const double upper = lead / (-std::expm1(log_ratio));
  return {0.5 * (lead + upper), 0.5 * (upper - lead) + 8.0 * kEps * upper};
}

}  // namespace qcoef
