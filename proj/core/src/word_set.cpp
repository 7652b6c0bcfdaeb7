#include "qcoef/word_set.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "qcoef/errors.hpp"
#include "qcoef/series.hpp"
#include "qcoef/thermodynamics.hpp"

namespace qcoef {

namespace {

constexpr std::uint64_t kMaxTruncation = 1u << 20;

struct Alphabet {
  std::vector<Similarity> maps;
  std::vector<double> ratios;
  std::vector<double> probs;
  std::uint64_t N = 0;
};

Alphabet truncated_alphabet(const InfiniteIFS& system, double eta, double alpha) {
  Alphabet a;
  if (system.finite()) {
    const std::size_t m = system.maps().size();
    for (Symbol j = 1; j <= m; ++j) {
      a.maps.push_back(system.map(j));
      a.ratios.push_back(system.ratio(j));
      a.probs.push_back(system.probability(j));
    }
    a.N = m;
    return a;
  }
  const double budget = 0.5 * (1.0 - alpha);
  std::uint64_t N = std::max<std::uint64_t>(system.j0(), 1);
  while (!(std::pow(system.probs().tail_sum(N), eta) < budget && system.hull(N))) {
    if (++N > kMaxTruncation) throw PreconditionError("no valid truncation level found");
  }
  const FiniteTruncation t = truncate(system, N);
  a.maps = t.maps;
  a.ratios = t.ratios;
  a.probs = t.probs;
  a.N = N;
  return a;
}

}  // namespace

FnWordSet build_F_n(std::span<const double> gammas, std::size_t n) {
  if (n == 0) throw PreconditionError("build_F_n needs n >= 1");
  if (gammas.empty()) throw PreconditionError("build_F_n needs a nonempty weight vector");
  CompensatedSum total;
  for (double g : gammas) {
    if (!(g > 0.0 && g < 1.0)) throw PreconditionError("word weights must lie in (0,1)");
    total.add(g);
  }
  if (!(total.total() < 1.0)) throw PreconditionError("word weights must sum to less than 1");

  FnWordSet f;
  f.n = n;
  f.N = gammas.size() - 1;
  f.rho = *std::min_element(gammas.begin(), gammas.end());
  f.threshold = 1.0 / (static_cast<double>(n) * f.rho);
  if (f.threshold >= 1.0) {
    f.words.emplace_back();
    f.gamma.push_back(1.0);
    return f;
  }
  std::deque<std::pair<Word, double>> open;
  open.emplace_back(Word{}, 1.0);
  while (!open.empty()) {
    auto [w, g] = std::move(open.front());
    open.pop_front();
    for (std::size_t i = 0; i < gammas.size(); ++i) {
      const double gc = g * gammas[i];
      Word child = w.child(i + 1);
      if (gc <= f.threshold) {
        f.words.push_back(std::move(child));
        f.gamma.push_back(gc);
      } else {
        open.emplace_back(std::move(child), gc);
      }
    }
  }
  return f;
}

ConstructiveResult constructive_quantizer(const InfiniteIFS& system,
                                          const EmpiricalMeasure& empirical, std::size_t n,
                                          double r, std::optional<double> kappa, double tol) {
  if (n == 0) throw PreconditionError("constructive quantizer needs n >= 1");
  if (!(r > 0.0)) throw PreconditionError("constructive quantizer needs r > 0");
  ConstructiveResult res;
  res.kappa_r = quantization_dimension(system, r, tol, false).kappa;
  res.kappa = kappa.value_or(1.05 * res.kappa_r);
  if (!(res.kappa > res.kappa_r)) {
    std::ostringstream os;
    os << "kappa = " << res.kappa << " must exceed kappa_r = " << res.kappa_r;
    throw PreconditionError(os.str());
  }
  res.eta = res.kappa / (r + res.kappa);
  res.exponent_sum = exponent_sum(system, r, res.eta).value;
  if (!(res.exponent_sum < 1.0)) throw PreconditionError("exponent sum is not below 1");
  res.alpha = 0.5 * (res.exponent_sum + 1.0);

  const Alphabet a = truncated_alphabet(system, res.eta, res.alpha);
  res.N = a.N;
  std::vector<double> gammas(a.probs.size());
  for (std::size_t i = 0; i < gammas.size(); ++i)
    gammas[i] = std::pow(a.probs[i] * std::pow(a.ratios[i], r), res.eta);
  res.words = build_F_n(gammas, n);
  res.words.eta = res.eta;
  res.words.alpha = res.alpha;
  res.words.N = a.N;

  const Point x0 = system.domain().center();
  Quantizer& q = res.quantizer;
  q.r = r;
  q.provenance = Provenance::constructive;
  CompensatedSum bound;
  for (const Word& w : res.words.words) {
    Point x = x0;
    double p = 1.0, s = 1.0;
    for (std::size_t k = w.length(); k-- > 0;) {
      const std::size_t i = w.symbols[k] - 1;
      x = a.maps[i](x);
      p *= a.probs[i];
      s *= a.ratios[i];
    }
    q.centers.push_back(x);
    bound.add(p * std::pow(s, r));
  }
  res.bound_sum = bound.total();
  if (!empirical.empty()) {
    const DistortionEstimate e = distortion(empirical, q.centers, r);
    q.distortion_estimate = e.mean;
    q.distortion_stderr = e.std_error;
    res.ratio = res.bound_sum > 0.0 ? e.mean / res.bound_sum : 0.0;
  } else {
    q.warnings.push_back("no sample supplied; distortion not estimated");
  }
  return res;
}

}  // namespace qcoef
