#include "qcoef/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qcoef/errors.hpp"

namespace qcoef {

namespace {

constexpr double kSumTolerance = 1e-12;
constexpr std::size_t kConstructionPrefix = 12;
constexpr std::uint64_t kMaxSeparationPairs = std::uint64_t{1} << 22;

double lower_end(const Domain& d) { return d.center().x - d.half_width(); }
double length_of(const Domain& d) { return 2.0 * d.half_width(); }

}  // namespace

Word Word::child(Symbol j) const {
  Word w = *this;
  w.symbols.push_back(j);
  return w;
}

Word Word::parent() const {
  Word w = *this;
  if (!w.symbols.empty()) w.symbols.pop_back();
  return w;
}

bool Word::is_prefix_of(const Word& other) const {
  return symbols.size() <= other.symbols.size() &&
         std::equal(symbols.begin(), symbols.end(), other.symbols.begin());
}

std::string to_string(const Word& w) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < w.symbols.size(); ++i) os << (i ? "," : "") << w.symbols[i];
  os << ')';
  return os.str();
}

std::string to_string(Placement::Rule rule) {
  switch (rule) {
    case Placement::Rule::explicit_only: return "explicit";
    case Placement::Rule::offset_accumulate: return "offset_accumulate";
    case Placement::Rule::packed: return "packed";
    case Placement::Rule::disk_shells: return "disk_shells";
  }
  return "?";
}

std::string to_string(TailKind kind) {
  switch (kind) {
    case TailKind::none: return "none";
    case TailKind::geometric: return "geometric";
    case TailKind::power_law: return "power_law";
  }
  return "?";
}

double RatioTail::ratio(Symbol j) const {
  const double jd = static_cast<double>(j);
  switch (kind) {
    case TailKind::geometric: return scale * std::pow(gamma, jd);
    case TailKind::power_law: return scale * std::pow(jd, -exponent);
    case TailKind::none: break;
  }
  throw IndexOutOfFamilyError("ratio requested from an empty tail");
}

double ProbabilityTail::probability(Symbol j) const {
  const double jd = static_cast<double>(j);
  switch (kind) {
    case TailKind::geometric: return normalizer * std::pow(rho, jd);
    case TailKind::power_law: return normalizer * std::pow(jd, -exponent);
    case TailKind::none: break;
  }
  throw IndexOutOfFamilyError("probability requested from an empty tail");
}

// ---------------------------------------------------------------------------
// ProbabilityFamily

ProbabilityFamily::ProbabilityFamily(std::vector<double> prefix, ProbabilityTail tail)
    : prefix_(std::move(prefix)), tail_(tail) {
  for (double p : prefix_)
    if (!(p > 0.0) || !(p < 1.0 || (p == 1.0 && prefix_.size() == 1 && finite())))
      throw ValidationError("probabilities must lie in (0,1)");
  switch (tail_.kind) {
    case TailKind::geometric:
      if (!(tail_.rho > 0.0 && tail_.rho < 1.0))
        throw ValidationError("geometric probability tail needs rho in (0,1)");
      break;
    case TailKind::power_law:
      if (!(tail_.exponent > 1.0))
        throw ValidationError("power-law probability tail needs exponent > 1");
      break;
    case TailKind::none:
      if (prefix_.empty()) throw ValidationError("empty probability family");
      break;
  }
  if (!finite() && !(tail_.normalizer > 0.0))
    throw ValidationError("probability tail normalizer must be positive");
  CompensatedSum total;
  for (double p : prefix_) total.add(p);
  total.add(tail_after_prefix(prefix_.size()));
  if (std::abs(total.total() - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << total.total() << ", not 1";
    throw ValidationError(os.str());
  }
}

double ProbabilityFamily::probability(Symbol j) const {
  if (j == 0) throw PreconditionError("symbols start at 1");
  if (j <= prefix_.size()) return prefix_[j - 1];
  if (finite()) throw IndexOutOfFamilyError("symbol beyond finite probability vector");
  return tail_.probability(j);
}

double ProbabilityFamily::tail_after_prefix(std::uint64_t n) const {
  switch (tail_.kind) {
    case TailKind::none: return 0.0;
    case TailKind::geometric:
      return tail_.normalizer * std::pow(tail_.rho, static_cast<double>(n + 1)) /
             (1.0 - tail_.rho);
    case TailKind::power_law:
      return tail_.normalizer * hurwitz_zeta(tail_.exponent, static_cast<double>(n + 1)).value;
  }
  return 0.0;
}

double ProbabilityFamily::tail_sum(std::uint64_t n) const {
  if (n >= prefix_.size()) return tail_after_prefix(n);
  CompensatedSum s;
  for (std::size_t j = n; j < prefix_.size(); ++j) s.add(prefix_[j]);
  s.add(tail_after_prefix(prefix_.size()));
  return s.total();
}

double ProbabilityFamily::tail_sum_error(std::uint64_t n) const {
  const double v = tail_sum(n);
  double e = 8.0 * std::numeric_limits<double>::epsilon() * v;
  if (tail_.kind == TailKind::power_law) {
    const auto m = std::max<std::uint64_t>(n, prefix_.size());
    e += tail_.normalizer * hurwitz_zeta(tail_.exponent, static_cast<double>(m + 1)).error;
  }
  return e;
}

// ---------------------------------------------------------------------------
// MapFamily

MapFamily::MapFamily(std::vector<Similarity> prefix, RatioTail tail, Placement placement)
    : prefix_(std::move(prefix)), tail_(tail), placement_(placement) {
  for (const Similarity& s : prefix_) {
    if (!(s.ratio > 0.0 && s.ratio < 1.0)) throw ValidationError("map ratios must lie in (0,1)");
    if (!s.orth.is_orthogonal(1e-12)) throw ValidationError("map has a non-orthogonal linear part");
  }
  switch (tail_.kind) {
    case TailKind::none:
      if (prefix_.empty()) throw ValidationError("empty map family");
      if (placement_.rule != Placement::Rule::explicit_only)
        throw ValidationError("a finite map family takes no placement rule");
      break;
    case TailKind::geometric:
      if (!(tail_.gamma > 0.0 && tail_.gamma < 1.0))
        throw ValidationError("geometric ratio tail needs gamma in (0,1)");
      [[fallthrough]];
    case TailKind::power_law:
      if (!(tail_.scale > 0.0)) throw ValidationError("ratio tail scale must be positive");
      if (tail_.kind == TailKind::power_law && !(tail_.exponent > 0.0))
        throw ValidationError("power-law ratio tail needs a positive exponent");
      if (placement_.rule == Placement::Rule::explicit_only)
        throw ValidationError("an infinite map family needs a placement rule");
      if (!(tail_.ratio(prefix_.size() + 1) < 1.0))
        throw ValidationError("tail ratios must be below 1");
      break;
  }
  if (!(sup_ratio() < 1.0)) throw ValidationError("sup of the contraction ratios must be < 1");
}

double MapFamily::ratio(Symbol j) const {
  if (j == 0) throw PreconditionError("symbols start at 1");
  if (j <= prefix_.size()) return prefix_[j - 1].ratio;
  if (finite()) throw IndexOutOfFamilyError("map index beyond finite family");
  return tail_.ratio(j);
}

double MapFamily::sup_ratio() const {
  double s = 0.0;
  for (const Similarity& m : prefix_) s = std::max(s, m.ratio);
  if (!finite()) s = std::max(s, tail_.ratio(prefix_.size() + 1));
  return s;
}

double MapFamily::ratio_partial_sum(std::uint64_t k) const {
  CompensatedSum s;
  const std::uint64_t m = prefix_.size();
  for (std::uint64_t j = 0; j < std::min(k, m); ++j) s.add(prefix_[j].ratio);
  if (k <= m) return s.total();
  if (finite()) throw IndexOutOfFamilyError("partial sum beyond finite family");
  if (tail_.kind == TailKind::geometric) {
    // scale * (gamma^{m+1} - gamma^{k+1}) / (1 - gamma)
    const double g = tail_.gamma;
    s.add(tail_.scale * (std::pow(g, static_cast<double>(m + 1)) -
                         std::pow(g, static_cast<double>(k + 1))) /
          (1.0 - g));
    return s.total();
  }
  if (k - m < 4096) {
    for (std::uint64_t j = m + 1; j <= k; ++j) s.add(tail_.ratio(j));
    return s.total();
  }
  if (!(tail_.exponent > 1.0)) throw DivergenceError("ratio series diverges");
  s.add(tail_.scale * (hurwitz_zeta(tail_.exponent, static_cast<double>(m + 1)).value -
                       hurwitz_zeta(tail_.exponent, static_cast<double>(k + 1)).value));
  return s.total();
}

double MapFamily::ratio_tail_sum(std::uint64_t k) const {
  if (finite()) throw IndexOutOfFamilyError("ratio tail sum of a finite family");
  const std::uint64_t m = prefix_.size();
  CompensatedSum s;
  for (std::uint64_t j = k; j < m; ++j) s.add(prefix_[j].ratio);
  const std::uint64_t from = std::max(k, m);
  if (tail_.kind == TailKind::geometric) {
    s.add(tail_.scale * std::pow(tail_.gamma, static_cast<double>(from + 1)) /
          (1.0 - tail_.gamma));
  } else {
    if (!(tail_.exponent > 1.0)) throw DivergenceError("ratio series diverges");
    s.add(tail_.scale * hurwitz_zeta(tail_.exponent, static_cast<double>(from + 1)).value);
  }
  return s.total();
}

Similarity MapFamily::map(Symbol j, const Domain& domain) const {
  if (j == 0) throw PreconditionError("symbols start at 1");
  if (j <= prefix_.size()) return prefix_[j - 1];
  if (finite()) throw IndexOutOfFamilyError("map index " + std::to_string(j) +
                                            " beyond finite family of " +
                                            std::to_string(prefix_.size()));
  const double s = tail_.ratio(j);
  switch (placement_.rule) {
    case Placement::Rule::offset_accumulate: {
      const double lo = lower_end(domain);
      return {s, Mat2::identity(), {lo * (1.0 - s) + placement_.offset * s * length_of(domain), 0.0}};
    }
    case Placement::Rule::packed: {
      const double lo = lower_end(domain);
      return {s, Mat2::identity(), {lo * (1.0 - s) + length_of(domain) * ratio_partial_sum(j - 1), 0.0}};
    }
    case Placement::Rule::disk_shells: {
      const Point c = domain.center();
      const double angle = placement_.angle_step * static_cast<double>(j);
      const double reach = domain.radius() * (1.0 - placement_.shell_factor * s);
      return {s, Mat2::identity(),
              {c.x * (1.0 - s) + reach * std::cos(angle), c.y * (1.0 - s) + reach * std::sin(angle)}};
    }
    case Placement::Rule::explicit_only: break;
  }
  throw IndexOutOfFamilyError("no placement rule for tail maps");
}

// ---------------------------------------------------------------------------
// InfiniteIFS

InfiniteIFS::InfiniteIFS(SystemDescription desc)
    : desc_(std::move(desc)),
      maps_(desc_.map_prefix, desc_.map_tail, desc_.placement),
      probs_(desc_.prob_prefix, desc_.prob_tail) {
  if (maps_.finite() != probs_.finite())
    throw ValidationError("maps and probabilities must both be finite or both infinite");
  if (maps_.finite() && maps_.size() != probs_.size())
    throw ValidationError("finite system needs one probability per map");

  const Domain& dom = desc_.domain;
  using Rule = Placement::Rule;
  if ((desc_.placement.rule == Rule::offset_accumulate || desc_.placement.rule == Rule::packed) &&
      dom.kind() != DomainKind::interval)
    throw ValidationError(to_string(desc_.placement.rule) + " placement needs an interval domain");
  if (desc_.placement.rule == Rule::disk_shells) {
    if (dom.kind() != DomainKind::ball)
      throw ValidationError("disk_shells placement needs a ball domain");
    if (!(desc_.placement.shell_factor >= 1.0))
      throw ValidationError("disk_shells needs shell_factor >= 1");
  }
  for (const Similarity& s : maps_.prefix()) {
    if (dom.dimension() == 1 && (s.translation.y != 0.0 || s.orth.b != 0.0 || s.orth.c != 0.0 ||
                                 s.orth.d != 1.0))
      throw ValidationError("1D maps must keep the x-axis fixed");
  }

  const std::size_t probe = finite() ? maps_.size() : explicit_count() + kConstructionPrefix;
  for (Symbol j = 1; j <= probe; ++j)
    if (!dom.maps_into_self(map(j), 1e-12))
      throw ValidationError("S_" + std::to_string(j) + " does not map the domain into itself");

  if (!finite()) {
    if (desc_.j0 < 1) throw ValidationError("j0 must be at least 1");
    if (desc_.placement.rule != Rule::disk_shells && !hull(desc_.j0))
      throw ValidationError("family has no contractive hull at j0");
  }

  if (desc_.thermodynamics_only) {
    separation_gap_ = 0.0;
  } else {
    const SeparationReport rep = validate_separation(*this, probe, 1);
    if (!rep.passed) throw ValidationError("system is not strongly separated on its prefix");
    separation_gap_ = rep.min_gap;
  }
}

std::size_t InfiniteIFS::explicit_count() const {
  return std::max(maps_.size(), probs_.size());
}

std::optional<Similarity> InfiniteIFS::hull(std::uint64_t n) const {
  if (finite() || n < 1) return std::nullopt;
  const Domain& dom = desc_.domain;
  const double lo = lower_end(dom);
  double h = 0.0;
  double shift = 0.0;
  switch (desc_.placement.rule) {
    case Placement::Rule::offset_accumulate: {
      if (n < maps_.size()) return std::nullopt;
      h = (desc_.placement.offset + 1.0) * maps_.ratio(n + 1);
      break;
    }
    case Placement::Rule::packed: {
      h = maps_.ratio_tail_sum(n);
      shift = length_of(dom) * maps_.ratio_partial_sum(n);
      break;
    }
    default: return std::nullopt;
  }
  if (!(h > 0.0 && h < 1.0)) return std::nullopt;
  return Similarity{h, Mat2::identity(), {lo * (1.0 - h) + shift, 0.0}};
}

PowerGeometricSeries InfiniteIFS::pressure_series(double q, double t) const {
  PowerGeometricSeries s;
  const RatioTail& rt = maps_.tail();
  const ProbabilityTail& pt = probs_.tail();
  // q == 0 / t == 0 contribute nothing, including through log of the scale.
  auto weighted = [](double w, double v) { return w == 0.0 ? 0.0 : w * v; };
  s.log_scale = weighted(q, std::log(pt.normalizer)) + weighted(t, std::log(rt.scale));
  if (pt.kind == TailKind::geometric) s.log_base += weighted(q, std::log(pt.rho));
  else s.exponent += weighted(q, pt.exponent);
  if (rt.kind == TailKind::geometric) s.log_base += weighted(t, std::log(rt.gamma));
  else s.exponent += weighted(t, rt.exponent);
  return s;
}

// ---------------------------------------------------------------------------
// Free operations

Similarity map_for_index(const InfiniteIFS& system, Symbol j) { return system.map(j); }

Similarity word_map(const InfiniteIFS& system, const Word& w) {
  Similarity acc;
  for (Symbol j : w.symbols) acc = acc.compose(system.map(j));
  return acc;
}

Point apply_word(const InfiniteIFS& system, const Word& w, Point x) {
  for (auto it = w.symbols.rbegin(); it != w.symbols.rend(); ++it) x = system.map(*it)(x);
  return x;
}

double word_ratio(const InfiniteIFS& system, const Word& w) {
  double r = 1.0;
  for (Symbol j : w.symbols) r *= system.ratio(j);
  return r;
}

double cylinder_diameter(const InfiniteIFS& system, const Word& w) {
  return word_ratio(system, w) * system.domain().diameter();
}

SeparationReport validate_separation(const InfiniteIFS& system, std::size_t prefix_size,
                                     std::size_t depth) {
  if (prefix_size < 2) throw PreconditionError("separation needs at least two maps");
  if (depth < 1) throw PreconditionError("separation depth must be >= 1");
  if (system.finite()) prefix_size = std::min(prefix_size, system.maps().size());

  const Domain& dom = system.domain();
  std::vector<Similarity> level1;
  level1.reserve(prefix_size);
  for (Symbol j = 1; j <= prefix_size; ++j) level1.push_back(system.map(j));

  const double k = static_cast<double>(prefix_size);
  if (std::pow(k, static_cast<double>(depth + 1)) > static_cast<double>(kMaxSeparationPairs))
    throw InstanceTooLargeError("separation check too large; lower prefix_size or depth");

  SeparationReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  std::vector<Similarity> parents{Similarity{}};
  for (std::size_t level = 1; level <= depth; ++level) {
    double level_min = std::numeric_limits<double>::infinity();
    std::vector<Similarity> next;
    for (const Similarity& parent : parents) {
      std::vector<Similarity> kids;
      kids.reserve(level1.size());
      for (const Similarity& s : level1) kids.push_back(parent.compose(s));
      for (std::size_t i = 0; i < kids.size(); ++i) {
        for (std::size_t j = i + 1; j < kids.size(); ++j) {
          const double g = dom.image_distance(kids[i], kids[j]);
          ++rep.pairs_checked;
          if (g < level_min) {
            level_min = g;
            if (level == 1) rep.closest_pair = {i + 1, j + 1};
          }
        }
      }
      if (level < depth) next.insert(next.end(), kids.begin(), kids.end());
    }
    rep.level_gaps.push_back(level_min);
    rep.min_gap = std::min(rep.min_gap, level_min);
    parents = std::move(next);
  }
  rep.passed = rep.min_gap > 1e-12 * dom.diameter() * std::pow(system.sup_ratio(), depth);
  return rep;
}

FiniteTruncation truncate(const InfiniteIFS& system, std::uint64_t n, const Similarity& hull,
                          std::uint64_t check_count) {
  if (system.finite()) throw PreconditionError("truncation needs an infinite system");
  if (n < system.j0())
    throw PreconditionError("truncation level " + std::to_string(n) + " is below j0 = " +
                            std::to_string(system.j0()));
  if (!(hull.ratio > 0.0 && hull.ratio < 1.0))
    throw PreconditionError("hull map must be a contraction");

  const Domain& dom = system.domain();
  const Similarity hull_inv = hull.inverse();
  auto check = [&](Symbol j) {
    if (!dom.maps_into_self(hull_inv.compose(system.map(j)), 1e-9))
      throw PreconditionError("S_" + std::to_string(j) + "(X) is not inside the hull image");
  };
  for (Symbol j = n + 1; j <= n + check_count; ++j) check(j);
  for (Symbol far : {n + 1000, n + 100000, n + 10000000}) check(far);

  FiniteTruncation t;
  t.base = &system;
  t.n = n;
  for (Symbol j = 1; j <= n; ++j) {
    t.maps.push_back(system.map(j));
    t.ratios.push_back(system.ratio(j));
    t.probs.push_back(system.probability(j));
  }
  t.maps.push_back(hull);
  t.ratios.push_back(hull.ratio);
  t.probs.push_back(system.probs().tail_sum(n));
  return t;
}

FiniteTruncation truncate(const InfiniteIFS& system, std::uint64_t n) {
  const auto h = system.hull(n);
  if (!h) throw PreconditionError("family provides no hull map at level " + std::to_string(n));
  return truncate(system, n, *h);
}

}  // namespace qcoef
