#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcoef/geometry.hpp"
#include "qcoef/series.hpp"

namespace qcoef {

using Symbol = std::uint64_t;

/// Finite sequence of positive symbols indexing the cylinder S_w(X).
/// The empty word is the identity.
struct Word {
  std::vector<Symbol> symbols;

  Word() = default;
  Word(std::initializer_list<Symbol> s) : symbols(s) {}
  explicit Word(std::vector<Symbol> s) : symbols(std::move(s)) {}

  std::size_t length() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  Word child(Symbol j) const;
  /// Drops the last symbol; the parent of the empty word is empty.
  Word parent() const;
  bool is_prefix_of(const Word& other) const;

  auto operator<=>(const Word&) const = default;
  bool operator==(const Word&) const = default;
};

std::string to_string(const Word& w);

enum class TailKind { none, geometric, power_law };

/// Ratios of maps past the explicit prefix:
///   geometric: s_j = scale * gamma^j
///   power_law: s_j = scale * j^{-exponent}
struct RatioTail {
  TailKind kind = TailKind::none;
  double scale = 1.0;
  double gamma = 0.5;
  double exponent = 2.0;

  double ratio(Symbol j) const;
  bool operator==(const RatioTail&) const = default;
};

/// Probabilities past the explicit prefix:
///   geometric: p_j = normalizer * rho^j
///   power_law: p_j = normalizer * j^{-exponent}
struct ProbabilityTail {
  TailKind kind = TailKind::none;
  double normalizer = 1.0;
  double rho = 0.5;
  double exponent = 2.0;

  double probability(Symbol j) const;
  bool operator==(const ProbabilityTail&) const = default;
};

/// Deterministic positioning of tail maps inside the ambient domain.
///   explicit_only: no tail maps (finite systems).
///   offset_accumulate (interval): S_j(x) = lo + s_j (x - lo) + offset * s_j * L,
///     images accumulate at the left endpoint.
///   packed (interval): S_j(X) = [lo + L C_{j-1}, lo + L C_j] with C_k the
///     partial sums of the ratios; images touch.
///   disk_shells (ball): S_j(X) is the disk of radius s_j R centered at
///     c + R (1 - shell_factor * s_j) (cos j*angle_step, sin j*angle_step).
struct Placement {
  enum class Rule { explicit_only, offset_accumulate, packed, disk_shells };
  Rule rule = Rule::explicit_only;
  double offset = 2.0;
  double shell_factor = 3.0;
  double angle_step = 0.0;

  bool operator==(const Placement&) const = default;
};

std::string to_string(Placement::Rule rule);
std::string to_string(TailKind kind);

class ProbabilityFamily {
 public:
  ProbabilityFamily() = default;
  ProbabilityFamily(std::vector<double> prefix, ProbabilityTail tail);

  const std::vector<double>& prefix() const { return prefix_; }
  const ProbabilityTail& tail() const { return tail_; }
  bool finite() const { return tail_.kind == TailKind::none; }
  std::size_t size() const { return prefix_.size(); }

  double probability(Symbol j) const;
  /// sum_{j > n} p_j, closed form past the prefix.
  double tail_sum(std::uint64_t n) const;
  /// Error bound on tail_sum(n) coming from the closed form.
  double tail_sum_error(std::uint64_t n) const;

 private:
  double tail_after_prefix(std::uint64_t n) const;

  std::vector<double> prefix_;
  ProbabilityTail tail_;
};

class MapFamily {
 public:
  MapFamily() = default;
  MapFamily(std::vector<Similarity> prefix, RatioTail tail, Placement placement);

  const std::vector<Similarity>& prefix() const { return prefix_; }
  const RatioTail& tail() const { return tail_; }
  const Placement& placement() const { return placement_; }
  bool finite() const { return tail_.kind == TailKind::none; }
  std::size_t size() const { return prefix_.size(); }

  double ratio(Symbol j) const;
  /// sup_j s_j; tail ratios are non-increasing in j.
  double sup_ratio() const;
  /// sum_{i <= k} s_i.
  double ratio_partial_sum(std::uint64_t k) const;
  /// sum_{i > k} s_i (infinite families only).
  double ratio_tail_sum(std::uint64_t k) const;

  Similarity map(Symbol j, const Domain& domain) const;

 private:
  std::vector<Similarity> prefix_;
  RatioTail tail_;
  Placement placement_;
};

struct SystemDescription {
  std::string id;
  Domain domain = Domain::interval(0.0, 1.0);
  std::vector<Similarity> map_prefix;
  RatioTail map_tail;
  std::vector<double> prob_prefix;
  ProbabilityTail prob_tail;
  Placement placement;
  std::uint64_t j0 = 1;
  /// Systems whose images touch (e.g. the dyadic family) are usable for the
  /// pressure/temperature computations only; separation is not enforced.
  bool thermodynamics_only = false;

  bool operator==(const SystemDescription&) const = default;
};

/// Countable system of contractive similarities on a compact domain together
/// with a probability vector. Immutable after construction.
class InfiniteIFS {
 public:
  /// Validates ratios, probabilities (sum to one within 1e-12), self-mapping of
  /// the domain, and strong separation on a finite prefix.
  explicit InfiniteIFS(SystemDescription desc);

  const SystemDescription& description() const { return desc_; }
  const std::string& id() const { return desc_.id; }
  const Domain& domain() const { return desc_.domain; }
  int dimension() const { return desc_.domain.dimension(); }
  const MapFamily& maps() const { return maps_; }
  const ProbabilityFamily& probs() const { return probs_; }
  bool finite() const { return maps_.finite(); }
  /// Number of maps for a finite system, or the index past which both tails
  /// follow their closed forms.
  std::size_t explicit_count() const;
  double sup_ratio() const { return maps_.sup_ratio(); }
  double separation_gap() const { return separation_gap_; }
  std::uint64_t j0() const { return desc_.j0; }
  bool thermodynamics_only() const { return desc_.thermodynamics_only; }

  Similarity map(Symbol j) const { return maps_.map(j, desc_.domain); }
  double ratio(Symbol j) const { return maps_.ratio(j); }
  double probability(Symbol j) const { return probs_.probability(j); }

  /// The tail hull T_1 used for truncation at level n: a contraction whose
  /// image contains S_j(X) for every j > n. Empty when the placement rule has
  /// none.
  std::optional<Similarity> hull(std::uint64_t n) const;

  /// Terms p_j^q s_j^t for j > explicit_count() as a closed-form series.
  PowerGeometricSeries pressure_series(double q, double t) const;

 private:
  SystemDescription desc_;
  MapFamily maps_;
  ProbabilityFamily probs_;
  double separation_gap_ = 0.0;
};

Similarity map_for_index(const InfiniteIFS& system, Symbol j);

/// S_w = S_{w1} o ... o S_{wn}.
Similarity word_map(const InfiniteIFS& system, const Word& w);
Point apply_word(const InfiniteIFS& system, const Word& w, Point x);
double word_ratio(const InfiniteIFS& system, const Word& w);
double cylinder_diameter(const InfiniteIFS& system, const Word& w);

struct SeparationReport {
  bool passed = false;
  double min_gap = 0.0;
  /// Minimum sibling gap at each depth, starting at depth 1.
  std::vector<double> level_gaps;
  std::pair<Symbol, Symbol> closest_pair{0, 0};
  std::uint64_t pairs_checked = 0;
};

/// Minimum distance between S_i(X) and S_j(X) over i != j <= prefix_size,
/// and between sibling cylinders of all words up to the given depth. Overlap
/// is reported, not thrown.
SeparationReport validate_separation(const InfiniteIFS& system, std::size_t prefix_size,
                                     std::size_t depth);

struct FiniteTruncation {
  const InfiniteIFS* base = nullptr;
  std::uint64_t n = 0;
  /// N+1 maps; the last is the hull T_1.
  std::vector<Similarity> maps;
  std::vector<double> ratios;
  /// N+1 probabilities; the last is sum_{j>N} p_j.
  std::vector<double> probs;
};

/// Replaces S_{N+1}, S_{N+2}, ... by the single hull map. Containment
/// S_j(X) in hull(X) is checked for j in (N, N + check_count] and at a few
/// far indices.
FiniteTruncation truncate(const InfiniteIFS& system, std::uint64_t n, const Similarity& hull,
                          std::uint64_t check_count = 64);
/// Same, using the family's own hull rule.
FiniteTruncation truncate(const InfiniteIFS& system, std::uint64_t n);

}  // namespace qcoef
