#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "normlab/error.hpp"
#include "normlab/rational.hpp"

namespace normlab {

/// x -> slope * x + offset.
struct AffineMap {
  Rational slope = 1;
  Rational offset = 0;

  static AffineMap identity() { return {}; }

  Rational operator()(const Rational& x) const { return slope * x + offset; }

  /// Unique fixed point; requires slope != 1.
  Rational fixed_point() const;

  /// Inverse map; requires slope != 0.
  AffineMap inverse() const;

  friend bool operator==(const AffineMap& a, const AffineMap& b) {
    return a.slope == b.slope && a.offset == b.offset;
  }
};

/// outer ∘ inner.
AffineMap compose(const AffineMap& outer, const AffineMap& inner);

/// Closed rational interval [lo, hi].
struct Interval {
  Rational lo;
  Rational hi;

  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }

  friend bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }
};

/// Image of an interval under an affine map, handling orientation reversal.
Interval image(const AffineMap& f, const Interval& interval);

/// Finite word over the alphabet {1, ..., n}. Symbols are 1-based.
struct Word {
  std::vector<std::uint32_t> symbols;

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }

  friend bool operator==(const Word&, const Word&) = default;
};

Word concat(const Word& a, const Word& b);

/// Unvalidated system description, as read from a file.
struct RawSystem {
  std::vector<AffineMap> maps;
  std::vector<Rational> weights;
  std::optional<Interval> hull;
};

struct ValidationIssue {
  ErrorKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  /// Attractor hull when it could be computed (all maps contracting).
  std::optional<Interval> attractor_hull;

  bool ok() const { return issues.empty(); }
};

ValidationReport validate(const RawSystem& raw);

/// Validated, immutable self-similar system {f_i} with weights {p_i}.
class SelfSimilarSystem {
 public:
  /// Throws Error carrying the first failing invariant.
  static SelfSimilarSystem create(RawSystem raw);

  std::span<const AffineMap> maps() const { return maps_; }
  std::span<const Rational> weights() const { return weights_; }
  const AffineMap& map(std::uint32_t symbol) const { return maps_.at(symbol - 1); }
  std::size_t size() const { return maps_.size(); }

  /// Invariant interval stored with the system (the attractor hull unless the
  /// caller supplied a larger invariant interval).
  const Interval& hull() const { return hull_; }
  /// Smallest invariant interval, always computed.
  const Interval& attractor_hull() const { return attractor_hull_; }

  /// max_i |s_i|.
  const Rational& contraction_ratio() const { return rho_; }
  /// min_i |s_i|.
  const Rational& min_slope_modulus() const { return min_slope_; }

  bool homogeneous() const;

  RawSystem raw() const;

 private:
  SelfSimilarSystem() = default;

  std::vector<AffineMap> maps_;
  std::vector<Rational> weights_;
  Interval hull_;
  Interval attractor_hull_;
  Rational rho_;
  Rational min_slope_;
  bool hull_supplied_ = false;
};

/// f_{w_1} ∘ f_{w_2} ∘ ... ∘ f_{w_m}. Throws SymbolOutOfRange.
AffineMap compose(const SelfSimilarSystem& system, std::span<const std::uint32_t> symbols);
inline AffineMap compose(const SelfSimilarSystem& system, const Word& word) {
  return compose(system, std::span<const std::uint32_t>(word.symbols));
}

/// Smallest interval I with f_i(I) ⊆ I for all i, with exact endpoints.
/// Throws NonConvergence when the maps do not contract.
Interval attractor_hull(std::span<const AffineMap> maps);

struct NormalizedSystem {
  SelfSimilarSystem system;
  /// g with g([0,1]) = attractor hull; system maps are g^{-1} ∘ f_i ∘ g.
  AffineMap conjugacy;
};

NormalizedSystem normalize(const SelfSimilarSystem& system);

/// Conjugate every map by an explicit g: g^{-1} ∘ f_i ∘ g.
SelfSimilarSystem conjugate(const SelfSimilarSystem& system, const AffineMap& g);

/// Standard examples used throughout the tools and tests.
namespace systems {
SelfSimilarSystem cantor();                         // {x/3, (x+2)/3}, (1/2, 1/2)
SelfSimilarSystem binary();                         // {x/2, (x+1)/2}, (1/2, 1/2)
SelfSimilarSystem bernoulli(const Rational& beta);  // {x/beta, (x+1)/beta}, (1/2, 1/2)
}  // namespace systems

}  // namespace normlab
