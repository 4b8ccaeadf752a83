#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "normlab/ifs.hpp"
#include "normlab/polynomial.hpp"

namespace normlab {

/// Whether log|s| / log b is rational, and its value when it is.
struct CommensurabilityResult {
  bool commensurable = false;
  std::optional<Rational> ratio;
};

/// Decides log|s|/log b ∈ Q exactly. Requires s != 0, |s| != 1, b >= 2.
///
/// The numerator and denominator of |s| and b are split over a common
/// coprime base (gcd-based factor refinement), so no integer factorization
/// is needed and the answer is never indeterminate. A returned ratio p/q is
/// re-checked as |s|^q = b^p before it is reported.
CommensurabilityResult log_commensurable(const Rational& s, const Integer& base);

struct PisotReport {
  IntPoly minimal_polynomial;
  /// Largest real root, when it exceeds 1.
  std::optional<Interval> dominant_root;
  /// Modulus enclosures [lo, hi] for every root other than the dominant one
  /// (all roots when there is no dominant root).
  std::vector<Interval> conjugate_moduli;
  bool is_pisot = false;
};

/// Pisot test for the root of a monic irreducible integer polynomial.
///
/// Root disks come from Weierstrass corrections evaluated in exact dyadic
/// arithmetic: with w_i = f(z_i) / prod_{j != i} (z_i - z_j), the disks
/// |z - z_i| <= n |w_i| cover all roots and, when pairwise disjoint, hold one
/// root each. Precision doubles until every modulus enclosure is decisive
/// against 1. Reciprocal polynomials of degree >= 3 and polynomials with no
/// real root above 1 are rejected without needing decisive enclosures.
PisotReport is_pisot(const IntPoly& poly);

enum class ObstructionVerdict { MatchesObstructionForm, FailsItem1, FailsItem2 };

std::string_view to_string(ObstructionVerdict v);

/// t = numerator / base^exponent with integer numerator.
struct TranslationForm {
  bool matches = false;
  Integer numerator;
  unsigned long exponent = 0;
};

struct MapObstruction {
  CommensurabilityResult slope;
  TranslationForm translation;
};

struct ObstructionReport {
  Integer base;
  /// Conjugating map g the conditions were evaluated under.
  AffineMap conjugacy;
  std::vector<MapObstruction> maps;
  ObstructionVerdict verdict = ObstructionVerdict::FailsItem1;
};

TranslationForm translation_form(const Rational& t, const Integer& base);

/// Checks the obstruction form on the hull-normalized system.
ObstructionReport classify_obstruction(const SelfSimilarSystem& system, const Integer& base);
/// Checks the obstruction form on g^{-1} ∘ f_i ∘ g for a caller-supplied g.
ObstructionReport classify_obstruction(const SelfSimilarSystem& system, const Integer& base, const AffineMap& g);

struct IncommensurableWitness {
  bool applicable = false;
  /// 1-based index of the first map whose slope is incommensurable with b.
  std::optional<std::size_t> map_index;
};

/// Some slope s_i with log|s_i|/log b irrational; sufficient for almost every
/// point to be b-normal.
IncommensurableWitness incommensurable_slope(const SelfSimilarSystem& system, const Integer& base);

}  // namespace normlab
