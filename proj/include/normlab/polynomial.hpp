#pragma once

#include <optional>
#include <vector>

#include "normlab/ifs.hpp"
#include "normlab/rational.hpp"

namespace normlab {

/// Polynomial with coefficients in ascending order: c[0] + c[1] x + ...
/// The zero polynomial is the empty vector.
template <class Coeff>
struct Poly {
  std::vector<Coeff> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  const Coeff& leading() const { return c.back(); }
  bool is_zero() const { return c.empty(); }

  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }
};

using IntPoly = Poly<Integer>;
using RatPoly = Poly<Rational>;

IntPoly make_int_poly(std::vector<long> ascending);
RatPoly to_rat(const IntPoly& p);

Rational evaluate(const IntPoly& p, const Rational& x);
Rational evaluate(const RatPoly& p, const Rational& x);
int sign_at(const IntPoly& p, const Rational& x);

IntPoly derivative(const IntPoly& p);
RatPoly derivative(const RatPoly& p);

/// x^n p(1/x), n = degree(p).
IntPoly reversal(const IntPoly& p);

/// Division with remainder over Q.
std::pair<RatPoly, RatPoly> divmod(const RatPoly& num, const RatPoly& den);
/// Monic gcd over Q.
RatPoly gcd(RatPoly a, RatPoly b);

/// Exact division by a monic integer polynomial; nullopt when it does not divide.
std::optional<IntPoly> exact_divide(const IntPoly& num, const IntPoly& monic_den);

/// Cauchy bound: every complex root has modulus < bound.
Rational root_bound(const IntPoly& p);

class SturmSequence {
 public:
  explicit SturmSequence(const IntPoly& p);
  /// Number of distinct real roots in (a, b].
  int count(const Rational& a, const Rational& b) const;

 private:
  int variations(const Rational& x) const;
  std::vector<RatPoly> chain_;
};

/// Disjoint rational intervals (lo, hi], each holding exactly one real root
/// of a squarefree polynomial, in increasing order.
std::vector<Interval> isolate_real_roots(const IntPoly& p);

/// A real root of an integer polynomial, located in a rational enclosure
/// that contains exactly one root. Refinement is bisection on sign changes.
class AlgebraicReal {
 public:
  AlgebraicReal(IntPoly poly, Interval enclosure);

  const IntPoly& poly() const { return poly_; }
  const Interval& enclosure() const { return enclosure_; }

  /// Shrinks the enclosure until width <= 2^-bits.
  void refine(unsigned bits);

  /// The largest real root of p.
  static std::optional<AlgebraicReal> largest_root(const IntPoly& p);

 private:
  IntPoly poly_;
  Interval enclosure_;
};

enum class Irreducibility { Irreducible, Reducible };

/// Irreducibility over Q for monic integer polynomials. Combines a
/// squarefree test, factor-degree patterns modulo small primes and a
/// Kronecker search over the degrees those patterns leave open. Throws
/// IrreducibilityUndecided if the search exceeds its work cap.
Irreducibility irreducibility(const IntPoly& p);

}  // namespace normlab
