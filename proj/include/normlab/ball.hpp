#pragma once

#include <mpfr.h>

#include <variant>

#include "normlab/polynomial.hpp"
#include "normlab/rational.hpp"

namespace normlab {

/// Owning wrapper around mpfr_t.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Mpfr(const Mpfr& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Mpfr(Mpfr&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Mpfr& operator=(Mpfr o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Mpfr() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

 private:
  mpfr_t v_;
};

/// Midpoint-radius real ball. The midpoint carries the working precision;
/// the radius is a 64-bit upper bound, every operation rounds it upward.
class Ball {
 public:
  explicit Ball(mpfr_prec_t prec);

  static Ball exact(const Rational& q, mpfr_prec_t prec);
  /// Ball enclosing [lo, hi].
  static Ball enclosing(const Rational& lo, const Rational& hi, mpfr_prec_t prec);

  mpfr_prec_t precision() const { return mid_.precision(); }

  Ball operator*(const Ball& other) const;
  Ball operator+(const Ball& other) const;

  /// Subtracts an exact integer.
  Ball minus(const Integer& k) const;

  /// floor of every point in the ball when that is a single integer.
  std::optional<Integer> common_floor() const;

  double midpoint_double() const;
  /// Upper bound on |true value - midpoint_double()|.
  double error_bound() const;
  /// Upper bound on the radius as a double (rounded up).
  double radius_upper() const;

 private:
  void add_rounding_error(int ternary);

  Mpfr mid_;
  Mpfr rad_{64};
};

/// A real input given exactly (rational) or as an isolated algebraic root.
class RealNumber {
 public:
  RealNumber(Rational q) : value_(std::move(q)) {}  // NOLINT: implicit by intent
  RealNumber(AlgebraicReal a) : value_(std::move(a)) {}  // NOLINT

  /// Ball containing the number at the given working precision.
  Ball ball(mpfr_prec_t prec) const;

  /// Rational enclosure [lo, hi] of width <= 2^-bits.
  Interval enclosure(unsigned bits) const;

  bool is_rational() const { return std::holds_alternative<Rational>(value_); }
  /// log2 of an upper bound on |x|, at least 0.
  double log2_magnitude() const;

 private:
  std::variant<Rational, AlgebraicReal> value_;
};

}  // namespace normlab
