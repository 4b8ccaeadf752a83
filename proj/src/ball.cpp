#include "normlab/ball.hpp"

#include <cmath>

namespace normlab {

Ball::Ball(mpfr_prec_t prec) : mid_(prec) { mpfr_set_zero(rad_.get(), 1); }

void Ball::add_rounding_error(int ternary) {
  if (ternary == 0) return;
  // |RN(x) - x| <= ulp(RN(x)) / 2 <= |RN(x)| * 2^(1 - prec)
  Mpfr err(64);
  mpfr_abs(err.get(), mid_.get(), MPFR_RNDU);
  mpfr_mul_2si(err.get(), err.get(), 1 - static_cast<long>(precision()), MPFR_RNDU);
  if (mpfr_zero_p(err.get())) mpfr_set_ui_2exp(err.get(), 1, mpfr_get_emin(), MPFR_RNDU);
  mpfr_add(rad_.get(), rad_.get(), err.get(), MPFR_RNDU);
}

Ball Ball::exact(const Rational& q, mpfr_prec_t prec) {
  Ball b(prec);
  b.add_rounding_error(mpfr_set_q(b.mid_.get(), q.get_mpq_t(), MPFR_RNDN));
  return b;
}

Ball Ball::enclosing(const Rational& lo, const Rational& hi, mpfr_prec_t prec) {
  Ball b = exact((lo + hi) / 2, prec);
  Rational half = (hi - lo) / 2;
  half.canonicalize();
  Mpfr r(64);
  mpfr_set_q(r.get(), half.get_mpq_t(), MPFR_RNDU);
  mpfr_add(b.rad_.get(), b.rad_.get(), r.get(), MPFR_RNDU);
  return b;
}

Ball Ball::operator*(const Ball& o) const {
  const mpfr_prec_t prec = std::max(precision(), o.precision());
  Ball out(prec);
  const int t = mpfr_mul(out.mid_.get(), mid_.get(), o.mid_.get(), MPFR_RNDN);
  // |m1| r2 + |m2| r1 + r1 r2
  Mpfr a(64), b(64), acc(64);
  mpfr_abs(a.get(), mid_.get(), MPFR_RNDU);
  mpfr_set(a.get(), a.get(), MPFR_RNDU);
  mpfr_mul(acc.get(), a.get(), o.rad_.get(), MPFR_RNDU);
  mpfr_abs(b.get(), o.mid_.get(), MPFR_RNDU);
  mpfr_mul(b.get(), b.get(), rad_.get(), MPFR_RNDU);
  mpfr_add(acc.get(), acc.get(), b.get(), MPFR_RNDU);
  mpfr_mul(b.get(), rad_.get(), o.rad_.get(), MPFR_RNDU);
  mpfr_add(acc.get(), acc.get(), b.get(), MPFR_RNDU);
  mpfr_set(out.rad_.get(), acc.get(), MPFR_RNDU);
  out.add_rounding_error(t);
  return out;
}

Ball Ball::operator+(const Ball& o) const {
  const mpfr_prec_t prec = std::max(precision(), o.precision());
  Ball out(prec);
  const int t = mpfr_add(out.mid_.get(), mid_.get(), o.mid_.get(), MPFR_RNDN);
  mpfr_add(out.rad_.get(), rad_.get(), o.rad_.get(), MPFR_RNDU);
  out.add_rounding_error(t);
  return out;
}

Ball Ball::minus(const Integer& k) const {
  Ball out(precision());
  const int t = mpfr_sub_z(out.mid_.get(), mid_.get(), k.get_mpz_t(), MPFR_RNDN);
  mpfr_set(out.rad_.get(), rad_.get(), MPFR_RNDU);
  out.add_rounding_error(t);
  return out;
}

std::optional<Integer> Ball::common_floor() const {
  Mpfr lo(precision() + 64), hi(precision() + 64);
  mpfr_sub(lo.get(), mid_.get(), rad_.get(), MPFR_RNDD);
  mpfr_add(hi.get(), mid_.get(), rad_.get(), MPFR_RNDU);
  Integer flo, fhi;
  mpfr_get_z(flo.get_mpz_t(), lo.get(), MPFR_RNDD);
  mpfr_get_z(fhi.get_mpz_t(), hi.get(), MPFR_RNDD);
  if (flo != fhi) return std::nullopt;
  return flo;
}

double Ball::midpoint_double() const { return mpfr_get_d(mid_.get(), MPFR_RNDN); }

double Ball::radius_upper() const { return mpfr_get_d(rad_.get(), MPFR_RNDU); }

double Ball::error_bound() const {
  // radius plus the conversion error of the midpoint to double
  const double m = std::fabs(midpoint_double());
  return radius_upper() + std::ldexp(std::max(m, std::ldexp(1.0, -1022)), -52);
}

Ball RealNumber::ball(mpfr_prec_t prec) const {
  if (const auto* q = std::get_if<Rational>(&value_)) return Ball::exact(*q, prec);
  AlgebraicReal a = std::get<AlgebraicReal>(value_);
  a.refine(static_cast<unsigned>(prec) + 8);
  return Ball::enclosing(a.enclosure().lo, a.enclosure().hi, prec);
}

Interval RealNumber::enclosure(unsigned bits) const {
  if (const auto* q = std::get_if<Rational>(&value_)) return {*q, *q};
  AlgebraicReal a = std::get<AlgebraicReal>(value_);
  a.refine(bits);
  return a.enclosure();
}

double RealNumber::log2_magnitude() const {
  const Interval e = enclosure(8);
  const double m = std::max(std::fabs(to_double(e.lo)), std::fabs(to_double(e.hi)));
  return m > 1 ? std::log2(m) : 0.0;
}

}  // namespace normlab
