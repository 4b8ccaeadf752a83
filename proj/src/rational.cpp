#include "normlab/rational.hpp"

#include <mpfr.h>

#include "normlab/error.hpp"

namespace normlab {

namespace {

bool is_integer_literal(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

Integer parse_integer(std::string_view s) {
  std::string owned(s[0] == '+' ? s.substr(1) : s);
  return Integer(owned, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  const auto num_text = text.substr(0, slash);
  if (!is_integer_literal(num_text)) {
    throw Error(ErrorKind::ConfigParseError, "malformed rational \"" + std::string(text) + "\"");
  }
  Integer den = 1;
  if (slash != std::string_view::npos) {
    const auto den_text = text.substr(slash + 1);
    if (!is_integer_literal(den_text)) {
      throw Error(ErrorKind::ConfigParseError, "malformed rational \"" + std::string(text) + "\"");
    }
    den = parse_integer(den_text);
    if (den == 0) {
      throw Error(ErrorKind::ConfigParseError, "zero denominator in \"" + std::string(text) + "\"");
    }
  }
  Rational q(parse_integer(num_text), den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

Rational make_rational(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Integer floor(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational frac(const Rational& q) {
  Rational r = q - Rational(floor(q));
  r.canonicalize();
  return r;
}

Integer pow(const Integer& base, unsigned long exp) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

Rational pow(const Rational& base, unsigned long exp) {
  Rational r(pow(base.get_num(), exp), pow(base.get_den(), exp));
  r.canonicalize();
  return r;
}

double to_double(const Rational& q) {
  // mpq_get_d truncates; go through MPFR for round-to-nearest.
  mpfr_t tmp;
  mpfr_init2(tmp, 53);
  mpfr_set_q(tmp, q.get_mpq_t(), MPFR_RNDN);
  const double d = mpfr_get_d(tmp, MPFR_RNDN);
  mpfr_clear(tmp);
  return d;
}

}  // namespace normlab
