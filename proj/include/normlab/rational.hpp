#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace normlab {

/// Exact rationals are GMP rationals kept in canonical form (lowest terms,
/// positive denominator). Every helper here returns canonical values.
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "num/den" or "num". Rejects zero denominators, whitespace inside
/// the literal and anything that is not a base-10 integer pair.
Rational parse_rational(std::string_view text);

/// Canonical text form: "num/den" in lowest terms, or "num" for integers.
std::string to_string(const Rational& q);

Rational make_rational(long num, long den = 1);

Rational abs(const Rational& q);

Integer floor(const Rational& q);

/// Fractional part in [0, 1).
Rational frac(const Rational& q);

/// base^exp for exp >= 0.
Integer pow(const Integer& base, unsigned long exp);
Rational pow(const Rational& base, unsigned long exp);

/// Nearest double (round to nearest); exact when representable.
double to_double(const Rational& q);

}  // namespace normlab
