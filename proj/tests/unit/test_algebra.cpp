#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>

#include "helpers.hpp"
#include "normlab/algebra.hpp"
#include "normlab/error.hpp"

using namespace normlab;
using testing::make;

namespace {

// |s|^q == b^p for some |p| <= 24, 1 <= q <= 24, by direct search.
std::optional<Rational> brute_ratio(const Rational& s, long b) {
  const Rational a = abs(s);
  for (long qq = 1; qq <= 24; ++qq) {
    const Rational lhs = pow(a, static_cast<unsigned long>(qq));
    for (long p = -24; p <= 24; ++p) {
      const Rational rhs =
          p >= 0 ? Rational(pow(Integer(b), static_cast<unsigned long>(p))) : Rational(1) / pow(Integer(b), -p);
      if (lhs == rhs) {
        Rational r(p, qq);
        r.canonicalize();
        return r;
      }
    }
  }
  return std::nullopt;
}

// Roots of a monic polynomial by plain simultaneous iteration.
std::vector<std::complex<long double>> numeric_roots(const std::vector<long>& ascending) {
  using C = std::complex<long double>;
  const int n = static_cast<int>(ascending.size()) - 1;
  std::vector<C> z(n);
  for (int i = 0; i < n; ++i) z[i] = std::pow(C(0.4L, 0.9L), i);
  auto eval = [&](C x) {
    C v = 0;
    for (int k = n; k >= 0; --k) v = v * x + C(static_cast<long double>(ascending[k]));
    return v;
  };
  for (int it = 0; it < 2000; ++it) {
    for (int i = 0; i < n; ++i) {
      C d = 1;
      for (int j = 0; j < n; ++j)
        if (j != i) d *= z[i] - z[j];
      z[i] -= eval(z[i]) / d;
    }
  }
  return z;
}

bool numeric_pisot(const std::vector<long>& ascending) {
  auto z = numeric_roots(ascending);
  std::sort(z.begin(), z.end(), [](auto a, auto b) { return std::abs(a) > std::abs(b); });
  if (std::fabs(static_cast<double>(z[0].imag())) > 1e-9 || z[0].real() <= 1) return false;
  for (std::size_t i = 1; i < z.size(); ++i)
    if (std::abs(z[i]) >= 1) return false;
  return true;
}

}  // namespace

TEST_CASE("log commensurability examples") {
  auto r = log_commensurable(Rational(1, 3), 3);
  CHECK(r.commensurable);
  CHECK(*r.ratio == -1);
  r = log_commensurable(Rational(1, 2), 8);
  CHECK(r.commensurable);
  CHECK(*r.ratio == Rational(-1, 3));
  r = log_commensurable(Rational(2, 3), 6);
  CHECK_FALSE(r.commensurable);
  CHECK_FALSE(r.ratio);

  CHECK_THROWS_AS(log_commensurable(0, 2), Error);
  CHECK_THROWS_AS(log_commensurable(-1, 2), Error);
  CHECK_THROWS_AS(log_commensurable(Rational(1, 2), 1), Error);
}

TEST_CASE("log commensurability agrees with exhaustive search") {
  std::mt19937_64 gen(3);
  const std::vector<long> atoms{2, 3, 4, 6, 8, 9, 12, 27, 36, 5, 25, 10, 100};
  for (int trial = 0; trial < 300; ++trial) {
    const long b = atoms[gen() % atoms.size()];
    long num = atoms[gen() % atoms.size()], den = atoms[gen() % atoms.size()];
    if (gen() % 3 == 0) num = 1;
    Rational s(num, den);
    s.canonicalize();
    if (s == 1) continue;
    if (gen() % 2) s = -s;
    const auto got = log_commensurable(s, b);
    const auto want = brute_ratio(s, b);
    CHECK_MESSAGE(got.commensurable == want.has_value(), to_string(s) << " vs " << b);
    if (got.ratio) {
      CHECK(*got.ratio == *want);
      // |s|^den == b^num exactly
      const Rational ratio = *got.ratio;
      const unsigned long qq = ratio.get_den().get_ui();
      const long p = ratio.get_num().get_si();
      const Rational rhs =
          p >= 0 ? Rational(pow(Integer(b), static_cast<unsigned long>(p))) : Rational(1) / pow(Integer(b), -p);
      CHECK(pow(abs(s), qq) == rhs);
    }
  }
}

TEST_CASE("pisot examples") {
  CHECK(is_pisot(make_int_poly({-2, 1})).is_pisot);
  const auto golden = is_pisot(make_int_poly({-1, -1, 1}));
  CHECK(golden.is_pisot);
  REQUIRE(golden.dominant_root);
  const double phi = (1 + std::sqrt(5.0)) / 2;
  CHECK(to_double(golden.dominant_root->lo) <= phi);
  CHECK(to_double(golden.dominant_root->hi) >= phi);
  REQUIRE(golden.conjugate_moduli.size() == 1);
  CHECK(golden.conjugate_moduli[0].hi < 1);
  CHECK(to_double(golden.conjugate_moduli[0].lo) <= phi - 1 + 1e-12);

  CHECK_FALSE(is_pisot(make_int_poly({-3, 0, 1})).is_pisot);
  CHECK_FALSE(is_pisot(make_int_poly({-1, 1})).is_pisot);
  CHECK_FALSE(is_pisot(make_int_poly({3, 1})).is_pisot);

  for (long m = 2; m <= 100; ++m) CHECK(is_pisot(make_int_poly({-m, 1})).is_pisot);
}

TEST_CASE("pisot errors") {
  auto kind_of = [](const IntPoly& p) {
    try {
      is_pisot(p);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidInput;
  };
  CHECK(kind_of(make_int_poly({-1, 0, 1})) == ErrorKind::ReduciblePolynomial);
  CHECK(kind_of(make_int_poly({-2, 0, 0, 1, 0, 1})) == ErrorKind::ReduciblePolynomial);  // x - 1 divides
  CHECK(kind_of(make_int_poly({-3, 2})) == ErrorKind::NotAlgebraicInteger);
}

TEST_CASE("pisot agrees with numeric roots") {
  const std::vector<std::vector<long>> polys{
      {-1, -1, 0, 1},      // plastic number
      {-1, -1, -1, 1},     // tribonacci
      {-2, 0, 1},          // sqrt 2
      {1, -3, 1},          // golden ratio squared
      {-1, -1, -1, -1, 1}, // tetranacci
      {1, -1, -1, -1, 1},  // Salem (reciprocal)
      {-5, 1, 1},
      {-1, -2, 0, 1},
      {-3, -3, 1},
      {1, 1, -3, 1},
      {-1, 0, -1, 1},
      {-7, 0, 0, 1},
  };
  for (const auto& c : polys) {
    const IntPoly p = make_int_poly(c);
    if (irreducibility(p) == Irreducibility::Reducible) continue;
    CHECK_MESSAGE(is_pisot(p).is_pisot == numeric_pisot(c), "coefficients starting " << c[0] << "," << c[1]);
  }
}

TEST_CASE("classify obstruction") {
  const auto cantor = systems::cantor();
  auto report = classify_obstruction(cantor, 3);
  CHECK(report.verdict == ObstructionVerdict::MatchesObstructionForm);
  CHECK(*report.maps[0].slope.ratio == -1);
  CHECK(report.maps[1].translation.matches);

  CHECK(classify_obstruction(cantor, 2).verdict == ObstructionVerdict::FailsItem1);
  CHECK(classify_obstruction(systems::binary(), 2).verdict == ObstructionVerdict::MatchesObstructionForm);
  // slopes 1/3 with a translation 1/2: item 1 passes for b = 3, item 2 fails
  const auto off = make({{"1/3", "0"}, {"1/3", "1/2"}}, {"1/2", "1/2"});
  CHECK(classify_obstruction(off, 3, AffineMap::identity()).verdict == ObstructionVerdict::FailsItem2);

  SUBCASE("translation form") {
    auto t = translation_form(Rational(5, 12), 6);  // 5/12 = 15/36
    CHECK(t.matches);
    CHECK(Rational(t.numerator) / pow(Integer(6), t.exponent) == Rational(5, 12));
    CHECK_FALSE(translation_form(Rational(1, 5), 6).matches);
    t = translation_form(-3, 10);
    CHECK(t.matches);
    CHECK(t.exponent == 0);
  }

  SUBCASE("permutation invariance and incommensurable witness") {
    const std::vector<const char*> slopes{"1/3", "1/9", "-1/2", "1/4", "2/3", "-1/27"};
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 40; ++trial) {
      const char* a = slopes[gen() % slopes.size()];
      const char* b = slopes[gen() % slopes.size()];
      const auto fwd = make({{a, "0"}, {b, "1/2"}}, {"1/3", "2/3"});
      const auto rev = make({{b, "1/2"}, {a, "0"}}, {"2/3", "1/3"});
      for (long base : {2L, 3L, 4L, 6L, 9L}) {
        const auto r1 = classify_obstruction(fwd, base);
        CHECK(r1.verdict == classify_obstruction(rev, base).verdict);
        bool all_item1 = true;
        for (const auto& m : r1.maps) all_item1 = all_item1 && m.slope.commensurable;
        const auto w = incommensurable_slope(fwd, base);
        CHECK(w.applicable == !all_item1);
        if (w.applicable) CHECK_FALSE(r1.maps[*w.map_index - 1].slope.commensurable);
      }
    }
  }

  SUBCASE("incommensurable slope examples") {
    auto w = incommensurable_slope(cantor, 2);
    CHECK(w.applicable);
    CHECK(*w.map_index == 1);
    CHECK_FALSE(incommensurable_slope(cantor, 9).applicable);
    CHECK_FALSE(incommensurable_slope(cantor, 3).applicable);
  }
}
