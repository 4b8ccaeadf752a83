#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "normlab/error.hpp"
#include "normlab/martingale.hpp"

using namespace normlab;

namespace {

Rational p_pow_neg(unsigned p, std::size_t n) { return Rational(1) / pow(Integer(p), n); }

// Smallest k with (1/smin)^k >= p^n, by exact search.
std::size_t lower_bound_oracle(const Rational& smin, unsigned p, std::size_t n) {
  const Rational target = pow(Rational(p), n);
  Rational acc = 1;
  std::size_t k = 0;
  while (acc < target) {
    acc /= smin;
    ++k;
  }
  return k;
}

void check_record(const SelfSimilarSystem& sys, std::span<const std::uint32_t> omega, const StoppingRecord& rec,
                  unsigned p) {
  const Rational bound = p_pow_neg(p, rec.n);
  REQUIRE(rec.beta >= 1);
  const AffineMap at = compose(sys, omega.first(rec.beta));
  CHECK(at.slope == rec.slope_product);
  CHECK(at.offset == rec.offset);
  CHECK(abs(at.slope) < bound);
  const AffineMap before = compose(sys, omega.first(rec.beta - 1));
  CHECK(abs(before.slope) >= bound);
  CHECK(rec.r == rec.slope_product * Rational(pow(Integer(p), rec.n)));
  CHECK(abs(rec.r) >= sys.min_slope_modulus());
  CHECK(abs(rec.r) < 1);
  CHECK(rec.beta >= lower_bound_oracle(sys.min_slope_modulus(), p, rec.n));
}

}  // namespace

TEST_CASE("stopping time examples") {
  const auto third = testing::make({{"1/3", "0"}, {"1/3", "2/3"}}, {"1/2", "1/2"});
  auto ws = WordStream::bernoulli(third, 1);
  for (std::size_t n = 0; n < 20; ++n) {
    const auto rec = stopping_time(third, ws, n, 3);
    CHECK(rec.beta == n + 1);
    CHECK(rec.r == Rational(1, 3));
  }
  const auto one = stopping_time(third, ws, 1, 2);
  CHECK(one.beta == 1);
  CHECK(one.r == Rational(2, 3));
  CHECK(stopping_time(testing::mixed(), ws, 0, 5).beta == 1);

  const auto halves = testing::make({{"1/2", "0"}, {"1/4", "1/2"}}, {"1/2", "1/2"});
  auto w2 = WordStream::finite(Word{{2}});
  const auto rec = stopping_time(halves, w2, 1, 2);
  CHECK(rec.beta == 1);
  CHECK(r_factor(rec) == Rational(1, 2));

  auto short_stream = WordStream::finite(Word{{1, 1}});
  try {
    stopping_time(third, short_stream, 5, 3);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StreamExhausted);
  }
}

TEST_CASE("stopping time invariants") {
  const std::vector<SelfSimilarSystem> systems_under_test{systems::cantor(), testing::mixed(),
                                                          testing::make({{"1/2", "0"}, {"1/4", "1/2"}}, {"1/3", "2/3"})};
  for (const auto& sys : systems_under_test) {
    for (unsigned p : {2u, 3u, 5u}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto ws = WordStream::bernoulli(sys, seed);
        const auto records = stopping_times(sys, ws, 101, p);
        const auto omega = ws.prefix(ws.available());
        for (std::size_t n = 0; n < records.size(); ++n) {
          CHECK(records[n].n == n);
          if (n) CHECK(records[n].beta >= records[n - 1].beta);
          if (n % 10 == 0) check_record(sys, omega, records[n], p);
        }
        auto again = WordStream::bernoulli(sys, seed);
        const auto single = stopping_time(sys, again, 57, p);
        CHECK(single.beta == records[57].beta);
        CHECK(single.r == records[57].r);
      }
    }
  }
}

TEST_CASE("cantor r stays in [1/3, 1)") {
  const auto cantor = systems::cantor();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto ws = WordStream::bernoulli(cantor, seed);
    for (const auto& rec : stopping_times(cantor, ws, 101, 2)) {
      CHECK(rec.r >= Rational(1, 3));
      CHECK(rec.r < 1);
    }
  }
}

TEST_CASE("cylinder mode") {
  const double tol = 1e-9;
  const auto sys = testing::mixed();
  auto ws = WordStream::bernoulli(sys, 3);
  const auto records = stopping_times(sys, ws, 50, 3);
  for (const auto& rec : records) {
    CHECK(cylinder_mode(sys, rec, 0, 3, tol).re == 1.0);
    for (long q : {1L, -2L, 7L}) {
      const auto mode = cylinder_mode(sys, rec, q, 3, tol);
      const auto inner = fourier_exact(sys, Rational(q) * rec.r, FourierOptions{tol, 10'000'000});
      CHECK(std::fabs(mode.modulus() - inner.modulus()) <= 2 * tol);
    }
  }
  SUBCASE("direct evaluation of the pushed-forward measure") {
    // F_q(T_p^n f ν) = ∫ e^{2πi q p^n f(x)} dν, evaluated through the one-map system
    // obtained by conjugating with f: the same integral with frequency q p^n.
    const auto cantor = systems::cantor();
    auto cs = WordStream::bernoulli(cantor, 5);
    const auto recs = stopping_times(cantor, cs, 12, 2);
    for (const auto& rec : recs) {
      const long q = 3;
      const auto mode = cylinder_mode(cantor, rec, q, 2, tol);
      // integrate e^{2πi q 2^n (a x + c)} against ν: phase from c, frequency q 2^n a
      const Rational freq = Rational(q) * Rational(pow(Integer(2), rec.n)) * rec.slope_product;
      const auto inner = fourier_exact(cantor, freq, FourierOptions{tol, 10'000'000});
      const double turns = to_double(frac(Rational(Rational(q) * Rational(pow(Integer(2), rec.n)) * rec.offset)));
      const auto want = std::polar(1.0, 2 * std::numbers::pi * turns) * inner.value();
      CHECK(std::abs(mode.value() - want) <= 2 * tol);
    }
  }
  SUBCASE("binary system reduces to the Lebesgue transform at q/2") {
    const auto bin = systems::binary();
    auto bs = WordStream::bernoulli(bin, 2);
    const auto recs = stopping_times(bin, bs, 20, 2);
    for (const auto& rec : recs) {
      CHECK(rec.r == Rational(1, 2));
      for (long q : {1L, 3L, 5L}) {
        // |∫_0^1 e^{πiqx} dx| = 2/(π q) for odd q
        CHECK(std::fabs(cylinder_mode(bin, rec, q, 2, tol).modulus() - 2.0 / (std::numbers::pi * q)) <= 2 * tol);
      }
    }
  }
}

TEST_CASE("martingale gap") {
  const auto cantor = systems::cantor();
  const auto zero = martingale_gap(cantor, 1, 0, {10, 100}, 2, 1e-9);
  for (const auto& row : zero.rows) CHECK(row.gap == 0.0);

  const auto series = martingale_gap(cantor, 1, 1, {100, 1000, 10'000}, 2, 1e-9);
  REQUIRE(series.rows.size() == 3);
  for (const auto& row : series.rows) {
    CHECK(row.gap >= 0.0);
    CHECK(row.gap <= 2.0);
  }
  CHECK(series.rows[2].gap < series.rows[0].gap);
  CHECK(series.rows[2].gap <= 0.1);

  const auto lebesgue = martingale_gap(systems::binary(), 4, 1, {1000}, 2, 1e-9);
  CHECK(lebesgue.rows[0].gap <= 0.1);

  CHECK_THROWS_AS(martingale_gap(cantor, 1, 1, {100, 10}, 2, 1e-9), Error);
  CHECK_THROWS_AS(martingale_gap(cantor, 1, 1, {100}, 1, 1e-9), Error);
}
