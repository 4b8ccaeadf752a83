#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "normlab/error.hpp"
#include "normlab/polynomial.hpp"
#include "normlab/sampling.hpp"
#include "normlab/stats.hpp"

using namespace normlab;

namespace {

Word repeat(std::initializer_list<std::uint32_t> block, std::size_t times) {
  Word w;
  for (std::size_t i = 0; i < times; ++i) w.symbols.insert(w.symbols.end(), block.begin(), block.end());
  return w;
}

// Base-b digits of a rational in [0,1) by long division.
std::vector<std::uint32_t> long_division(Rational x, unsigned b, std::size_t n) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    x *= b;
    const Integer d = floor(x);
    out.push_back(static_cast<std::uint32_t>(d.get_ui()));
    x -= d;
  }
  return out;
}

}  // namespace

TEST_CASE("sample_word") {
  const auto cantor = systems::cantor();
  CHECK(sample_word(cantor, 0, 1).empty());
  const Word w = sample_word(cantor, 1'000'000, 2024);
  const auto ones = std::count(w.symbols.begin(), w.symbols.end(), 1u);
  CHECK(std::fabs(static_cast<double>(ones) / 1e6 - 0.5) <= 0.005);
  // reproducible and prefix-stable
  CHECK(sample_word(cantor, 1000, 2024).symbols == std::vector<std::uint32_t>(w.symbols.begin(), w.symbols.begin() + 1000));
  CHECK(sample_word(cantor, 1000, 2025).symbols != sample_word(cantor, 1000, 2024).symbols);
}

TEST_CASE("bernoulli symbol law passes chi-square") {
  // chi-square 0.999 quantiles: df 1 -> 10.828, df 2 -> 13.816
  struct Case {
    SelfSimilarSystem sys;
    double critical;
  };
  const std::vector<Case> cases{{testing::mixed(), 10.828},
                                {testing::make({{"1/4", "0"}, {"1/4", "1/3"}, {"1/4", "3/4"}}, {"1/7", "2/7", "4/7"}),
                                 13.816}};
  for (const auto& c : cases) {
    const std::size_t n = 1'000'000;
    const Word w = sample_word(c.sys, n, 99);
    std::vector<double> counts(c.sys.size(), 0.0);
    for (auto s : w.symbols) counts[s - 1] += 1;
    double chi2 = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double expected = to_double(c.sys.weights()[i]) * static_cast<double>(n);
      chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    CHECK(chi2 < c.critical);
  }
}

TEST_CASE("point_of_word") {
  const auto cantor = systems::cantor();
  for (std::size_t m : {1u, 5u, 20u}) {
    // Σ_{k=1..m} 2/3^k = 1 - 3^-m
    const auto p = point_of_word(cantor, repeat({2}, m), 0);
    CHECK(p.center == 1 - Rational(1) / pow(Integer(3), m));
    CHECK(p.radius == Rational(1) / pow(Integer(3), m));
  }
  // fixed point of f1∘f2: x = x/9 + 2/9
  for (std::size_t m : {1u, 4u, 12u}) {
    const auto p = point_of_word(cantor, repeat({1, 2}, m));
    CHECK(p.enclosure().contains(Rational(1, 4)));
  }
  const auto sys = testing::mixed();
  const auto empty = point_of_word(sys, Word{}, Rational(1, 3));
  CHECK(empty.center == Rational(1, 3));
  CHECK(empty.radius == sys.hull().width());
  try {
    point_of_word(sys, Word{{1}}, 2);
    FAIL("accepted base point outside hull");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BasePointOutsideHull);
  }

  SUBCASE("nested enclosures") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Word w = sample_word(sys, 60, seed);
      Interval outer = point_of_word(sys, Word{}).enclosure();
      for (std::size_t m = 1; m <= 60; m += 7) {
        const Word prefix{{w.symbols.begin(), w.symbols.begin() + static_cast<long>(m)}};
        const Interval inner = point_of_word(sys, prefix).enclosure();
        CHECK(outer.contains(inner));
        outer = inner;
      }
    }
  }
}

TEST_CASE("digits") {
  const auto cantor = systems::cantor();
  SUBCASE("quarter in base 3") {
    auto ws = WordStream::periodic(Word{}, Word{{1, 2}});
    const auto ds = digits(cantor, ws, 3, 40);
    CHECK(ds.digits == long_division(Rational(1, 4), 3, 40));
    for (std::size_t i = 0; i < 40; ++i) CHECK(ds.digits[i] == (i % 2 ? 2u : 0u));
  }
  SUBCASE("boundary point uses the terminating expansion") {
    // 1/2 = f2(0) in the binary system: word 2,1,1,1,...
    auto ws = WordStream::periodic(Word{{2}}, Word{{1}});
    const auto ds = digits(systems::binary(), ws, 2, 30);
    CHECK(ds.exact);
    CHECK(ds.digits[0] == 1);
    for (std::size_t i = 1; i < 30; ++i) CHECK(ds.digits[i] == 0);
  }
  SUBCASE("finite stream that cannot settle a boundary") {
    auto ws = WordStream::finite(Word{{2, 1, 1}});
    try {
      digits(systems::binary(), ws, 2, 30);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PrecisionExhausted);
      CHECK(exit_code(e.kind()) == 3);
    }
  }
  SUBCASE("cantor points avoid digit 1 in base 3") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto ws = WordStream::bernoulli(cantor, seed);
      const auto ds = digits(cantor, ws, 3, 500);
      CHECK(ds.certified_length == 500);
      CHECK(std::count(ds.digits.begin(), ds.digits.end(), 1u) == 0);
    }
  }
  SUBCASE("digits match long division of the enclosure center") {
    const auto sys = testing::mixed();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto ws = WordStream::bernoulli(sys, seed);
      const auto ds = digits(sys, ws, 10, 60);
      Rational c = ds.source.center;
      c -= floor(c);
      CHECK(ds.digits == long_division(c, 10, 60));
    }
  }
  SUBCASE("guard stability") {
    const auto sys = testing::mixed();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      for (unsigned base : {2u, 3u, 10u}) {
        auto a = WordStream::bernoulli(sys, seed);
        auto b = WordStream::bernoulli(sys, seed);
        const auto d1 = digits(sys, a, base, 64, {16, 6});
        const auto d2 = digits(sys, b, base, 64, {26, 6});
        CHECK(d1.digits == d2.digits);
      }
    }
  }
}

TEST_CASE("orbit_sequence") {
  auto ws = WordStream::periodic(Word{}, Word{{1, 2}});
  const auto ds = digits(systems::cantor(), ws, 3, 200);
  const auto orbit = orbit_sequence(ds, 100);
  CHECK(orbit.values[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(orbit.values[1] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(orbit.values[2] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(orbit_sequence(ds, 190), Error);

  SUBCASE("shift consistency") {
    const auto sys = testing::mixed();
    for (unsigned base : {2u, 3u, 7u}) {
      auto stream = WordStream::bernoulli(sys, 4);
      const auto d = digits(sys, stream, base, 400 + tail_digits(base));
      const auto o = orbit_sequence(d, 400);
      for (std::size_t n = 0; n + 1 < o.size(); ++n) {
        double next = base * o.values[n];
        next -= std::floor(next);
        double diff = std::fabs(next - o.values[n + 1]);
        diff = std::min(diff, 1 - diff);
        CHECK(diff <= 0x1.0p-49 * base);
      }
    }
  }
  SUBCASE("cantor orbit points have base-3 digits in {0,2}") {
    const auto cantor = systems::cantor();
    auto stream = WordStream::bernoulli(cantor, 8);
    const auto d = digits(cantor, stream, 3, 300 + tail_digits(3));
    const auto o = orbit_sequence(d, 300);
    for (double v : o.values) {
      // the leading base-3 digit of each point is 0 or 2
      CHECK(std::floor(3 * v) != 1.0);
    }
  }
}

TEST_CASE("beta_orbit") {
  SUBCASE("golden ratio at 1") {
    const auto beta = AlgebraicReal::largest_root(make_int_poly({-1, -1, 1}));
    REQUIRE(beta);
    PointApproximation one{1, 0, {}, 1};
    const auto r = beta_orbit(one, *beta, 1);
    CHECK(r.status == OrbitStatus::Complete);
    REQUIRE(r.sample.size() == 1);
    CHECK(std::fabs(r.sample.values[0] - (std::sqrt(5.0) - 1) / 2) <= 1e-15);
  }
  SUBCASE("zero") {
    PointApproximation zero{0, 0, {}, 0};
    const auto r = beta_orbit(zero, Rational(5, 2), 50);
    CHECK(r.status == OrbitStatus::Complete);
    for (double v : r.sample.values) CHECK(v == 0.0);
  }
  SUBCASE("orbit stays in K_beta") {
    const Rational beta(5, 2);
    const auto sys = systems::bernoulli(beta);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto pt = point_of_word(sys, sample_word(sys, 160, seed));
      const auto r = beta_orbit(pt, beta, 60);
      CHECK(r.status == OrbitStatus::Complete);
      CHECK(r.sample.size() == 60);
      for (double v : r.sample.values) CHECK(v <= 2.0 / 3.0 + 1e-12);
    }
  }
  SUBCASE("wide input stops with a status") {
    const Rational beta(5, 2);
    const auto sys = systems::bernoulli(beta);
    const auto pt = point_of_word(sys, sample_word(sys, 10, 1));
    const auto r = beta_orbit(pt, beta, 60);
    CHECK(r.status != OrbitStatus::Complete);
    CHECK(r.sample.size() < 60);
  }
}

TEST_CASE("power_orbit") {
  const auto a = power_orbit(Rational(3, 2), 2);
  CHECK(a.values[0] == 0.5);
  CHECK(a.values[1] == 0.25);
  const auto two = power_orbit(Rational(2), 100);
  for (double v : two.values) CHECK(v == 0.0);
  const auto long_run = power_orbit(Rational(3, 2), 1000);
  CHECK(long_run.size() == 1000);
  CHECK(discrepancy(long_run) < 0.1);
  // spot check against exact big-rational arithmetic
  for (std::size_t n : {10u, 137u, 999u}) {
    const Rational x = pow(Rational(3, 2), n);
    CHECK(std::fabs(long_run.values[n - 1] - to_double(x - floor(x))) <= kCertifiedAccuracy);
  }
  CHECK_THROWS_AS(power_orbit(Rational(1), 5), Error);
}
