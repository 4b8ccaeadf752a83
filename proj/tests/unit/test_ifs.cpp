#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "normlab/error.hpp"
#include "normlab/system_io.hpp"

using namespace normlab;
using testing::make;
using testing::q;
using testing::raw;

namespace {

ErrorKind first_issue(const RawSystem& r) {
  const auto report = validate(r);
  REQUIRE_FALSE(report.ok());
  return report.issues.front().kind;
}

Word random_word(std::mt19937_64& gen, std::size_t len, std::uint32_t n) {
  std::uniform_int_distribution<std::uint32_t> d(1, n);
  Word w;
  for (std::size_t i = 0; i < len; ++i) w.symbols.push_back(d(gen));
  return w;
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("1/3") == Rational(1, 3));
  CHECK(parse_rational("-2/9") == Rational(-2, 9));
  CHECK(parse_rational("4/6") == Rational(2, 3));
  CHECK(parse_rational("7") == 7);
  CHECK(to_string(parse_rational("6/-4")) == "-3/2");
  for (const char* bad : {"1/0", "", "1/", "x", "1.5", "1//2", "/3"}) {
    try {
      parse_rational(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ConfigParseError);
    }
  }
}

TEST_CASE("validate") {
  SUBCASE("cantor is valid") {
    auto r = raw({{"1/3", "0"}, {"1/3", "2/3"}}, {"1/2", "1/2"});
    r.hull = Interval{0, 1};
    const auto report = validate(r);
    CHECK(report.ok());
    REQUIRE(report.attractor_hull);
    CHECK(*report.attractor_hull == Interval{0, 1});
  }
  SUBCASE("weights not summing to one") {
    CHECK(first_issue(raw({{"1/3", "0"}, {"1/3", "2/3"}}, {"1/2", "1/3"})) == ErrorKind::WeightSumError);
  }
  SUBCASE("expanding slope") {
    CHECK(first_issue(raw({{"3/2", "0"}, {"1/3", "2/3"}}, {"1/2", "1/2"})) == ErrorKind::NonContractingMap);
  }
  SUBCASE("zero or nonpositive weight") {
    CHECK(first_issue(raw({{"1/3", "0"}, {"1/3", "2/3"}}, {"1", "0"})) == ErrorKind::WeightSumError);
  }
  SUBCASE("common fixed point") {
    CHECK(first_issue(raw({{"1/3", "0"}, {"1/2", "0"}}, {"1/2", "1/2"})) == ErrorKind::DegenerateFixedPoints);
  }
  SUBCASE("supplied hull not invariant") {
    auto r = raw({{"1/3", "0"}, {"1/3", "2/3"}}, {"1/2", "1/2"});
    r.hull = Interval{0, Rational(1, 2)};
    CHECK(first_issue(r) == ErrorKind::HullNotInvariant);
  }
  SUBCASE("create throws the first issue") {
    try {
      SelfSimilarSystem::create(raw({{"1/3", "0"}, {"1/3", "2/3"}}, {"1/2", "1/3"}));
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::WeightSumError);
      CHECK(exit_code(e.kind()) == 2);
    }
  }
}

TEST_CASE("compose") {
  const auto cantor = systems::cantor();
  SUBCASE("empty word is the identity") {
    const AffineMap id = compose(cantor, Word{});
    CHECK(id.slope == 1);
    CHECK(id.offset == 0);
  }
  SUBCASE("hand compositions") {
    // f1(f2(x)) = ((x+2)/3)/3 = x/9 + 2/9 ; f2(f1(x)) = (x/3 + 2)/3 = x/9 + 2/3
    const AffineMap a = compose(cantor, Word{{1, 2}});
    CHECK(a.slope == Rational(1, 9));
    CHECK(a.offset == Rational(2, 9));
    const AffineMap b = compose(cantor, Word{{2, 1}});
    CHECK(b.slope == Rational(1, 9));
    CHECK(b.offset == Rational(2, 3));
  }
  SUBCASE("symbol out of range") {
    CHECK_THROWS_AS(compose(cantor, Word{{1, 3}}), Error);
    CHECK_THROWS_AS(compose(cantor, Word{{0}}), Error);
  }
  SUBCASE("concatenation property and slope product") {
    std::mt19937_64 gen(7);
    const auto sys = testing::mixed();
    for (int trial = 0; trial < 200; ++trial) {
      const Word w1 = random_word(gen, gen() % 40, 2);
      const Word w2 = random_word(gen, gen() % 40, 2);
      const AffineMap lhs = compose(sys, concat(w1, w2));
      const AffineMap rhs = compose(compose(sys, w1), compose(sys, w2));
      CHECK(lhs == rhs);
      // Oracle: fold maps one at a time from the right.
      Rational slope = 1, offset = 0;
      const Word w = concat(w1, w2);
      for (auto it = w.symbols.rbegin(); it != w.symbols.rend(); ++it) {
        const AffineMap& f = sys.map(*it);
        offset = f.slope * offset + f.offset;
        slope = f.slope * slope;
      }
      CHECK(lhs.slope == slope);
      CHECK(lhs.offset == offset);
      const AffineMap shorter = compose(sys, w1);
      CHECK(abs(lhs.slope) <= abs(shorter.slope));
    }
  }
}

TEST_CASE("attractor hull") {
  CHECK(systems::cantor().attractor_hull() == Interval{0, 1});
  CHECK(systems::binary().attractor_hull() == Interval{0, 1});
  // right endpoint 1/(beta - 1) for beta = 5/2
  CHECK(systems::bernoulli(Rational(5, 2)).attractor_hull() == Interval{0, Rational(2, 3)});
  CHECK(testing::mixed().attractor_hull() == Interval{0, 1});

  SUBCASE("invariance and minimality on random systems") {
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> num(-9, 9), den(2, 12), off(-20, 20);
    int checked = 0;
    while (checked < 100) {
      RawSystem r;
      const int n = 2 + static_cast<int>(gen() % 3);
      for (int i = 0; i < n; ++i) {
        const int d = den(gen);
        int a = num(gen);
        if (a == 0 || std::abs(a) >= d) continue;
        Rational s(a, d), t(off(gen), den(gen));
        s.canonicalize();
        t.canonicalize();
        r.maps.push_back({s, t});
      }
      if (r.maps.size() < 2) continue;
      for (std::size_t i = 0; i < r.maps.size(); ++i) r.weights.push_back(Rational(1, r.maps.size()));
      if (!validate(r).ok()) continue;
      const Interval h = attractor_hull(r.maps);
      for (const auto& f : r.maps) CHECK(h.contains(image(f, h)));
      // endpoints belong to the attractor: each is a fixed point of some composition,
      // so shrinking by any amount breaks invariance.
      const Rational eps = h.width() / 1000;
      const Interval smaller_lo{h.lo + eps, h.hi}, smaller_hi{h.lo, h.hi - eps};
      bool lo_breaks = false, hi_breaks = false;
      for (const auto& f : r.maps) {
        lo_breaks = lo_breaks || !smaller_lo.contains(image(f, smaller_lo));
        hi_breaks = hi_breaks || !smaller_hi.contains(image(f, smaller_hi));
      }
      CHECK(lo_breaks);
      CHECK(hi_breaks);
      ++checked;
    }
  }
}

TEST_CASE("normalize") {
  SUBCASE("cantor is already normalized") {
    const auto n = normalize(systems::cantor());
    CHECK(n.conjugacy == AffineMap::identity());
    for (std::size_t i = 0; i < 2; ++i) CHECK(n.system.maps()[i] == systems::cantor().maps()[i]);
  }
  SUBCASE("shifted cantor") {
    // f(x) = x/3 + c with fixed point 3c/2; c = 1 gives 3/2, c = 1 + 2/3 gives 5/2
    const auto shifted = make({{"1/3", "1"}, {"1/3", "5/3"}}, {"1/2", "1/2"});
    CHECK(shifted.attractor_hull() == Interval{Rational(3, 2), Rational(5, 2)});
    const auto n = normalize(shifted);
    CHECK(n.conjugacy.slope == 1);
    CHECK(n.conjugacy.offset == Rational(3, 2));
    for (std::size_t i = 0; i < 2; ++i) CHECK(n.system.maps()[i] == systems::cantor().maps()[i]);
  }
  SUBCASE("beta system") {
    const auto n = normalize(systems::bernoulli(Rational(5, 2)));
    CHECK(n.conjugacy.slope == Rational(2, 3));
    CHECK(n.conjugacy.offset == 0);
    CHECK(n.system.attractor_hull() == Interval{0, 1});
  }
  SUBCASE("idempotent and weight preserving") {
    const auto sys = make({{"-2/5", "3"}, {"1/4", "-1"}, {"1/3", "7/2"}}, {"1/6", "1/3", "1/2"});
    const auto once = normalize(sys);
    const auto twice = normalize(once.system);
    CHECK(twice.conjugacy == AffineMap::identity());
    CHECK(once.system.attractor_hull() == Interval{0, 1});
    for (std::size_t i = 0; i < sys.size(); ++i) {
      CHECK(once.system.weights()[i] == sys.weights()[i]);
      CHECK(once.system.maps()[i].slope == sys.maps()[i].slope);
    }
  }
}

TEST_CASE("system file round trip") {
  auto r = raw({{"-2/9", "1/7"}, {"1/3", "2/3"}, {"1/5", "-4"}}, {"1/4", "1/4", "1/2"});
  const std::string text = serialize_system(r);
  const RawSystem back = parse_system(text);
  CHECK(serialize_system(back) == text);
  CHECK(system_hash(back) == system_hash(r));
  CHECK(system_hash(back).size() == 16);
  r.hull = Interval{-5, 5};
  CHECK(serialize_system(parse_system(serialize_system(r))) == serialize_system(r));
  CHECK(system_hash(r) != system_hash(back));

  CHECK_THROWS_AS(parse_system("{\"maps\": [{\"s\": \"1/0\", \"t\": \"0\"}], \"weights\": [\"1\"]}"), Error);
  CHECK_THROWS_AS(parse_system("not json"), Error);
  try {
    parse_system("{\"maps\": 3}");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigParseError);
  }
}
