#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "normlab/ifs.hpp"
#include "normlab/rational.hpp"

namespace testing {

using normlab::Rational;

inline Rational q(const char* text) { return normlab::parse_rational(text); }

struct MapSpec {
  const char* s;
  const char* t;
};

inline normlab::RawSystem raw(std::initializer_list<MapSpec> maps, std::initializer_list<const char*> weights) {
  normlab::RawSystem r;
  for (const auto& m : maps) r.maps.push_back({q(m.s), q(m.t)});
  for (const auto* w : weights) r.weights.push_back(q(w));
  return r;
}

inline normlab::SelfSimilarSystem make(std::initializer_list<MapSpec> maps, std::initializer_list<const char*> weights) {
  return normlab::SelfSimilarSystem::create(raw(maps, weights));
}

// Mixed slopes, one orientation-reversing map, unequal weights.
inline normlab::SelfSimilarSystem mixed() { return make({{"1/2", "0"}, {"-1/3", "1"}}, {"2/5", "3/5"}); }

// Point of the attractor from a random word, in plain double arithmetic.
inline double chaos_point(const normlab::SelfSimilarSystem& sys, std::mt19937_64& gen, int depth = 48) {
  std::vector<double> s, t, cdf;
  double acc = 0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    s.push_back(normlab::to_double(sys.maps()[i].slope));
    t.push_back(normlab::to_double(sys.maps()[i].offset));
    acc += normlab::to_double(sys.weights()[i]);
    cdf.push_back(acc);
  }
  std::uniform_real_distribution<double> u(0.0, acc);
  std::vector<std::size_t> word(static_cast<std::size_t>(depth));
  for (auto& w : word) {
    const double r = u(gen);
    w = 0;
    while (w + 1 < cdf.size() && r >= cdf[w]) ++w;
  }
  double x = normlab::to_double(sys.hull().midpoint());
  for (int j = depth - 1; j >= 0; --j) x = s[word[j]] * x + t[word[j]];
  return x;
}

}  // namespace testing
