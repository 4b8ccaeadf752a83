#include "normlab/ifs.hpp"

#include <algorithm>
#include <cmath>

namespace normlab {

Rational AffineMap::fixed_point() const {
  Rational x = offset / (Rational(1) - slope);
  x.canonicalize();
  return x;
}

AffineMap AffineMap::inverse() const {
  Rational s = 1 / slope;
  Rational t = -offset / slope;
  s.canonicalize();
  t.canonicalize();
  return {s, t};
}

AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
  Rational s = outer.slope * inner.slope;
  Rational t = outer.slope * inner.offset + outer.offset;
  s.canonicalize();
  t.canonicalize();
  return {s, t};
}

Interval image(const AffineMap& f, const Interval& interval) {
  Rational a = f(interval.lo);
  Rational b = f(interval.hi);
  if (a > b) std::swap(a, b);
  return {a, b};
}

Word concat(const Word& a, const Word& b) {
  Word w = a;
  w.symbols.insert(w.symbols.end(), b.symbols.begin(), b.symbols.end());
  return w;
}

namespace {

Interval hull_of_images(std::span<const AffineMap> maps, const Interval& interval) {
  Interval out = image(maps[0], interval);
  for (std::size_t i = 1; i < maps.size(); ++i) {
    const Interval im = image(maps[i], interval);
    if (im.lo < out.lo) out.lo = im.lo;
    if (im.hi > out.hi) out.hi = im.hi;
  }
  return out;
}

// Endpoint choice: endpoint = s_i * (lo or hi) + t_i.
struct EndpointChoice {
  std::size_t map;
  bool uses_hi;
};

std::optional<Interval> solve_endpoints(std::span<const AffineMap> maps, EndpointChoice lo_choice,
                                        EndpointChoice hi_choice) {
  // (1 - a1) lo - b1 hi = c1 ; -a2 lo + (1 - b2) hi = c2
  const AffineMap& f = maps[lo_choice.map];
  const AffineMap& g = maps[hi_choice.map];
  Rational a1 = lo_choice.uses_hi ? Rational(0) : f.slope;
  Rational b1 = lo_choice.uses_hi ? f.slope : Rational(0);
  Rational a2 = hi_choice.uses_hi ? Rational(0) : g.slope;
  Rational b2 = hi_choice.uses_hi ? g.slope : Rational(0);
  const Rational m11 = 1 - a1, m12 = -b1, m21 = -a2, m22 = 1 - b2;
  const Rational det = m11 * m22 - m12 * m21;
  if (det == 0) return std::nullopt;
  Rational lo = (f.offset * m22 - m12 * g.offset) / det;
  Rational hi = (m11 * g.offset - m21 * f.offset) / det;
  lo.canonicalize();
  hi.canonicalize();
  if (lo > hi) return std::nullopt;
  return Interval{lo, hi};
}

bool is_invariant_fixed_point(std::span<const AffineMap> maps, const Interval& candidate) {
  return hull_of_images(maps, candidate) == candidate;
}

}  // namespace

Interval attractor_hull(std::span<const AffineMap> maps) {
  if (maps.empty()) throw Error(ErrorKind::NonConvergence, "empty map list");
  Rational rho = 0;
  for (const auto& f : maps) rho = std::max(rho, abs(f.slope));
  if (rho >= 1 || rho == 0) {
    throw Error(ErrorKind::NonConvergence, "maps are not strictly contracting");
  }

  // Floating iteration of I -> hull(∪ f_i(I)) identifies which map and which
  // endpoint realise each extreme of the hull.
  std::vector<long double> s, t;
  for (const auto& f : maps) {
    s.push_back(static_cast<long double>(to_double(f.slope)));
    t.push_back(static_cast<long double>(to_double(f.offset)));
  }
  long double lo = 1e300L, hi = -1e300L;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const long double fp = t[i] / (1.0L - s[i]);
    lo = std::min(lo, fp);
    hi = std::max(hi, fp);
  }
  const long double width0 = std::max(hi - lo, 1e-30L);
  const double log_rate = std::log(1.0 / to_double(rho));
  const auto cap = static_cast<std::size_t>(
      10.0 * std::ceil(std::log(static_cast<double>(width0) / std::ldexp(1.0, -128)) / log_rate));

  EndpointChoice lo_choice{0, false}, hi_choice{0, true};
  bool converged = false;
  for (std::size_t step = 0; step < std::max<std::size_t>(cap, 1); ++step) {
    long double nlo = 1e300L, nhi = -1e300L;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const long double a = s[i] * lo + t[i];
      const long double b = s[i] * hi + t[i];
      if (a < nlo) { nlo = a; lo_choice = {i, false}; }
      if (b < nlo) { nlo = b; lo_choice = {i, true}; }
      if (a > nhi) { nhi = a; hi_choice = {i, false}; }
      if (b > nhi) { nhi = b; hi_choice = {i, true}; }
    }
    const bool stable = nlo == lo && nhi == hi;
    lo = nlo;
    hi = nhi;
    if (stable) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorKind::NonConvergence, "hull iteration cap exceeded");

  if (auto exact = solve_endpoints(maps, lo_choice, hi_choice); exact && is_invariant_fixed_point(maps, *exact)) {
    return *exact;
  }
  // Near-ties in floating point can pick the wrong extreme map; the fixed
  // point of the hull operator is unique, so search all endpoint choices.
  for (std::size_t i = 0; i < maps.size(); ++i) {
    for (bool ui : {false, true}) {
      for (std::size_t j = 0; j < maps.size(); ++j) {
        for (bool uj : {false, true}) {
          if (auto exact = solve_endpoints(maps, {i, ui}, {j, uj}); exact && is_invariant_fixed_point(maps, *exact)) {
            return *exact;
          }
        }
      }
    }
  }
  throw Error(ErrorKind::NonConvergence, "no exact invariant hull found");
}

ValidationReport validate(const RawSystem& raw) {
  ValidationReport report;
  auto fail = [&](ErrorKind kind, std::string detail) { report.issues.push_back({kind, std::move(detail)}); };

  if (raw.maps.size() < 2) {
    fail(ErrorKind::DegenerateFixedPoints, "at least two maps are required");
  }
  if (raw.weights.size() != raw.maps.size()) {
    fail(ErrorKind::WeightSumError, "weight count " + std::to_string(raw.weights.size()) + " does not match map count " +
                                        std::to_string(raw.maps.size()));
  }
  Rational total = 0;
  for (std::size_t i = 0; i < raw.weights.size(); ++i) {
    if (raw.weights[i] <= 0) fail(ErrorKind::WeightSumError, "weight " + std::to_string(i + 1) + " is not positive");
    total += raw.weights[i];
  }
  if (total != 1) fail(ErrorKind::WeightSumError, "weights sum to " + to_string(total) + ", expected 1");

  bool contracting = !raw.maps.empty();
  for (std::size_t i = 0; i < raw.maps.size(); ++i) {
    const Rational a = abs(raw.maps[i].slope);
    if (a == 0 || a >= 1) {
      contracting = false;
      fail(ErrorKind::NonContractingMap, "map " + std::to_string(i + 1) + " has slope " + to_string(raw.maps[i].slope));
    }
  }
  if (!contracting) return report;

  bool distinct = false;
  const Rational fp0 = raw.maps[0].fixed_point();
  for (std::size_t i = 1; i < raw.maps.size(); ++i) {
    if (raw.maps[i].fixed_point() != fp0) distinct = true;
  }
  if (raw.maps.size() >= 2 && !distinct) {
    fail(ErrorKind::DegenerateFixedPoints, "all maps share the fixed point " + to_string(fp0));
  }

  report.attractor_hull = attractor_hull(raw.maps);
  if (raw.hull) {
    if (raw.hull->lo > raw.hull->hi) {
      fail(ErrorKind::HullNotInvariant, "hull endpoints out of order");
    } else {
      for (std::size_t i = 0; i < raw.maps.size(); ++i) {
        if (!raw.hull->contains(image(raw.maps[i], *raw.hull))) {
          fail(ErrorKind::HullNotInvariant, "map " + std::to_string(i + 1) + " does not preserve the supplied hull");
        }
      }
    }
  }
  return report;
}

SelfSimilarSystem SelfSimilarSystem::create(RawSystem raw) {
  const ValidationReport report = validate(raw);
  if (!report.ok()) throw Error(report.issues.front().kind, report.issues.front().detail);

  SelfSimilarSystem sys;
  sys.maps_ = std::move(raw.maps);
  sys.weights_ = std::move(raw.weights);
  sys.attractor_hull_ = *report.attractor_hull;
  sys.hull_supplied_ = raw.hull.has_value();
  sys.hull_ = raw.hull.value_or(sys.attractor_hull_);
  sys.rho_ = 0;
  sys.min_slope_ = 1;
  for (const auto& f : sys.maps_) {
    sys.rho_ = std::max(sys.rho_, abs(f.slope));
    sys.min_slope_ = std::min(sys.min_slope_, abs(f.slope));
  }
  return sys;
}

bool SelfSimilarSystem::homogeneous() const {
  return std::all_of(maps_.begin(), maps_.end(), [&](const AffineMap& f) { return f.slope == maps_[0].slope; });
}

RawSystem SelfSimilarSystem::raw() const {
  RawSystem r{maps_, weights_, std::nullopt};
  if (hull_supplied_) r.hull = hull_;
  return r;
}

namespace {

AffineMap compose_range(const SelfSimilarSystem& system, std::span<const std::uint32_t> symbols) {
  if (symbols.size() <= 16) {
    AffineMap acc = AffineMap::identity();
    for (auto it = symbols.rbegin(); it != symbols.rend(); ++it) acc = compose(system.map(*it), acc);
    return acc;
  }
  // Balanced splitting keeps operand sizes even, which matters for long words.
  const std::size_t mid = symbols.size() / 2;
  return compose(compose_range(system, symbols.first(mid)), compose_range(system, symbols.subspan(mid)));
}

}  // namespace

AffineMap compose(const SelfSimilarSystem& system, std::span<const std::uint32_t> symbols) {
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] < 1 || symbols[i] > system.size()) {
      throw Error(ErrorKind::SymbolOutOfRange,
                  "symbol " + std::to_string(symbols[i]) + " at position " + std::to_string(i + 1));
    }
  }
  return compose_range(system, symbols);
}

SelfSimilarSystem conjugate(const SelfSimilarSystem& system, const AffineMap& g) {
  const AffineMap g_inv = g.inverse();
  RawSystem raw;
  for (const auto& f : system.maps()) raw.maps.push_back(compose(g_inv, compose(f, g)));
  raw.weights.assign(system.weights().begin(), system.weights().end());
  return SelfSimilarSystem::create(std::move(raw));
}

NormalizedSystem normalize(const SelfSimilarSystem& system) {
  const Interval& h = system.attractor_hull();
  if (h.width() == 0) throw Error(ErrorKind::DegenerateHull, "attractor hull is a single point");
  AffineMap g{h.width(), h.lo};
  return {conjugate(system, g), g};
}

namespace systems {

SelfSimilarSystem cantor() {
  return SelfSimilarSystem::create(
      {{{make_rational(1, 3), 0}, {make_rational(1, 3), make_rational(2, 3)}},
       {make_rational(1, 2), make_rational(1, 2)},
       std::nullopt});
}

SelfSimilarSystem binary() {
  return SelfSimilarSystem::create(
      {{{make_rational(1, 2), 0}, {make_rational(1, 2), make_rational(1, 2)}},
       {make_rational(1, 2), make_rational(1, 2)},
       std::nullopt});
}

SelfSimilarSystem bernoulli(const Rational& beta) {
  Rational s = 1 / beta;
  s.canonicalize();
  return SelfSimilarSystem::create({{{s, 0}, {s, s}}, {make_rational(1, 2), make_rational(1, 2)}, std::nullopt});
}

}  // namespace systems

}  // namespace normlab
