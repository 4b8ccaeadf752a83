#include "normlab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace normlab {

// ---------------------------------------------------------------------------
// Commensurability

namespace {

// Pairwise coprime base whose products cover every input (all inputs > 1).
std::vector<Integer> coprime_base(std::vector<Integer> items) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < items.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < items.size() && !changed; ++j) {
        if (items[i] == items[j]) {
          items.erase(items.begin() + static_cast<long>(j));
          changed = true;
          break;
        }
        Integer g;
        mpz_gcd(g.get_mpz_t(), items[i].get_mpz_t(), items[j].get_mpz_t());
        if (g == 1) continue;
        const Integer a = items[i] / g, b = items[j] / g;
        items.erase(items.begin() + static_cast<long>(j));
        items.erase(items.begin() + static_cast<long>(i));
        for (const Integer* v : std::initializer_list<const Integer*>{&g, &a, &b}) {
          if (*v > 1) items.push_back(*v);
        }
        changed = true;
      }
    }
  }
  return items;
}

long valuation(Integer n, const Integer& prime_like) {
  long e = 0;
  while (n % prime_like == 0) {
    n /= prime_like;
    ++e;
  }
  return e;
}

}  // namespace

CommensurabilityResult log_commensurable(const Rational& s, const Integer& base) {
  const Rational a = abs(s);
  if (a == 0 || a == 1) throw Error(ErrorKind::InvalidInput, "slope must satisfy s != 0 and |s| != 1");
  if (base < 2) throw Error(ErrorKind::InvalidInput, "base must be >= 2");

  std::vector<Integer> items{base};
  if (a.get_num() > 1) items.push_back(a.get_num());
  if (a.get_den() > 1) items.push_back(a.get_den());
  const auto basis = coprime_base(items);

  // Exponent vectors: |s| = prod c^e_c, b = prod c^f_c.
  std::vector<long> e, f;
  for (const auto& c : basis) {
    e.push_back(valuation(a.get_num(), c) - valuation(a.get_den(), c));
    f.push_back(valuation(base, c));
  }
  std::optional<Rational> ratio;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (f[k] == 0) {
      if (e[k] != 0) return {};
      continue;
    }
    Rational r(e[k], f[k]);
    r.canonicalize();
    if (ratio && *ratio != r) return {};
    ratio = r;
  }
  if (!ratio) return {};

  // |s|^q == b^p exactly.
  const auto q = ratio->get_den().get_ui();
  const long p = ratio->get_num().get_si();
  const Rational lhs = pow(a, q);
  const Rational b_p = p >= 0 ? Rational(pow(base, static_cast<unsigned long>(p)))
                              : Rational(Integer(1), pow(base, static_cast<unsigned long>(-p)));
  if (lhs != b_p) return {};
  return {true, ratio};
}

// ---------------------------------------------------------------------------
// Pisot

namespace {

struct ComplexQ {
  Rational re = 0, im = 0;
};

ComplexQ operator+(const ComplexQ& a, const ComplexQ& b) { return {a.re + b.re, a.im + b.im}; }
ComplexQ operator-(const ComplexQ& a, const ComplexQ& b) { return {a.re - b.re, a.im - b.im}; }
ComplexQ operator*(const ComplexQ& a, const ComplexQ& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
Rational norm(const ComplexQ& z) { return z.re * z.re + z.im * z.im; }
ComplexQ operator/(const ComplexQ& a, const ComplexQ& b) {
  const Rational d = norm(b);
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

void canonicalize(ComplexQ& z) {
  z.re.canonicalize();
  z.im.canonicalize();
}

Rational round_dyadic(const Rational& x, unsigned bits) {
  const Integer scale = pow(Integer(2), bits);
  Rational scaled = x * scale + Rational(1, 2);
  Rational r(floor(scaled), scale);
  r.canonicalize();
  return r;
}

ComplexQ round_dyadic(const ComplexQ& z, unsigned bits) { return {round_dyadic(z.re, bits), round_dyadic(z.im, bits)}; }

ComplexQ evaluate(const IntPoly& p, const ComplexQ& z) {
  ComplexQ acc;
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) {
    acc = acc * z;
    acc.re += *it;
    canonicalize(acc);
  }
  return acc;
}

/// lo <= sqrt(q) <= hi with hi - lo <= 2^-bits / den(q).
std::pair<Rational, Rational> sqrt_bounds(const Rational& q, unsigned bits) {
  const Integer scale = pow(Integer(2), bits);
  Integer radicand = q.get_num() * q.get_den() * scale * scale;
  Integer root;
  mpz_sqrt(root.get_mpz_t(), radicand.get_mpz_t());
  const Integer den = q.get_den() * scale;
  Rational lo(root, den), hi(root + 1, den);
  lo.canonicalize();
  hi.canonicalize();
  return {lo, hi};
}

std::vector<std::complex<long double>> durand_kerner(const IntPoly& p) {
  const int n = p.degree();
  std::vector<long double> coef;
  for (const auto& v : p.c) coef.push_back(static_cast<long double>(v.get_d()));
  auto eval = [&](std::complex<long double> z) {
    std::complex<long double> acc = 0;
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * z + *it;
    return acc;
  };
  std::vector<std::complex<long double>> z(static_cast<std::size_t>(n));
  const std::complex<long double> seed(0.4L, 0.9L);
  const long double radius = static_cast<long double>(to_double(root_bound(p)));
  for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = radius * std::pow(seed, k + 1) / std::abs(std::pow(seed, k + 1));
  for (int iter = 0; iter < 2000; ++iter) {
    long double change = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      std::complex<long double> denom = 1;
      for (std::size_t j = 0; j < z.size(); ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      if (std::abs(denom) == 0) denom = 1e-30L;
      const auto step = eval(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-17L) break;
  }
  return z;
}

struct Disks {
  bool disjoint = false;
  std::vector<Interval> moduli;
  std::vector<ComplexQ> centers;
};

Disks certify(const IntPoly& p, const std::vector<ComplexQ>& z, std::vector<ComplexQ>& corrections, unsigned bits) {
  const std::size_t n = z.size();
  Disks out;
  std::vector<Rational> radius_hi(n);
  corrections.assign(n, ComplexQ{});
  for (std::size_t i = 0; i < n; ++i) {
    ComplexQ denom{1, 0};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      denom = denom * (z[i] - z[j]);
      canonicalize(denom);
    }
    if (norm(denom) == 0) return out;
    ComplexQ w = evaluate(p, z[i]) / denom;
    canonicalize(w);
    corrections[i] = w;
    Rational r2 = norm(w) * static_cast<unsigned long>(n * n);
    r2.canonicalize();
    radius_hi[i] = sqrt_bounds(r2, bits).second;
  }
  out.disjoint = true;
  for (std::size_t i = 0; i < n && out.disjoint; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const ComplexQ d = z[i] - z[j];
      if (sqrt_bounds(norm(d), bits).first <= radius_hi[i] + radius_hi[j]) {
        out.disjoint = false;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto [mlo, mhi] = sqrt_bounds(norm(z[i]), bits);
    Rational lo = mlo - radius_hi[i];
    if (lo < 0) lo = 0;
    Rational hi = mhi + radius_hi[i];
    lo.canonicalize();
    hi.canonicalize();
    out.moduli.push_back({lo, hi});
  }
  out.centers = z;
  return out;
}

bool decisive(const Interval& m) { return m.hi < 1 || m.lo > 1; }

}  // namespace

PisotReport is_pisot(const IntPoly& poly) {
  if (poly.degree() < 1) throw Error(ErrorKind::InvalidInput, "polynomial must have degree >= 1");
  if (poly.leading() != 1) throw Error(ErrorKind::NotAlgebraicInteger, "polynomial is not monic");

  PisotReport report;
  report.minimal_polynomial = poly;
  const int n = poly.degree();
  if (n == 1) {
    Rational root(-poly.c[0]);
    if (root > 1) {
      report.dominant_root = Interval{root, root};
      report.is_pisot = true;
    } else {
      report.conjugate_moduli.push_back({abs(root), abs(root)});
    }
    return report;
  }
  if (irreducibility(poly) == Irreducibility::Reducible) {
    throw Error(ErrorKind::ReduciblePolynomial, "polynomial factors over Q");
  }

  // A real root above 1 must exist.
  std::optional<AlgebraicReal> beta = AlgebraicReal::largest_root(poly);
  const SturmSequence sturm(poly);
  const bool has_root_above_one = sturm.count(Rational(1), root_bound(poly)) > 0;
  if (has_root_above_one) {
    for (unsigned b = 4; beta->enclosure().lo <= 1; b *= 2) beta->refine(b);
    beta->refine(64);
    report.dominant_root = beta->enclosure();
  }
  // Roots of an irreducible polynomial meet the unit circle only when the
  // polynomial is (anti)reciprocal; for degree >= 3 such a polynomial always
  // has a conjugate of modulus >= 1.
  IntPoly neg = poly;
  for (auto& v : neg.c) v = -v;
  const IntPoly rev = reversal(poly);
  const bool reciprocal = rev == poly || rev == neg;
  const bool need_decisive = has_root_above_one && !(reciprocal && n >= 3);

  const auto approx = durand_kerner(poly);
  unsigned bits = 64;
  std::vector<ComplexQ> z;
  for (const auto& a : approx) z.push_back(round_dyadic(ComplexQ{Rational(static_cast<double>(a.real())), Rational(static_cast<double>(a.imag()))}, bits));

  std::vector<ComplexQ> corrections;
  Disks disks;
  for (int round = 0; round < 48; ++round) {
    disks = certify(poly, z, corrections, bits + 16);
    const bool all_decisive =
        std::all_of(disks.moduli.begin(), disks.moduli.end(), [](const Interval& m) { return decisive(m); });
    if (disks.disjoint && (all_decisive || !need_decisive)) break;
    if (round == 47) {
      if (need_decisive) throw Error(ErrorKind::PrecisionExhausted, "root enclosures did not become decisive");
      break;
    }
    // Weierstrass step, then round to a finer dyadic grid.
    bits = std::min(bits * 2, 1u << 14);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = round_dyadic(z[i] - corrections[i], bits);
  }

  // The dominant root's disk is the one whose center is nearest to beta.
  std::optional<std::size_t> dominant_disk;
  if (report.dominant_root && !disks.centers.empty()) {
    const ComplexQ target{report.dominant_root->midpoint(), 0};
    Rational best = -1;
    for (std::size_t i = 0; i < disks.centers.size(); ++i) {
      const Rational d = norm(disks.centers[i] - target);
      if (best < 0 || d < best) {
        best = d;
        dominant_disk = i;
      }
    }
  }
  std::size_t outside = 0;
  for (std::size_t i = 0; i < disks.moduli.size(); ++i) {
    if (!(disks.moduli[i].hi < 1)) ++outside;
    if (dominant_disk && i == *dominant_disk) continue;
    report.conjugate_moduli.push_back(disks.moduli[i]);
  }
  report.is_pisot = need_decisive && disks.disjoint && outside == 1 &&
                    std::all_of(report.conjugate_moduli.begin(), report.conjugate_moduli.end(),
                                [](const Interval& m) { return m.hi < 1; });
  return report;
}

// ---------------------------------------------------------------------------
// Obstruction form

std::string_view to_string(ObstructionVerdict v) {
  switch (v) {
    case ObstructionVerdict::MatchesObstructionForm: return "MatchesObstructionForm";
    case ObstructionVerdict::FailsItem1: return "FailsItem1";
    case ObstructionVerdict::FailsItem2: return "FailsItem2";
  }
  return "?";
}

TranslationForm translation_form(const Rational& t, const Integer& base) {
  if (base < 2) throw Error(ErrorKind::InvalidInput, "base must be >= 2");
  // Every prime factor of the reduced denominator must divide the base.
  Integer den = t.get_den();
  Integer g;
  while (den > 1) {
    mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), base.get_mpz_t());
    if (g == 1) return {};
    den /= g;
  }
  TranslationForm form{true, t.get_num(), 0};
  Integer power = 1;
  while (power % t.get_den() != 0) {
    power *= base;
    ++form.exponent;
  }
  form.numerator = t.get_num() * (power / t.get_den());
  return form;
}

ObstructionReport classify_obstruction(const SelfSimilarSystem& system, const Integer& base, const AffineMap& g) {
  const SelfSimilarSystem conj = conjugate(system, g);
  ObstructionReport report;
  report.base = base;
  report.conjugacy = g;
  bool item1 = true, item2 = true;
  for (const auto& f : conj.maps()) {
    MapObstruction m{log_commensurable(f.slope, base), translation_form(f.offset, base)};
    item1 = item1 && m.slope.commensurable;
    item2 = item2 && m.translation.matches;
    report.maps.push_back(std::move(m));
  }
  report.verdict = !item1   ? ObstructionVerdict::FailsItem1
                   : !item2 ? ObstructionVerdict::FailsItem2
                            : ObstructionVerdict::MatchesObstructionForm;
  return report;
}

ObstructionReport classify_obstruction(const SelfSimilarSystem& system, const Integer& base) {
  return classify_obstruction(system, base, normalize(system).conjugacy);
}

IncommensurableWitness incommensurable_slope(const SelfSimilarSystem& system, const Integer& base) {
  for (std::size_t i = 0; i < system.size(); ++i) {
    if (!log_commensurable(system.maps()[i].slope, base).commensurable) return {true, i + 1};
  }
  return {};
}

}  // namespace normlab
