#include "normlab/polynomial.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

namespace normlab {

IntPoly make_int_poly(std::vector<long> ascending) {
  IntPoly p;
  for (long v : ascending) p.c.emplace_back(v);
  p.trim();
  return p;
}

RatPoly to_rat(const IntPoly& p) {
  RatPoly r;
  for (const auto& v : p.c) r.c.emplace_back(v);
  return r;
}

Rational evaluate(const IntPoly& p, const Rational& x) {
  if (p.c.empty()) return 0;
  // Horner on numerator/denominator separately to avoid per-step gcds.
  const Integer& num = x.get_num();
  const Integer& den = x.get_den();
  Integer acc = 0;
  Integer den_pow = 1;
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) {
    acc = acc * num + *it * den_pow;
    den_pow *= den;
  }
  // acc / den^deg
  Rational r(acc, den_pow / den);
  r.canonicalize();
  return r;
}

Rational evaluate(const RatPoly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

int sign_at(const IntPoly& p, const Rational& x) { return sgn(evaluate(p, x)); }

IntPoly derivative(const IntPoly& p) {
  IntPoly d;
  for (std::size_t i = 1; i < p.c.size(); ++i) d.c.push_back(p.c[i] * static_cast<unsigned long>(i));
  d.trim();
  return d;
}

RatPoly derivative(const RatPoly& p) {
  RatPoly d;
  for (std::size_t i = 1; i < p.c.size(); ++i) d.c.push_back(p.c[i] * static_cast<unsigned long>(i));
  d.trim();
  return d;
}

IntPoly reversal(const IntPoly& p) {
  IntPoly r;
  r.c.assign(p.c.rbegin(), p.c.rend());
  r.trim();
  return r;
}

std::pair<RatPoly, RatPoly> divmod(const RatPoly& num, const RatPoly& den) {
  RatPoly q, r = num;
  if (den.is_zero()) throw Error(ErrorKind::InvalidInput, "polynomial division by zero");
  const int dd = den.degree();
  if (r.degree() < dd) return {q, r};
  q.c.assign(static_cast<std::size_t>(r.degree() - dd + 1), Rational(0));
  while (!r.is_zero() && r.degree() >= dd) {
    const int shift = r.degree() - dd;
    Rational factor = r.leading() / den.leading();
    factor.canonicalize();
    q.c[static_cast<std::size_t>(shift)] = factor;
    for (int i = 0; i <= dd; ++i) {
      auto& slot = r.c[static_cast<std::size_t>(i + shift)];
      slot -= factor * den.c[static_cast<std::size_t>(i)];
      slot.canonicalize();
    }
    r.trim();
  }
  q.trim();
  return {q, r};
}

RatPoly gcd(RatPoly a, RatPoly b) {
  while (!b.is_zero()) {
    auto [q, r] = divmod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero()) {
    const Rational lead = a.leading();
    for (auto& v : a.c) {
      v /= lead;
      v.canonicalize();
    }
  }
  return a;
}

std::optional<IntPoly> exact_divide(const IntPoly& num, const IntPoly& monic_den) {
  IntPoly r = num;
  const int dd = monic_den.degree();
  if (dd < 0 || monic_den.leading() != 1) return std::nullopt;
  if (r.degree() < dd) return r.is_zero() ? std::optional<IntPoly>(IntPoly{}) : std::nullopt;
  IntPoly q;
  q.c.assign(static_cast<std::size_t>(r.degree() - dd + 1), Integer(0));
  while (!r.is_zero() && r.degree() >= dd) {
    const int shift = r.degree() - dd;
    const Integer factor = r.leading();
    q.c[static_cast<std::size_t>(shift)] = factor;
    for (int i = 0; i <= dd; ++i) {
      r.c[static_cast<std::size_t>(i + shift)] -= factor * monic_den.c[static_cast<std::size_t>(i)];
    }
    r.trim();
  }
  if (!r.is_zero()) return std::nullopt;
  q.trim();
  return q;
}

Rational root_bound(const IntPoly& p) {
  Rational m = 0;
  for (int i = 0; i < p.degree(); ++i) {
    Rational ratio = abs(Rational(p.c[static_cast<std::size_t>(i)])) / abs(Rational(p.leading()));
    m = std::max(m, ratio);
  }
  return m + 1;
}

SturmSequence::SturmSequence(const IntPoly& p) {
  chain_.push_back(to_rat(p));
  RatPoly d = derivative(chain_.back());
  if (d.is_zero()) return;
  chain_.push_back(d);
  while (true) {
    auto [q, r] = divmod(chain_[chain_.size() - 2], chain_.back());
    if (r.is_zero()) break;
    for (auto& v : r.c) v = -v;
    chain_.push_back(std::move(r));
  }
}

int SturmSequence::variations(const Rational& x) const {
  int changes = 0;
  int last = 0;
  for (const auto& poly : chain_) {
    const int s = sgn(evaluate(poly, x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int SturmSequence::count(const Rational& a, const Rational& b) const { return variations(a) - variations(b); }

namespace {

void isolate(const SturmSequence& sturm, const Rational& a, const Rational& b, int n, std::vector<Interval>& out) {
  if (n == 0) return;
  if (n == 1) {
    out.push_back({a, b});
    return;
  }
  Rational mid = (a + b) / 2;
  mid.canonicalize();
  const int left = sturm.count(a, mid);
  isolate(sturm, a, mid, left, out);
  isolate(sturm, mid, b, n - left, out);
}

}  // namespace

std::vector<Interval> isolate_real_roots(const IntPoly& p) {
  std::vector<Interval> out;
  if (p.degree() < 1) return out;
  const SturmSequence sturm(p);
  const Rational bound = root_bound(p);
  isolate(sturm, -bound, bound, sturm.count(-bound, bound), out);
  return out;
}

AlgebraicReal::AlgebraicReal(IntPoly poly, Interval enclosure)
    : poly_(std::move(poly)), enclosure_(std::move(enclosure)) {}

void AlgebraicReal::refine(unsigned bits) {
  const Rational target(Integer(1), pow(Integer(2), bits));
  if (enclosure_.width() <= target) return;
  if (sign_at(poly_, enclosure_.hi) == 0) {
    enclosure_.lo = enclosure_.hi;
    return;
  }
  const SturmSequence sturm(poly_);
  // Invariant: exactly one root in (lo, hi].
  while (enclosure_.width() > target) {
    Rational mid = enclosure_.midpoint();
    mid.canonicalize();
    if (sign_at(poly_, mid) == 0) {
      enclosure_ = {mid, mid};
      return;
    }
    if (sturm.count(enclosure_.lo, mid) == 1) {
      enclosure_.hi = mid;
    } else {
      enclosure_.lo = mid;
    }
  }
}

std::optional<AlgebraicReal> AlgebraicReal::largest_root(const IntPoly& p) {
  auto roots = isolate_real_roots(p);
  if (roots.empty()) return std::nullopt;
  return AlgebraicReal(p, roots.back());
}

// ---------------------------------------------------------------------------
// Irreducibility

namespace {

using ModPoly = std::vector<std::uint64_t>;

void trim(ModPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
  std::uint64_t result = 1, e = p - 2;
  a %= p;
  while (e) {
    if (e & 1) result = result * a % p;
    a = a * a % p;
    e >>= 1;
  }
  return result;
}

ModPoly reduce_mod(const IntPoly& f, std::uint64_t p) {
  ModPoly r;
  for (const auto& v : f.c) {
    Integer m;
    mpz_fdiv_r_ui(m.get_mpz_t(), v.get_mpz_t(), p);
    r.push_back(m.get_ui());
  }
  trim(r);
  return r;
}

ModPoly mod_rem(ModPoly a, const ModPoly& b, std::uint64_t p) {
  const std::uint64_t inv = inv_mod(b.back(), p);
  while (a.size() >= b.size() && !a.empty()) {
    const std::uint64_t factor = a.back() * inv % p;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) {
      a[i + shift] = (a[i + shift] + p - factor * b[i] % p) % p;
    }
    trim(a);
  }
  return a;
}

ModPoly mod_div(ModPoly a, const ModPoly& b, std::uint64_t p) {
  ModPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  const std::uint64_t inv = inv_mod(b.back(), p);
  while (a.size() >= b.size() && !a.empty()) {
    const std::uint64_t factor = a.back() * inv % p;
    const std::size_t shift = a.size() - b.size();
    q[shift] = factor;
    for (std::size_t i = 0; i < b.size(); ++i) {
      a[i + shift] = (a[i + shift] + p - factor * b[i] % p) % p;
    }
    trim(a);
  }
  trim(q);
  return q;
}

ModPoly mod_mul(const ModPoly& a, const ModPoly& b, const ModPoly& m, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  ModPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  }
  trim(r);
  return mod_rem(std::move(r), m, p);
}

ModPoly mod_gcd(ModPoly a, ModPoly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    ModPoly r = mod_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

ModPoly mod_pow_x(std::uint64_t e, const ModPoly& m, std::uint64_t p) {
  ModPoly result{1}, base{0, 1};
  base = mod_rem(base, m, p);
  while (e) {
    if (e & 1) result = mod_mul(result, base, m, p);
    base = mod_mul(base, base, m, p);
    e >>= 1;
  }
  return result;
}

ModPoly mod_pow(const ModPoly& b, std::uint64_t e, const ModPoly& m, std::uint64_t p) {
  ModPoly result{1}, base = mod_rem(b, m, p);
  while (e) {
    if (e & 1) result = mod_mul(result, base, m, p);
    base = mod_mul(base, base, m, p);
    e >>= 1;
  }
  return result;
}

// Degrees of the irreducible factors of a squarefree monic f mod p
// (distinct-degree factorization).
std::vector<int> factor_degrees_mod(ModPoly f, std::uint64_t p) {
  std::vector<int> degrees;
  ModPoly h = mod_pow_x(p, f, p);  // x^p mod f
  for (int i = 1; 2 * i <= static_cast<int>(f.size()) - 1; ++i) {
    ModPoly hx = h;
    if (hx.size() < 2) hx.resize(2, 0);
    hx[1] = (hx[1] + p - 1) % p;
    trim(hx);
    ModPoly g = mod_gcd(hx, f, p);
    const int dg = static_cast<int>(g.size()) - 1;
    if (dg > 0) {
      for (int k = 0; k < dg / i; ++k) degrees.push_back(i);
      f = mod_div(f, g, p);
      h = mod_rem(h, f, p);
    }
    h = mod_pow(h, p, f, p);
  }
  if (f.size() > 1) degrees.push_back(static_cast<int>(f.size()) - 1);
  return degrees;
}

std::set<int> subset_sums(const std::vector<int>& parts) {
  std::set<int> sums{0};
  for (int d : parts) {
    std::set<int> next = sums;
    for (int s : sums) next.insert(s + d);
    sums = std::move(next);
  }
  return sums;
}

bool is_prime_small(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<Integer> divisors(const Integer& value) {
  // Positive divisors of |value| by trial division; value is small here.
  Integer n = value < 0 ? Integer(-value) : value;
  std::vector<std::pair<Integer, int>> factors;
  for (Integer d = 2; d * d <= n; ++d) {
    int e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    if (e) factors.push_back({d, e});
  }
  if (n > 1) factors.push_back({n, 1});
  std::vector<Integer> divs{1};
  for (const auto& [prime, e] : factors) {
    const std::size_t base = divs.size();
    Integer pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= prime;
      for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
    }
  }
  return divs;
}

// Monic interpolant through (x_j, y_j) when it has integer coefficients and
// exact degree d.
std::optional<IntPoly> interpolate_monic(const std::vector<Integer>& xs, const std::vector<Integer>& ys, int d) {
  const std::size_t n = xs.size();
  std::vector<Rational> coef(ys.begin(), ys.end());
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      coef[i] = (coef[i] - coef[i - 1]) / Rational(xs[i] - xs[i - level]);
      coef[i].canonicalize();
    }
  }
  // Newton form to monomial form.
  RatPoly poly;
  poly.c = {coef[n - 1]};
  for (std::size_t k = n - 1; k-- > 0;) {
    RatPoly next;
    next.c.assign(poly.c.size() + 1, Rational(0));
    for (std::size_t i = 0; i < poly.c.size(); ++i) {
      next.c[i + 1] += poly.c[i];
      next.c[i] -= poly.c[i] * xs[k];
    }
    next.c[0] += coef[k];
    poly = std::move(next);
  }
  poly.trim();
  if (poly.degree() != d || poly.leading() != 1) return std::nullopt;
  IntPoly out;
  for (auto& v : poly.c) {
    v.canonicalize();
    if (v.get_den() != 1) return std::nullopt;
    out.c.push_back(v.get_num());
  }
  return out;
}

constexpr std::uint64_t kKroneckerCap = 5'000'000;

// True if a monic factor of degree d exists.
bool kronecker_has_factor(const IntPoly& f, int d, std::uint64_t& budget) {
  struct Sample {
    Integer x;
    std::vector<Integer> candidates;
  };
  std::vector<Sample> pool;
  for (long k = 0; pool.size() < static_cast<std::size_t>(4 * (d + 1)) && k < 200; ++k) {
    for (long x : {k, -k - 1}) {
      const Rational v = evaluate(f, Rational(x));
      const Integer vi = v.get_num();
      if (vi == 0) return true;  // integer root
      if (mpz_sizeinbase(vi.get_mpz_t(), 2) > 44) continue;
      Sample s{Integer(x), {}};
      for (const auto& dv : divisors(vi)) {
        s.candidates.push_back(dv);
        s.candidates.push_back(-dv);
      }
      pool.push_back(std::move(s));
    }
  }
  if (pool.size() < static_cast<std::size_t>(d + 1)) {
    throw Error(ErrorKind::IrreducibilityUndecided, "no small evaluation points for Kronecker search");
  }
  std::sort(pool.begin(), pool.end(),
            [](const Sample& a, const Sample& b) { return a.candidates.size() < b.candidates.size(); });
  pool.resize(static_cast<std::size_t>(d + 1));

  std::vector<Integer> xs, ys(pool.size());
  for (const auto& s : pool) xs.push_back(s.x);
  std::vector<std::size_t> idx(pool.size(), 0);
  while (true) {
    if (budget-- == 0) {
      throw Error(ErrorKind::IrreducibilityUndecided, "Kronecker search exceeded its work cap");
    }
    for (std::size_t j = 0; j < pool.size(); ++j) ys[j] = pool[j].candidates[idx[j]];
    if (auto g = interpolate_monic(xs, ys, d); g && exact_divide(f, *g)) return true;
    std::size_t j = 0;
    while (j < pool.size() && ++idx[j] == pool[j].candidates.size()) {
      idx[j] = 0;
      ++j;
    }
    if (j == pool.size()) return false;
  }
}

}  // namespace

Irreducibility irreducibility(const IntPoly& p) {
  const int n = p.degree();
  if (n <= 1) return Irreducibility::Irreducible;
  if (p.c[0] == 0) return Irreducibility::Reducible;
  const RatPoly rp = to_rat(p);
  if (gcd(rp, derivative(rp)).degree() > 0) return Irreducibility::Reducible;

  // Factor degrees that survive every prime's pattern.
  std::set<int> possible;
  for (int d = 1; d < n; ++d) possible.insert(d);
  int primes_used = 0;
  for (std::uint64_t prime = 3; prime < 2000 && primes_used < 24 && !possible.empty(); prime += 2) {
    if (!is_prime_small(prime)) continue;
    ModPoly fp = reduce_mod(p, prime);
    if (static_cast<int>(fp.size()) - 1 != n) continue;
    ModPoly dfp;
    for (std::size_t i = 1; i < fp.size(); ++i) dfp.push_back(fp[i] * i % prime);
    trim(dfp);
    if (mod_gcd(fp, dfp, prime).size() != 1) continue;
    ++primes_used;
    const auto sums = subset_sums(factor_degrees_mod(fp, prime));
    std::set<int> kept;
    for (int d : possible) {
      if (sums.count(d)) kept.insert(d);
    }
    possible = std::move(kept);
  }
  if (possible.empty()) return Irreducibility::Irreducible;

  std::uint64_t budget = kKroneckerCap;
  for (int d : possible) {
    if (2 * d > n) break;
    if (kronecker_has_factor(p, d, budget)) return Irreducibility::Reducible;
  }
  return Irreducibility::Irreducible;
}

}  // namespace normlab
