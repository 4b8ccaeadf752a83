#include "normlab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace normlab {

// ---------------------------------------------------------------------------
// Word streams

WordStream WordStream::bernoulli(const SelfSimilarSystem& system, std::uint64_t seed, std::uint64_t stream) {
  WordStream ws(Kind::Bernoulli);
  ws.seed_ = seed;
  ws.stream_ = stream;
  ws.denominator_ = 1;
  for (const auto& w : system.weights()) {
    mpz_lcm(ws.denominator_.get_mpz_t(), ws.denominator_.get_mpz_t(), w.get_den_mpz_t());
  }
  Integer acc = 0;
  for (const auto& w : system.weights()) {
    acc += w.get_num() * (ws.denominator_ / w.get_den());
    ws.cumulative_.push_back(acc);
  }
  return ws;
}

WordStream WordStream::periodic(Word prefix, Word period) {
  if (period.empty()) throw Error(ErrorKind::InvalidInput, "periodic word needs a nonempty period");
  WordStream ws(Kind::Periodic);
  ws.prefix_ = std::move(prefix);
  ws.period_ = std::move(period);
  return ws;
}

WordStream WordStream::finite(Word word) {
  WordStream ws(Kind::Finite);
  ws.symbols_ = std::move(word.symbols);
  return ws;
}

std::uint32_t WordStream::draw(std::size_t index) const {
  const CounterRng rng(seed_, stream_);
  Integer r;
  if (denominator_.fits_ulong_p() && sizeof(unsigned long) == 8) {
    const std::uint64_t d = denominator_.get_ui();
    const std::uint64_t threshold = (0 - d) % d;  // 2^64 mod d
    for (std::uint64_t attempt = 0;; ++attempt) {
      const std::uint64_t u = rng.at(index, attempt);
      if (u >= threshold) {
        r = static_cast<unsigned long>(u % d);
        break;
      }
    }
  } else {
    const std::size_t bits = mpz_sizeinbase(denominator_.get_mpz_t(), 2);
    for (std::uint64_t attempt = 0;; ++attempt) {
      Integer candidate = 0;
      for (std::size_t w = 0; w * 64 < bits; ++w) {
        Integer word = static_cast<unsigned long>(rng.at(index, attempt * 1024 + w));
        candidate = (candidate << 64) + word;
      }
      mpz_fdiv_r_2exp(candidate.get_mpz_t(), candidate.get_mpz_t(), bits);
      if (candidate < denominator_) {
        r = candidate;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < cumulative_.size(); ++i) {
    if (r < cumulative_[i]) return static_cast<std::uint32_t>(i + 1);
  }
  return static_cast<std::uint32_t>(cumulative_.size());
}

bool WordStream::extend_to(std::size_t m) {
  if (symbols_.size() >= m) return true;
  switch (kind_) {
    case Kind::Finite:
      return false;
    case Kind::Bernoulli:
      symbols_.reserve(m);
      for (std::size_t i = symbols_.size(); i < m; ++i) symbols_.push_back(draw(i));
      return true;
    case Kind::Periodic:
      for (std::size_t i = symbols_.size(); i < m; ++i) {
        symbols_.push_back(i < prefix_.size() ? prefix_.symbols[i]
                                              : period_.symbols[(i - prefix_.size()) % period_.size()]);
      }
      return true;
  }
  return false;
}

std::span<const std::uint32_t> WordStream::prefix(std::size_t m) {
  if (!extend_to(m)) {
    throw Error(ErrorKind::StreamExhausted,
                "word stream holds " + std::to_string(symbols_.size()) + " symbols, " + std::to_string(m) + " requested");
  }
  return std::span<const std::uint32_t>(symbols_).first(m);
}

std::optional<Rational> WordStream::exact_point(const SelfSimilarSystem& system) const {
  if (kind_ != Kind::Periodic) return std::nullopt;
  const Rational cycle_point = compose(system, period_).fixed_point();
  return compose(system, prefix_)(cycle_point);
}

std::string WordStream::describe() const {
  switch (kind_) {
    case Kind::Bernoulli:
      return "bernoulli(seed=" + std::to_string(seed_) + ",stream=" + std::to_string(stream_) + ")";
    case Kind::Periodic:
      return "periodic(prefix=" + std::to_string(prefix_.size()) + ",period=" + std::to_string(period_.size()) + ")";
    case Kind::Finite:
      return "finite(length=" + std::to_string(symbols_.size()) + ")";
  }
  return "unknown";
}

Word sample_word(const SelfSimilarSystem& system, std::size_t length, std::uint64_t seed) {
  WordStream ws = WordStream::bernoulli(system, seed);
  const auto p = ws.prefix(length);
  return Word{{p.begin(), p.end()}};
}

// ---------------------------------------------------------------------------
// Points and digits

PointApproximation point_of_word(const SelfSimilarSystem& system, const Word& word, const Rational& x0) {
  if (!system.hull().contains(x0)) {
    throw Error(ErrorKind::BasePointOutsideHull, to_string(x0) + " is outside the hull");
  }
  const AffineMap f = compose(system, word);
  Rational radius = abs(f.slope) * system.hull().width();
  radius.canonicalize();
  return {f(x0), radius, word, x0};
}

PointApproximation point_of_word(const SelfSimilarSystem& system, const Word& word) {
  Rational mid = system.hull().midpoint();
  mid.canonicalize();
  return point_of_word(system, word, mid);
}

std::size_t initial_digit_depth(const SelfSimilarSystem& system, unsigned base, std::size_t count, unsigned guard) {
  const double rate = -std::log(to_double(system.contraction_ratio()));
  const double width = std::max(1.0, to_double(system.hull().width()));
  const double m = (static_cast<double>(count + guard) * std::log(static_cast<double>(base)) + std::log(width)) / rate;
  return static_cast<std::size_t>(std::ceil(m)) + 1;
}

namespace {

std::vector<std::uint32_t> to_digits(Integer value, unsigned base, std::size_t count) {
  std::vector<std::uint32_t> out(count, 0);
  if (base <= 62) {
    const std::string text = value.get_str(static_cast<int>(base));
    const std::size_t offset = count - text.size();
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char ch = text[i];
      std::uint32_t d;
      if (ch >= '0' && ch <= '9') d = static_cast<std::uint32_t>(ch - '0');
      else if (base <= 36) d = static_cast<std::uint32_t>(ch - 'a' + 10);
      else if (ch >= 'A' && ch <= 'Z') d = static_cast<std::uint32_t>(ch - 'A' + 10);
      else d = static_cast<std::uint32_t>(ch - 'a' + 36);
      out[offset + i] = d;
    }
    return out;
  }
  for (std::size_t i = count; i-- > 0;) {
    out[i] = static_cast<std::uint32_t>(mpz_fdiv_q_ui(value.get_mpz_t(), value.get_mpz_t(), base));
  }
  return out;
}

// floor(x * b^n) mod b^n, i.e. the first n digits of x mod 1.
Integer leading_digits(const Rational& x, const Integer& scale) {
  Integer v;
  const Integer num = x.get_num() * scale;
  mpz_fdiv_q(v.get_mpz_t(), num.get_mpz_t(), x.get_den_mpz_t());
  mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), scale.get_mpz_t());
  return v;
}

}  // namespace

DigitStream digits(const SelfSimilarSystem& system, WordStream& stream, unsigned base, std::size_t count,
                   DigitOptions options) {
  if (base < 2) throw Error(ErrorKind::InvalidInput, "base must be >= 2");
  const Integer scale = pow(Integer(base), count);
  std::size_t depth = initial_digit_depth(system, base, count, options.guard);
  Rational x0 = system.hull().midpoint();
  x0.canonicalize();

  for (unsigned attempt = 0; attempt <= options.max_doublings; ++attempt, depth *= 2) {
    if (!stream.extend_to(depth)) break;
    const auto symbols = stream.prefix(depth);
    PointApproximation pt = point_of_word(system, Word{{symbols.begin(), symbols.end()}}, x0);
    const Interval e = pt.enclosure();
    Integer lo = floor(Rational(e.lo * scale));
    Integer hi = floor(Rational(e.hi * scale));
    if (lo == hi) {
      DigitStream ds;
      ds.base = base;
      mpz_fdiv_r(lo.get_mpz_t(), lo.get_mpz_t(), scale.get_mpz_t());
      ds.digits = to_digits(lo, base, count);
      ds.certified_length = count;
      ds.word_depth = depth;
      ds.source = std::move(pt);
      return ds;
    }
  }
  // Straddling persisted: only an exactly known point can settle the digits.
  if (auto x = stream.exact_point(system)) {
    DigitStream ds;
    ds.base = base;
    ds.digits = to_digits(leading_digits(*x, scale), base, count);
    ds.certified_length = count;
    ds.exact = true;
    ds.source = {*x, 0, {}, *x};
    return ds;
  }
  throw Error(ErrorKind::PrecisionExhausted, "could not certify " + std::to_string(count) + " base-" +
                                                 std::to_string(base) + " digits from " + stream.describe());
}

// ---------------------------------------------------------------------------
// Orbits

std::size_t tail_digits(unsigned base) {
  return static_cast<std::size_t>(std::ceil(53.0 * std::log(2.0) / std::log(static_cast<double>(base)) - 1e-12));
}

namespace {

constexpr double kBelowOne = 1.0 - 0x1.0p-53;

double clamp_unit(double v) { return std::clamp(v, 0.0, kBelowOne); }

}  // namespace

SequenceSample orbit_sequence(const DigitStream& stream, std::size_t count) {
  const std::size_t tail = tail_digits(stream.base);
  if (stream.certified_length < count + tail) {
    throw Error(ErrorKind::InsufficientDigits, "need " + std::to_string(count + tail) + " certified digits, have " +
                                                   std::to_string(stream.certified_length));
  }
  SequenceSample out;
  out.values.reserve(count);
  const double b = static_cast<double>(stream.base);
  for (std::size_t n = 0; n < count; ++n) {
    // 0.d_{n+1} d_{n+2} ... d_{n+tail}, Horner from the least significant digit.
    double v = 0.0;
    for (std::size_t k = n + tail; k > n; --k) v = (static_cast<double>(stream.digits[k - 1]) + v) / b;
    out.values.push_back(clamp_unit(v));
  }
  // truncation b^-tail <= 2^-53 plus at most 2^-52 accumulated rounding
  out.accuracy = 0x1.8p-52;
  out.source = "orbit(base=" + std::to_string(stream.base) + ",depth=" + std::to_string(stream.word_depth) + ")";
  return out;
}

std::string_view to_string(OrbitStatus s) {
  switch (s) {
    case OrbitStatus::Complete: return "complete";
    case OrbitStatus::BallStraddlesCut: return "ball-straddles-cut";
    case OrbitStatus::PrecisionExhausted: return "precision-exhausted";
  }
  return "?";
}

OrbitResult beta_orbit(const PointApproximation& x, const RealNumber& beta, std::size_t count, long initial_precision) {
  const double log2_beta = std::max(1e-3, beta.log2_magnitude());
  long prec = initial_precision > 0 ? initial_precision
                                    : 96 + static_cast<long>(std::ceil(static_cast<double>(count) * log2_beta));
  const Interval input = x.enclosure();
  const double log2_input_radius = x.radius == 0 ? -1e9 : std::log2(to_double(x.radius));

  OrbitResult result;
  for (int attempt = 0; attempt < 6; ++attempt, prec *= 2) {
    result = OrbitResult{};
    result.precision_bits = prec;
    result.sample.source = "beta-orbit";
    result.sample.accuracy = kCertifiedAccuracy;
    const Ball b = beta.ball(prec);
    Ball y = Ball::enclosing(input.lo, input.hi, prec);
    std::size_t n = 1;
    for (; n <= count; ++n) {
      y = b * y;
      auto k = y.common_floor();
      if (!k) {
        result.status = OrbitStatus::BallStraddlesCut;
        break;
      }
      y = y.minus(*k);
      if (y.error_bound() > kCertifiedAccuracy) {
        result.status = OrbitStatus::PrecisionExhausted;
        break;
      }
      result.sample.values.push_back(clamp_unit(y.midpoint_double()));
    }
    if (result.status == OrbitStatus::Complete) return result;
    // More working precision cannot help once the input enclosure itself,
    // expanded by beta^n, fills the failing ball.
    const double log2_input_part = log2_input_radius + static_cast<double>(n) * log2_beta;
    if (log2_input_part >= std::log2(std::max(y.radius_upper(), 1e-300)) - 1.0) return result;
  }
  return result;
}

SequenceSample power_orbit(const RealNumber& x, std::size_t count, long initial_precision) {
  const Interval coarse = x.enclosure(16);
  if (coarse.lo <= 1) throw Error(ErrorKind::InvalidInput, "power orbit needs x > 1");
  const double log2_x = std::max(1e-3, x.log2_magnitude());
  long prec = initial_precision > 0 ? initial_precision
                                    : 96 + static_cast<long>(std::ceil(static_cast<double>(count) * log2_x));
  for (int attempt = 0; attempt < 6; ++attempt, prec *= 2) {
    SequenceSample out;
    out.source = "power-orbit";
    out.accuracy = kCertifiedAccuracy;
    const Ball base = x.ball(prec);
    Ball power = base;
    bool ok = true;
    for (std::size_t n = 1; n <= count; ++n) {
      if (n > 1) power = power * base;
      auto k = power.common_floor();
      if (!k) {
        ok = false;
        break;
      }
      const Ball f = power.minus(*k);
      if (f.error_bound() > kCertifiedAccuracy) {
        ok = false;
        break;
      }
      out.values.push_back(clamp_unit(f.midpoint_double()));
    }
    if (ok) return out;
  }
  throw Error(ErrorKind::PrecisionExhausted, "power orbit could not be certified");
}

SequenceSample uniform_sample(std::size_t count, std::uint64_t seed) {
  const CounterRng rng(seed, 0x756e69666f726dULL);
  SequenceSample out;
  out.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.values.push_back(rng.uniform(i));
  out.source = "uniform";
  out.seed = seed;
  return out;
}

}  // namespace normlab
