#include "normlab/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "normlab/error.hpp"
#include "normlab/parallel.hpp"

namespace normlab {

namespace {

void check_base(unsigned p) {
  if (p < 2) throw Error(ErrorKind::InvalidInput, "p must be an integer >= 2");
}

// Walks ω one symbol at a time, keeping f_{ω|m} exactly.
class RunningComposition {
 public:
  RunningComposition(const SelfSimilarSystem& system, WordStream& stream) : system_(system), stream_(stream) {}

  void advance() {
    if (!stream_.extend_to(depth_ + 1)) {
      throw Error(ErrorKind::StreamExhausted,
                  "stream " + stream_.describe() + " ended after " + std::to_string(depth_) + " symbols");
    }
    const AffineMap& f = system_.map(stream_.at(depth_));
    map_ = compose(map_, f);
    ++depth_;
  }

  std::size_t depth() const { return depth_; }
  const AffineMap& map() const { return map_; }

 private:
  const SelfSimilarSystem& system_;
  WordStream& stream_;
  AffineMap map_ = AffineMap::identity();
  std::size_t depth_ = 0;
};

// |f'| >= p^-n, i.e. |num| p^n >= den, without forming the product rational.
bool above_threshold(const RunningComposition& walk, const Integer& p_to_n) {
  if (walk.depth() == 0) return true;
  const Rational& slope = walk.map().slope;
  return Integer(abs(slope.get_num()) * p_to_n) >= slope.get_den();
}

StoppingRecord record_for(std::size_t n, const RunningComposition& walk, const Integer& p_to_n) {
  StoppingRecord rec;
  rec.n = n;
  rec.beta = walk.depth();
  rec.slope_product = walk.map().slope;
  rec.offset = walk.map().offset;
  rec.r = rec.slope_product * Rational(p_to_n);
  rec.r.canonicalize();
  return rec;
}

}  // namespace

std::vector<StoppingRecord> stopping_times(const SelfSimilarSystem& system, WordStream& stream, std::size_t count,
                                           unsigned p) {
  check_base(p);
  RunningComposition walk(system, stream);
  std::vector<StoppingRecord> out;
  out.reserve(count);
  Integer p_to_n = 1;
  for (std::size_t n = 0; n < count; ++n, p_to_n *= p) {
    while (above_threshold(walk, p_to_n)) walk.advance();
    out.push_back(record_for(n, walk, p_to_n));
  }
  return out;
}

StoppingRecord stopping_time(const SelfSimilarSystem& system, WordStream& stream, std::size_t n, unsigned p) {
  check_base(p);
  RunningComposition walk(system, stream);
  const Integer p_to_n = pow(Integer(p), n);
  while (above_threshold(walk, p_to_n)) walk.advance();
  return record_for(n, walk, p_to_n);
}

FourierValue cylinder_mode(const SelfSimilarSystem& system, const StoppingRecord& record, long q, unsigned p,
                           double tol) {
  check_base(p);
  FourierValue out;
  out.frequency = Rational(q);
  if (q == 0) {
    out.re = 1.0;
    return out;
  }
  // q r has a huge exact denominator for long words; round it to a dyadic
  // with 80 fractional bits. |F_a - F_b| <= 2π |a - b| max|x| over the hull.
  constexpr unsigned kFrequencyBits = 80;
  Integer scaled = Integer(q) * record.r.get_num();
  scaled <<= kFrequencyBits;
  mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), record.r.get_den_mpz_t());
  Rational frequency(scaled, Integer(1) << kFrequencyBits);
  frequency.canonicalize();
  const Interval& hull = system.hull();
  const double reach = std::max(std::fabs(to_double(hull.lo)), std::fabs(to_double(hull.hi)));
  const double rounding = 2.0 * std::numbers::pi * reach * 0x1.0p-80;
  const FourierValue inner = fourier_exact(system, frequency, FourierOptions{tol, 10'000'000});

  // fractional part of q p^n c, reduced exactly, then read with 64 bits
  Integer num = Integer(q) * pow(Integer(p), record.n) * record.offset.get_num();
  mpz_fdiv_r(num.get_mpz_t(), num.get_mpz_t(), record.offset.get_den_mpz_t());
  num <<= 64;
  mpz_fdiv_q(num.get_mpz_t(), num.get_mpz_t(), record.offset.get_den_mpz_t());
  const double turns = std::ldexp(num.get_d(), -64);
  const double theta = 2.0 * std::numbers::pi * turns;
  const std::complex<double> phase(std::cos(theta), std::sin(theta));
  const std::complex<double> v = phase * inner.value();
  out.re = v.real();
  out.im = v.imag();
  out.error = inner.error + rounding + 8 * 0x1.0p-52;
  out.budget_exceeded = inner.budget_exceeded;
  out.nodes = inner.nodes;
  return out;
}

GapSeries martingale_gap(const SelfSimilarSystem& system, std::uint64_t seed, long q,
                         const std::vector<std::size_t>& n_list, unsigned p, double tol) {
  check_base(p);
  if (n_list.empty()) throw Error(ErrorKind::InvalidInput, "empty N list");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0 || (i > 0 && n_list[i] <= n_list[i - 1])) {
      throw Error(ErrorKind::InvalidInput, "N list must be positive and strictly increasing");
    }
  }
  const std::size_t n_max = n_list.back();

  GapSeries series;
  series.q = q;
  series.p = p;
  series.seed = seed;

  WordStream stream = WordStream::bernoulli(system, seed);
  const DigitStream ds = digits(system, stream, p, n_max + tail_digits(p));
  const SequenceSample orbit = orbit_sequence(ds, n_max);
  const auto records = stopping_times(system, stream, n_max, p);

  const auto modes = parallel_map<FourierValue>(
      n_max, [&](std::size_t n) { return cylinder_mode(system, records[n], q, p, tol); });

  const double qd = static_cast<double>(q);
  const double empirical_error = 2.0 * std::numbers::pi * std::fabs(qd) * orbit.accuracy + 16 * 0x1.0p-52;
  std::complex<long double> emp_sum = 0.0L, cyl_sum = 0.0L;
  double cyl_error = 0.0;
  std::size_t next = 0;
  for (std::size_t n = 0; n < n_max; ++n) {
    const double theta = 2.0 * std::numbers::pi * std::fmod(qd * orbit.values[n], 1.0);
    emp_sum += std::complex<long double>(std::cos(theta), std::sin(theta));
    cyl_sum += std::complex<long double>(modes[n].re, modes[n].im);
    cyl_error = std::max(cyl_error, modes[n].error);
    if (n + 1 == n_list[next]) {
      const long double count = static_cast<long double>(n + 1);
      GapRow row;
      row.n = n + 1;
      row.empirical = {static_cast<double>(emp_sum.real() / count), static_cast<double>(emp_sum.imag() / count)};
      row.cylinder = {static_cast<double>(cyl_sum.real() / count), static_cast<double>(cyl_sum.imag() / count)};
      row.gap = q == 0 ? 0.0 : std::abs(row.empirical - row.cylinder);
      row.error = q == 0 ? 0.0 : empirical_error + cyl_error;
      series.rows.push_back(row);
      ++next;
    }
  }
  return series;
}

}  // namespace normlab
