#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "normlab/ball.hpp"
#include "normlab/ifs.hpp"
#include "normlab/rng.hpp"

namespace normlab {

/// Lazily extended symbol sequence ω. Three kinds: i.i.d. symbols drawn
/// from the system weights (seeded), an eventually periodic word with an
/// exactly known limit point, and a finite word that refuses extension.
class WordStream {
 public:
  static WordStream bernoulli(const SelfSimilarSystem& system, std::uint64_t seed, std::uint64_t stream = 0);
  static WordStream periodic(Word prefix, Word period);
  static WordStream finite(Word word);

  /// Ensures m symbols are available; false when the stream refuses.
  bool extend_to(std::size_t m);
  /// First m symbols. Throws StreamExhausted when they cannot be produced.
  std::span<const std::uint32_t> prefix(std::size_t m);
  std::uint32_t at(std::size_t index) { return prefix(index + 1)[index]; }
  std::size_t available() const { return symbols_.size(); }

  /// x_ω exactly, for eventually periodic streams.
  std::optional<Rational> exact_point(const SelfSimilarSystem& system) const;

  std::uint64_t seed() const { return seed_; }
  std::string describe() const;

 private:
  enum class Kind { Bernoulli, Periodic, Finite };
  WordStream(Kind kind) : kind_(kind) {}
  std::uint32_t draw(std::size_t index) const;

  Kind kind_;
  std::vector<std::uint32_t> symbols_;
  // Bernoulli
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::vector<Integer> cumulative_;  // partial sums of weight numerators over a common denominator
  Integer denominator_;
  // Periodic
  Word prefix_, period_;
};

/// ω|_m with i.i.d. symbols of law p, reproducible from (seed, m).
Word sample_word(const SelfSimilarSystem& system, std::size_t length, std::uint64_t seed);

/// Exact center plus radius: x_ω ∈ [center - radius, center + radius].
struct PointApproximation {
  Rational center;
  Rational radius;
  Word word;
  Rational base_point;

  Interval enclosure() const { return {center - radius, center + radius}; }
};

/// center = f_word(x0), radius = |slope(f_word)| * width(hull).
/// Throws BasePointOutsideHull.
PointApproximation point_of_word(const SelfSimilarSystem& system, const Word& word, const Rational& x0);
PointApproximation point_of_word(const SelfSimilarSystem& system, const Word& word);  // x0 = hull midpoint

struct DigitStream {
  unsigned base = 2;
  /// Base-b digits of x_ω mod 1, most significant first.
  std::vector<std::uint32_t> digits;
  std::size_t certified_length = 0;
  /// Depth of the word prefix the digits were certified from.
  std::size_t word_depth = 0;
  /// True when the digits came from the exact limit point.
  bool exact = false;
  PointApproximation source;
};

struct DigitOptions {
  unsigned guard = 16;
  /// Number of depth doublings tried before falling back to the exact point.
  unsigned max_doublings = 6;
};

/// Certified base-b digits of x_ω mod 1. Expansions of b-adic rationals
/// terminate (trailing zeros). Throws PrecisionExhausted.
DigitStream digits(const SelfSimilarSystem& system, WordStream& stream, unsigned base, std::size_t count,
                   DigitOptions options = {});

/// Minimum word depth the digit routine starts from.
std::size_t initial_digit_depth(const SelfSimilarSystem& system, unsigned base, std::size_t count, unsigned guard);

/// Finite mod-1 sequence with provenance.
struct SequenceSample {
  std::vector<double> values;
  /// Uniform bound on |value - true value| for every entry.
  double accuracy = 0.0;
  std::string source;
  std::uint64_t seed = 0;
  std::string rng{CounterRng::kAlgorithm};

  std::size_t size() const { return values.size(); }
};

/// Tail digits per orbit value: the smallest L with b^-L <= 2^-53.
std::size_t tail_digits(unsigned base);

/// T_b^n(x) for n = 0..N-1, read from the digit stream. Throws InsufficientDigits.
SequenceSample orbit_sequence(const DigitStream& stream, std::size_t count);

enum class OrbitStatus { Complete, BallStraddlesCut, PrecisionExhausted };

std::string_view to_string(OrbitStatus s);

struct OrbitResult {
  SequenceSample sample;
  OrbitStatus status = OrbitStatus::Complete;
  /// Working precision of the final attempt.
  long precision_bits = 0;
};

/// T_β^n(x) for n = 1..N in ball arithmetic, each value certified to 2^-50.
/// Stops early with a status when a ball straddles an integer or the input
/// enclosure is too wide to certify the next value.
OrbitResult beta_orbit(const PointApproximation& x, const RealNumber& beta, std::size_t count,
                       long initial_precision = 0);

/// x^n mod 1 for n = 1..N, each value certified to 2^-50. Throws PrecisionExhausted.
SequenceSample power_orbit(const RealNumber& x, std::size_t count, long initial_precision = 0);

/// i.i.d. uniform [0,1) sample; the statistical baseline.
SequenceSample uniform_sample(std::size_t count, std::uint64_t seed);

constexpr double kCertifiedAccuracy = 0x1.0p-50;

}  // namespace normlab
