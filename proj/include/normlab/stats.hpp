#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "normlab/fourier.hpp"
#include "normlab/sampling.hpp"

namespace normlab {

/// Star discrepancy sup_{0<=a<=1} |#{x_n < a}/N - a| of the values mod 1,
/// computed exactly from the sorted sample.
double discrepancy(const SequenceSample& sample);

struct DigitFrequencies {
  unsigned base = 2;
  std::size_t block_length = 1;
  /// counts[v] for the block whose base-b reading is v.
  std::vector<std::uint64_t> counts;
  std::uint64_t windows = 0;

  double frequency(std::size_t block) const {
    return windows ? static_cast<double>(counts[block]) / static_cast<double>(windows) : 0.0;
  }
  /// max_v |frequency(v) - b^-L|
  double max_deviation() const;
};

/// Sliding-window block counts over the certified prefix.
/// Throws BlockLongerThanStream, and InvalidInput when b^L exceeds 2^24.
DigitFrequencies digit_frequencies(const DigitStream& stream, std::size_t block_length);

/// Product-form test function f(y_1..y_{k-1}) = Π g(y_i).
class TestFunction {
 public:
  /// g = indicator of (-w, w).
  static TestFunction box(double half_width);
  /// g(y) = max(0, 1 - |y|/w).
  static TestFunction triangle(double half_width);
  /// Linear interpolation through (x_i, y_i), zero outside [x_0, x_last].
  static TestFunction piecewise_linear(std::vector<std::pair<double, double>> breakpoints);

  double operator()(double y) const;
  /// g vanishes outside [-support, support].
  double support() const { return support_; }
  /// ∫ g over the line.
  double integral() const;
  std::string describe() const;

 private:
  enum class Kind { Box, Triangle, PiecewiseLinear };
  Kind kind_ = Kind::Box;
  double half_width_ = 0.0;
  double support_ = 0.0;
  std::vector<std::pair<double, double>> points_;
};

struct CorrelationResult {
  unsigned k = 2;
  double value = 0.0;
  std::string test_function;
  std::size_t n = 0;
  double integral = 0.0;
  double deviation = 0.0;
  /// Number of ordered tuples that contributed a nonzero term.
  std::uint64_t tuples = 0;
};

/// Σ_l g(N(a - b + l)) for values a, b in [0, 1); the only integers l that
/// can contribute are -1, 0, 1 while the support stays below N/2.
double pair_weight(const TestFunction& g, double a, double b, std::size_t n);

/// R_k(f, x, N) by windowed enumeration over the sorted sample: consecutive
/// tuple entries must lie within support/N of each other on the circle.
/// Throws KOutOfRange (k outside 2..4) and SupportTooWide (support >= N/2).
CorrelationResult k_level_correlation(const SequenceSample& sample, unsigned k, const TestFunction& f);

/// Direct O(N^k) sum over all ordered tuples of distinct indices, with the
/// same pair weights. Reference implementation for small N.
CorrelationResult k_level_correlation_naive(const SequenceSample& sample, unsigned k, const TestFunction& f);

struct SpacingReport {
  /// N (θ_n - θ_{n-1}) for n = 1..N with θ_0 = θ_N - 1, sorted ascending.
  std::vector<double> gaps;
  std::vector<double> s_grid;
  /// G(s) for each grid point.
  std::vector<double> cdf;
  /// sup_s |G(s) - (1 - e^-s)| over all s, not just the grid.
  double sup_distance = 0.0;
  /// Σ of the unscaled gaps (1 up to rounding).
  double gap_sum = 0.0;
};

/// Throws InvalidInput when N < 2.
SpacingReport level_spacings(const SequenceSample& sample, const std::vector<double>& s_grid);

struct WeylRow {
  long q = 0;
  double modulus = 0.0;
  double error = 0.0;
  bool flagged = false;
};

/// |F_q| of the empirical measure for q = 1..q_max, flagged above threshold.
std::vector<WeylRow> weyl_report(const SequenceSample& sample, long q_max, double threshold);

}  // namespace normlab
