#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "normlab/fourier.hpp"
#include "normlab/ifs.hpp"
#include "normlab/sampling.hpp"

namespace normlab {

struct StoppingRecord {
  std::size_t n = 0;
  /// β_n = min{m : |f'_{ω|m}| < p^-n}.
  std::size_t beta = 0;
  /// Signed derivative of f_{ω|β_n}.
  Rational slope_product;
  /// f_{ω|β_n}(0).
  Rational offset;
  /// p^n · slope_product.
  Rational r;
};

/// Stopping record for a single n. Throws StreamExhausted.
StoppingRecord stopping_time(const SelfSimilarSystem& system, WordStream& stream, std::size_t n, unsigned p);

/// Records for n = 0..count-1, sharing the running composition.
std::vector<StoppingRecord> stopping_times(const SelfSimilarSystem& system, WordStream& stream, std::size_t count,
                                           unsigned p);

/// r(ω, n); C0 = min_i |s_i| <= |r| < 1 holds by minimality of β_n.
inline const Rational& r_factor(const StoppingRecord& record) { return record.r; }

/// F_q of (T_p^n ∘ f_{ω|β_n}) ν, i.e. e^{2πi q p^n f_{ω|β_n}(0)} F_{q r}(ν).
FourierValue cylinder_mode(const SelfSimilarSystem& system, const StoppingRecord& record, long q, unsigned p,
                           double tol);

struct GapRow {
  std::size_t n = 0;
  std::complex<double> empirical;
  std::complex<double> cylinder;
  double gap = 0.0;
  /// Bound on the numerical error of gap.
  double error = 0.0;
};

struct GapSeries {
  long q = 0;
  unsigned p = 2;
  std::uint64_t seed = 0;
  std::vector<GapRow> rows;
};

/// For one seeded ω, compares (1/N) Σ_{n<N} e^{2πi q T_p^n x_ω} with
/// (1/N) Σ_{n<N} cylinder_mode(record_n) for each N in the list. Both sides
/// read the same symbol stream.
GapSeries martingale_gap(const SelfSimilarSystem& system, std::uint64_t seed, long q,
                         const std::vector<std::size_t>& n_list, unsigned p, double tol);

}  // namespace normlab
