#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "normlab/ifs.hpp"
#include "normlab/sampling.hpp"

namespace normlab {

/// F_q(μ) = ∫ e^{2πi x q} dμ(x) with a rigorous bound on the total error
/// (truncation plus floating-point rounding).
struct FourierValue {
  double re = 0.0;
  double im = 0.0;
  double error = 0.0;
  Rational frequency;
  bool budget_exceeded = false;
  std::size_t nodes = 0;

  std::complex<double> value() const { return {re, im}; }
  double modulus() const { return std::abs(value()); }
};

struct FourierOptions {
  double tol = 1e-9;
  std::size_t node_budget = 10'000'000;
};

/// F_q(ν) from ν = Σ p_i f_i ν, i.e. F_q = Σ_i p_i e^{2πi q t_i} F_{q s_i}.
///
/// The recursion runs on exact rational frequencies and is memoized on them.
/// A branch at frequency q' stops once π |q'| width(hull) <= tol/2 and returns
/// e^{2πi q' c} for the hull center c: a probability measure on an interval
/// of half-width r around c satisfies |F_q - e^{2πiqc}| <= 2π|q| r. When the
/// node budget runs out the remaining branches stop early and the reported
/// error grows accordingly (budget_exceeded is set).
FourierValue fourier_exact(const SelfSimilarSystem& system, const Rational& q, FourierOptions options = {});

/// (1/N) Σ e^{2πi q x_n}. The error bound covers the per-value accuracy of
/// the sample and the rounding of the phases.
FourierValue fourier_empirical(const SequenceSample& sample, long q);

struct ProfileBand {
  int band = 0;  // frequencies in [2^band, 2^{band+1})
  double sup = 0.0;
  Integer argmax;
  double max_error = 0.0;
  std::size_t grid_size = 0;
  bool budget_exceeded = false;
};

struct DecayProfile {
  std::vector<ProfileBand> bands;
  double tol = 0.0;
};

struct ProfileOptions {
  int max_band = 20;
  /// Consecutive integers evaluated from the start of each band.
  std::size_t per_band_budget = 512;
  /// Extra bases whose powers are added to the grid (slope denominators are
  /// always included).
  std::vector<Integer> extra_bases;
  FourierOptions fourier{1e-6, 10'000'000};
};

/// Grid for one band: integers in [2^j, min(2^j + budget, 2^{j+1})) plus the
/// powers of every slope denominator and extra base that fall in the band.
std::vector<Integer> band_grid(const SelfSimilarSystem& system, int band, const ProfileOptions& options);

/// sup |F_q| over an explicit grid.
ProfileBand band_sup(const SelfSimilarSystem& system, std::span<const Integer> grid, const FourierOptions& options);

/// Bands 0..max_band (max_band <= 40).
DecayProfile decay_profile(const SelfSimilarSystem& system, const ProfileOptions& options);

enum class DecayRegime { Polynomial, Logarithmic, LogLog, None };

std::string_view to_string(DecayRegime r);

struct RegimeCandidate {
  DecayRegime regime = DecayRegime::None;
  double alpha = 0.0;
  double alpha_low = 0.0;
  double alpha_high = 0.0;
  double constant = 0.0;
  double residual_ss = 0.0;
  double r_squared = 0.0;
};

struct DecayFit {
  DecayRegime regime = DecayRegime::None;
  std::optional<double> alpha;
  std::optional<std::pair<double, double>> alpha_interval;  // 95%
  std::vector<double> residuals;                            // of the chosen fit
  std::vector<RegimeCandidate> candidates;
  std::size_t bands_used = 0;
};

/// Least squares of log(sup_j) against -α x_j + c for
///   polynomial:  x_j = j log 2             (|q|^-α)
///   logarithmic: x_j = log(j log 2)        ((log |q|)^-α)
///   log-log:     x_j = log(log(j log 2))   ((log log |q|)^-α)
/// over bands j >= 2 with a positive sup. Picks the smallest residual; the
/// regime is None when sups never decrease or R^2 < 0.5. Throws
/// InsufficientBands with fewer than 8 usable bands.
DecayFit decay_fit(const DecayProfile& profile);

enum class Consistency { Consistent, Inconsistent, Indeterminate };

std::string_view to_string(Consistency c);

struct EnvelopeCheck {
  Consistency verdict = Consistency::Indeterminate;
  /// Envelope constant C fitted on the first half of the usable bands.
  double constant = 0.0;
};

/// Empirical check of sup_j <= C / (log log 2^j)^{1+α} over bands j >= 3.
/// C is the smallest constant covering the first half of the bands; the
/// check is then whether the remaining bands stay under the envelope.
/// Indeterminate with fewer than 4 usable bands. Diagnostic only.
EnvelopeCheck loglog_envelope_check(const DecayProfile& profile, double alpha);

}  // namespace normlab
