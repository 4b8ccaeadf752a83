#include "normlab/fourier.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace normlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = 0x1.0p-52;

std::complex<double> unit_phase(const Rational& turns) {
  // Reduce exactly before converting so large frequencies keep full accuracy.
  const double theta = to_double(frac(turns));
  return {std::cos(kTwoPi * theta), std::sin(kTwoPi * theta)};
}

class FourierRecursion {
 public:
  FourierRecursion(const SelfSimilarSystem& system, const FourierOptions& options)
      : system_(system), options_(options) {
    width_ = to_double(system.hull().width());
    center_ = system.hull().midpoint();
    center_.canonicalize();
    for (const auto& w : system.weights()) weights_.push_back(to_double(w));
    node_round_ = static_cast<double>(system.size() + 8) * kEps;
  }

  struct Node {
    std::complex<double> value;
    double error;
  };

  Node eval(const Rational& q) {
    if (q == 0) return {{1.0, 0.0}, 0.0};
    if (auto it = memo_.find(q); it != memo_.end()) return it->second;

    const double q_abs = std::fabs(to_double(q));
    const double truncation = std::numbers::pi * q_abs * width_;
    Node node;
    if (truncation <= options_.tol / 2 || nodes_ >= options_.node_budget) {
      if (truncation > options_.tol / 2) budget_exceeded_ = true;
      Rational phase = q * center_;
      node = {unit_phase(phase), std::min(truncation, 2.0) + 4 * kEps};
    } else {
      ++nodes_;
      std::complex<double> acc = 0.0;
      double err = node_round_;
      for (std::size_t i = 0; i < system_.size(); ++i) {
        const AffineMap& f = system_.maps()[i];
        Rational child_q = q * f.slope;
        child_q.canonicalize();
        const Node child = eval(child_q);
        acc += weights_[i] * unit_phase(Rational(q * f.offset)) * child.value;
        err += weights_[i] * child.error;
      }
      node = {acc, err};
    }
    memo_.emplace(q, node);
    return node;
  }

  bool budget_exceeded() const { return budget_exceeded_; }
  std::size_t nodes() const { return nodes_; }

 private:
  const SelfSimilarSystem& system_;
  FourierOptions options_;
  double width_ = 0.0;
  Rational center_;
  std::vector<double> weights_;
  double node_round_ = 0.0;
  std::map<Rational, Node> memo_;
  std::size_t nodes_ = 0;
  bool budget_exceeded_ = false;
};

}  // namespace

FourierValue fourier_exact(const SelfSimilarSystem& system, const Rational& q, FourierOptions options) {
  if (!(options.tol > 0)) throw Error(ErrorKind::InvalidInput, "tolerance must be positive");
  FourierRecursion rec(system, options);
  const auto node = rec.eval(q);
  FourierValue out;
  out.re = node.value.real();
  out.im = node.value.imag();
  out.error = node.error;
  out.frequency = q;
  out.budget_exceeded = rec.budget_exceeded();
  out.nodes = rec.nodes();
  return out;
}

FourierValue fourier_empirical(const SequenceSample& sample, long q) {
  if (sample.values.empty()) throw Error(ErrorKind::InvalidInput, "empty sample");
  long double re = 0.0L, im = 0.0L;
  const double qd = static_cast<double>(q);
  for (double x : sample.values) {
    const double turns = std::fmod(qd * x, 1.0);
    re += std::cos(kTwoPi * turns);
    im += std::sin(kTwoPi * turns);
  }
  const auto n = static_cast<long double>(sample.values.size());
  FourierValue out;
  out.re = static_cast<double>(re / n);
  out.im = static_cast<double>(im / n);
  out.frequency = Rational(q);
  const double q_abs = std::fabs(qd);
  // Lipschitz bound 2π|q| per unit of position error, plus phase rounding.
  out.error = kTwoPi * q_abs * (sample.accuracy + q_abs * 0x1.0p-53) + 16 * kEps;
  return out;
}

// ---------------------------------------------------------------------------
// Profiles

std::vector<Integer> band_grid(const SelfSimilarSystem& system, int band, const ProfileOptions& options) {
  const Integer lo = pow(Integer(2), static_cast<unsigned long>(band));
  const Integer hi = lo * 2;
  std::vector<Integer> grid;
  for (Integer q = lo; q < hi && q < lo + static_cast<unsigned long>(options.per_band_budget); ++q) grid.push_back(q);

  std::vector<Integer> bases = options.extra_bases;
  for (const auto& f : system.maps()) bases.push_back(f.slope.get_den());
  for (const auto& b : bases) {
    if (b < 2) continue;
    for (Integer power = b; power < hi; power *= b) {
      if (power >= lo) grid.push_back(power);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

ProfileBand band_sup(const SelfSimilarSystem& system, std::span<const Integer> grid, const FourierOptions& options) {
  ProfileBand band;
  band.grid_size = grid.size();
  band.sup = -1.0;
  for (const auto& q : grid) {
    const FourierValue v = fourier_exact(system, Rational(q), options);
    band.budget_exceeded = band.budget_exceeded || v.budget_exceeded;
    band.max_error = std::max(band.max_error, v.error);
    if (v.modulus() > band.sup) {
      band.sup = v.modulus();
      band.argmax = q;
    }
  }
  band.sup = std::max(band.sup, 0.0);
  return band;
}

DecayProfile decay_profile(const SelfSimilarSystem& system, const ProfileOptions& options) {
  if (options.max_band < 0 || options.max_band > 40) {
    throw Error(ErrorKind::InvalidInput, "max band must lie in [0, 40]");
  }
  DecayProfile profile;
  profile.tol = options.fourier.tol;
  for (int j = 0; j <= options.max_band; ++j) {
    const auto grid = band_grid(system, j, options);
    ProfileBand band = band_sup(system, grid, options.fourier);
    band.band = j;
    profile.bands.push_back(std::move(band));
  }
  return profile;
}

// ---------------------------------------------------------------------------
// Regime fitting

std::string_view to_string(DecayRegime r) {
  switch (r) {
    case DecayRegime::Polynomial: return "polynomial";
    case DecayRegime::Logarithmic: return "logarithmic";
    case DecayRegime::LogLog: return "loglog";
    case DecayRegime::None: return "none";
  }
  return "?";
}

std::string_view to_string(Consistency c) {
  switch (c) {
    case Consistency::Consistent: return "consistent";
    case Consistency::Inconsistent: return "inconsistent";
    case Consistency::Indeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

double regressor(DecayRegime regime, int j) {
  const double lq = j * std::numbers::ln2;  // log 2^j
  switch (regime) {
    case DecayRegime::Polynomial: return lq;
    case DecayRegime::Logarithmic: return std::log(lq);
    case DecayRegime::LogLog: return std::log(std::log(lq));
    case DecayRegime::None: break;
  }
  return 0.0;
}

bool usable(const ProfileBand& b, int min_band) { return b.band >= min_band && b.sup > 0.0 && !b.budget_exceeded; }

RegimeCandidate fit_one(DecayRegime regime, const std::vector<int>& js, const std::vector<double>& ys,
                        std::vector<double>& residuals) {
  const std::size_t m = js.size();
  std::vector<double> xs;
  for (int j : js) xs.push_back(regressor(regime, j));
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  RegimeCandidate c;
  c.regime = regime;
  c.alpha = -slope;
  c.constant = my - slope * mx;
  residuals.assign(m, 0.0);
  double rss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    residuals[i] = ys[i] - (c.constant + slope * xs[i]);
    rss += residuals[i] * residuals[i];
  }
  c.residual_ss = rss;
  c.r_squared = syy > 0 ? 1.0 - rss / syy : 0.0;
  const double se = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
  const boost::math::students_t dist(static_cast<double>(m - 2));
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  c.alpha_low = c.alpha - t * se;
  c.alpha_high = c.alpha + t * se;
  return c;
}

}  // namespace

DecayFit decay_fit(const DecayProfile& profile) {
  std::vector<int> js;
  std::vector<double> sups;
  for (const auto& b : profile.bands) {
    if (usable(b, 2)) {
      js.push_back(b.band);
      sups.push_back(b.sup);
    }
  }
  if (js.size() < 8) {
    throw Error(ErrorKind::InsufficientBands, std::to_string(js.size()) + " usable bands, need 8");
  }
  std::vector<double> ys;
  for (double s : sups) ys.push_back(std::log(s));

  DecayFit fit;
  fit.bands_used = js.size();
  const bool constant = std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); });
  bool non_decreasing = true;
  for (std::size_t i = 1; i < sups.size(); ++i) non_decreasing = non_decreasing && sups[i] >= sups[i - 1];
  if (constant) return fit;

  std::vector<double> best_residuals;
  std::optional<RegimeCandidate> best;
  for (DecayRegime r : {DecayRegime::Polynomial, DecayRegime::Logarithmic, DecayRegime::LogLog}) {
    std::vector<double> residuals;
    RegimeCandidate c = fit_one(r, js, ys, residuals);
    if (!best || c.residual_ss < best->residual_ss) {
      best = c;
      best_residuals = residuals;
    }
    fit.candidates.push_back(c);
  }
  fit.residuals = best_residuals;
  if (non_decreasing || best->r_squared < 0.5 || best->alpha <= 0) return fit;
  fit.regime = best->regime;
  fit.alpha = best->alpha;
  fit.alpha_interval = std::make_pair(best->alpha_low, best->alpha_high);
  return fit;
}

EnvelopeCheck loglog_envelope_check(const DecayProfile& profile, double alpha) {
  if (!(alpha > 0)) throw Error(ErrorKind::InvalidInput, "alpha must be positive");
  std::vector<const ProfileBand*> bands;
  for (const auto& b : profile.bands) {
    if (usable(b, 3)) bands.push_back(&b);
  }
  EnvelopeCheck check;
  if (bands.size() < 4) return check;
  auto envelope_factor = [&](const ProfileBand& b) {
    return std::pow(std::log(b.band * std::numbers::ln2), 1.0 + alpha);
  };
  const std::size_t half = bands.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    check.constant = std::max(check.constant, bands[i]->sup * envelope_factor(*bands[i]));
  }
  check.verdict = Consistency::Consistent;
  for (const auto* b : bands) {
    if (b->sup > check.constant / envelope_factor(*b) * (1.0 + 1e-12)) check.verdict = Consistency::Inconsistent;
  }
  return check;
}

}  // namespace normlab
