#include "normlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "normlab/error.hpp"
#include "normlab/parallel.hpp"

namespace normlab {

namespace {

std::vector<double> reduced_sorted(const SequenceSample& sample) {
  std::vector<double> v;
  v.reserve(sample.values.size());
  for (double x : sample.values) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    v.push_back(r);
  }
  std::sort(v.begin(), v.end());
  return v;
}

double reduce(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

}  // namespace

double discrepancy(const SequenceSample& sample) {
  if (sample.values.empty()) throw Error(ErrorKind::InvalidInput, "empty sample");
  const auto v = reduced_sorted(sample);
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - v[i]);
    d = std::max(d, v[i] - static_cast<double>(i) / n);
  }
  return d;
}

double DigitFrequencies::max_deviation() const {
  const double expected = 1.0 / static_cast<double>(counts.size());
  double m = 0.0;
  for (std::size_t v = 0; v < counts.size(); ++v) m = std::max(m, std::fabs(frequency(v) - expected));
  return m;
}

DigitFrequencies digit_frequencies(const DigitStream& stream, std::size_t block_length) {
  if (block_length == 0) throw Error(ErrorKind::InvalidInput, "block length must be positive");
  if (block_length > stream.certified_length) {
    throw Error(ErrorKind::BlockLongerThanStream, "block length " + std::to_string(block_length) + " exceeds " +
                                                      std::to_string(stream.certified_length) + " certified digits");
  }
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < block_length; ++i) {
    size *= stream.base;
    if (size > (1u << 24)) throw Error(ErrorKind::InvalidInput, "too many blocks: base^L exceeds 2^24");
  }
  DigitFrequencies out;
  out.base = stream.base;
  out.block_length = block_length;
  out.counts.assign(size, 0);
  std::uint64_t window = 0;
  for (std::size_t i = 0; i < stream.certified_length; ++i) {
    window = (window * stream.base + stream.digits[i]) % size;
    if (i + 1 >= block_length) {
      ++out.counts[window];
      ++out.windows;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Test functions

TestFunction TestFunction::box(double half_width) {
  if (!(half_width > 0) || !std::isfinite(half_width)) throw Error(ErrorKind::InvalidInput, "half-width must be positive");
  TestFunction f;
  f.kind_ = Kind::Box;
  f.half_width_ = f.support_ = half_width;
  return f;
}

TestFunction TestFunction::triangle(double half_width) {
  TestFunction f = box(half_width);
  f.kind_ = Kind::Triangle;
  return f;
}

TestFunction TestFunction::piecewise_linear(std::vector<std::pair<double, double>> breakpoints) {
  if (breakpoints.size() < 2) throw Error(ErrorKind::InvalidInput, "need at least two breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i].first > breakpoints[i - 1].first)) {
      throw Error(ErrorKind::InvalidInput, "breakpoints must be strictly increasing");
    }
  }
  TestFunction f;
  f.kind_ = Kind::PiecewiseLinear;
  f.support_ = std::max(std::fabs(breakpoints.front().first), std::fabs(breakpoints.back().first));
  f.points_ = std::move(breakpoints);
  return f;
}

double TestFunction::operator()(double y) const {
  switch (kind_) {
    case Kind::Box: return std::fabs(y) < half_width_ ? 1.0 : 0.0;
    case Kind::Triangle: return std::max(0.0, 1.0 - std::fabs(y) / half_width_);
    case Kind::PiecewiseLinear: {
      if (y < points_.front().first || y > points_.back().first) return 0.0;
      auto it = std::upper_bound(points_.begin(), points_.end(), y,
                                 [](double a, const std::pair<double, double>& p) { return a < p.first; });
      if (it == points_.end()) return points_.back().second;
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double t = (y - lo.first) / (hi.first - lo.first);
      return lo.second + t * (hi.second - lo.second);
    }
  }
  return 0.0;
}

double TestFunction::integral() const {
  switch (kind_) {
    case Kind::Box: return 2 * half_width_;
    case Kind::Triangle: return half_width_;
    case Kind::PiecewiseLinear: {
      double s = 0.0;
      for (std::size_t i = 1; i < points_.size(); ++i) {
        s += 0.5 * (points_[i].second + points_[i - 1].second) * (points_[i].first - points_[i - 1].first);
      }
      return s;
    }
  }
  return 0.0;
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Box: os << "box(" << half_width_ << ")"; break;
    case Kind::Triangle: os << "triangle(" << half_width_ << ")"; break;
    case Kind::PiecewiseLinear:
      os << "piecewise-linear(";
      for (std::size_t i = 0; i < points_.size(); ++i) {
        os << (i ? ";" : "") << points_[i].first << ":" << points_[i].second;
      }
      os << ")";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Correlations

double pair_weight(const TestFunction& g, double a, double b, std::size_t n) {
  const double scale = static_cast<double>(n);
  double w = 0.0;
  for (int l = -1; l <= 1; ++l) w += g(scale * (a - b + l));
  return w;
}

namespace {

void check_correlation_args(const SequenceSample& sample, unsigned k, const TestFunction& f) {
  if (k < 2 || k > 4) throw Error(ErrorKind::KOutOfRange, "k = " + std::to_string(k) + ", must lie in 2..4");
  const std::size_t n = sample.values.size();
  if (n < k) throw Error(ErrorKind::InvalidInput, "sample smaller than k");
  if (!(f.support() < static_cast<double>(n) / 2)) {
    throw Error(ErrorKind::SupportTooWide, "support " + f.describe() + " must stay below N/2");
  }
}

CorrelationResult finish(const SequenceSample& sample, unsigned k, const TestFunction& f, double sum,
                         std::uint64_t tuples) {
  CorrelationResult r;
  r.k = k;
  r.n = sample.values.size();
  r.value = sum / static_cast<double>(r.n);
  r.test_function = f.describe();
  r.integral = std::pow(f.integral(), static_cast<double>(k - 1));
  r.deviation = std::fabs(r.value - r.integral);
  r.tuples = tuples;
  return r;
}

struct Neighbor {
  std::size_t index;
  double weight;
};

struct ChainSum {
  double sum = 0.0;
  std::uint64_t tuples = 0;
};

void extend_chain(const std::vector<std::vector<Neighbor>>& adj, unsigned k, std::vector<std::size_t>& chain,
                  double product, ChainSum& acc) {
  if (chain.size() == k) {
    acc.sum += product;
    ++acc.tuples;
    return;
  }
  for (const Neighbor& nb : adj[chain.back()]) {
    if (std::find(chain.begin(), chain.end(), nb.index) != chain.end()) continue;
    chain.push_back(nb.index);
    extend_chain(adj, k, chain, product * nb.weight, acc);
    chain.pop_back();
  }
}

}  // namespace

CorrelationResult k_level_correlation(const SequenceSample& sample, unsigned k, const TestFunction& f) {
  check_correlation_args(sample, k, f);
  const std::size_t n = sample.values.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = reduce(sample.values[i]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  // Candidate neighbors lie within support/N on the circle; a small slack
  // keeps borderline pairs in and pair_weight decides the actual value.
  const double radius = f.support() / static_cast<double>(n) * (1 + 1e-9) + 1e-15;
  std::vector<std::vector<Neighbor>> adj(n);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t i = order[p];
    std::size_t seen = 0;
    auto consider = [&](std::size_t q, double dist) {
      if (dist > radius) return false;
      const std::size_t j = order[q];
      const double w = pair_weight(f, x[i], x[j], n);
      if (w != 0.0) adj[i].push_back({j, w});
      ++seen;
      return true;
    };
    for (std::size_t step = 1; step < n; ++step) {
      const std::size_t q = (p + step) % n;
      const double dist = p + step < n ? x[order[q]] - x[i] : x[order[q]] + 1.0 - x[i];
      if (!consider(q, dist)) break;
    }
    const std::size_t forward = seen;
    for (std::size_t step = 1; step + forward < n; ++step) {
      const std::size_t q = (p + n - step) % n;
      const double dist = step <= p ? x[i] - x[order[q]] : x[i] + 1.0 - x[order[q]];
      if (!consider(q, dist)) break;
    }
    std::sort(adj[i].begin(), adj[i].end(), [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
  }

  const auto partial = parallel_map<ChainSum>(n, [&](std::size_t i) {
    ChainSum acc;
    std::vector<std::size_t> chain{i};
    chain.reserve(k);
    extend_chain(adj, k, chain, 1.0, acc);
    return acc;
  });
  double sum = 0.0;
  std::uint64_t tuples = 0;
  for (const auto& c : partial) {
    sum += c.sum;
    tuples += c.tuples;
  }
  return finish(sample, k, f, sum, tuples);
}

CorrelationResult k_level_correlation_naive(const SequenceSample& sample, unsigned k, const TestFunction& f) {
  check_correlation_args(sample, k, f);
  const std::size_t n = sample.values.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = reduce(sample.values[i]);
  double sum = 0.0;
  std::uint64_t tuples = 0;
  std::vector<std::size_t> u(k, 0);
  // Odometer over {0..n-1}^k.
  while (true) {
    bool distinct = true;
    for (unsigned a = 0; a < k && distinct; ++a) {
      for (unsigned b = a + 1; b < k && distinct; ++b) distinct = u[a] != u[b];
    }
    if (distinct) {
      double product = 1.0;
      for (unsigned a = 0; a + 1 < k && product != 0.0; ++a) product *= pair_weight(f, x[u[a]], x[u[a + 1]], n);
      if (product != 0.0) {
        sum += product;
        ++tuples;
      }
    }
    unsigned pos = k;
    while (pos > 0 && ++u[pos - 1] == n) u[--pos] = 0;
    if (pos == 0) break;
  }
  return finish(sample, k, f, sum, tuples);
}

// ---------------------------------------------------------------------------
// Spacings

SpacingReport level_spacings(const SequenceSample& sample, const std::vector<double>& s_grid) {
  const std::size_t n = sample.values.size();
  if (n < 2) throw Error(ErrorKind::InvalidInput, "level spacings need N >= 2");
  const auto theta = reduced_sorted(sample);
  const double scale = static_cast<double>(n);
  SpacingReport r;
  r.gaps.reserve(n);
  double previous = theta.back() - 1.0;
  for (double t : theta) {
    const double gap = t - previous;
    r.gap_sum += gap;
    r.gaps.push_back(scale * gap);
    previous = t;
  }
  std::sort(r.gaps.begin(), r.gaps.end());
  r.s_grid = s_grid;
  for (double s : s_grid) {
    const auto count = std::upper_bound(r.gaps.begin(), r.gaps.end(), s) - r.gaps.begin();
    r.cdf.push_back(static_cast<double>(count) / scale);
  }
  // G is a step function; the sup against a continuous increasing CDF is
  // attained at a jump, from the left or the right.
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && r.gaps[i + 1] == r.gaps[i]) continue;
    const double expected = -std::expm1(-r.gaps[i]);
    const auto below = std::lower_bound(r.gaps.begin(), r.gaps.end(), r.gaps[i]) - r.gaps.begin();
    r.sup_distance = std::max(r.sup_distance, std::fabs(static_cast<double>(i + 1) / scale - expected));
    r.sup_distance = std::max(r.sup_distance, std::fabs(static_cast<double>(below) / scale - expected));
  }
  return r;
}

std::vector<WeylRow> weyl_report(const SequenceSample& sample, long q_max, double threshold) {
  if (q_max < 1) throw Error(ErrorKind::InvalidInput, "q_max must be at least 1");
  std::vector<WeylRow> rows;
  for (long q = 1; q <= q_max; ++q) {
    const FourierValue v = fourier_empirical(sample, q);
    rows.push_back({q, v.modulus(), v.error, v.modulus() > threshold});
  }
  return rows;
}

}  // namespace normlab
