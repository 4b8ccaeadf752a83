#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "normlab/algebra.hpp"
#include "normlab/error.hpp"
#include "normlab/fourier.hpp"
#include "normlab/martingale.hpp"
#include "normlab/parallel.hpp"
#include "normlab/polynomial.hpp"
#include "normlab/sampling.hpp"
#include "normlab/stats.hpp"
#include "normlab/system_io.hpp"
#include "report.hpp"

#ifndef NORMLAB_VERSION
#define NORMLAB_VERSION "0.0.0"
#endif

using namespace normlab;
using namespace normlab::cli;

namespace {

struct Common {
  std::string system_path;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::size_t budget = 10'000'000;
  std::string out;
  std::string format = "csv";
};

struct Context {
  CLI::App* sub = nullptr;
  Common common;
  std::optional<RawSystem> raw;
  std::optional<SelfSimilarSystem> system;

  const SelfSimilarSystem& sys() {
    if (!system) {
      if (common.system_path.empty()) throw Error(ErrorKind::ConfigParseError, "--system is required");
      raw = read_system_file(common.system_path);
      system = SelfSimilarSystem::create(*raw);
    }
    return *system;
  }
};

// ---------------------------------------------------------------------------
// Parsing helpers

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) {
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

long parse_long(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigParseError, std::string("malformed ") + what + ": '" + s + "'");
  }
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigParseError, std::string("malformed ") + what + ": '" + s + "'");
  }
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (const auto& part : split(text, ',')) {
    const long v = parse_long(part, what);
    if (v <= 0) throw Error(ErrorKind::ConfigParseError, std::string(what) + " entries must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw Error(ErrorKind::ConfigParseError, std::string("empty ") + what);
  return out;
}

IntPoly parse_poly(const std::string& text) {
  std::vector<long> c;
  for (const auto& part : split(text, ',')) c.push_back(parse_long(part, "polynomial coefficient"));
  if (c.size() < 2) throw Error(ErrorKind::ConfigParseError, "polynomial needs at least two coefficients");
  return make_int_poly(c);
}

/// "a:b:step" or a comma list.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  const auto range = split(text, ':');
  if (range.size() == 3) {
    const double a = parse_double(range[0], "s-grid"), b = parse_double(range[1], "s-grid");
    const double step = parse_double(range[2], "s-grid");
    if (!(step > 0) || b < a) throw Error(ErrorKind::ConfigParseError, "s-grid range must be a:b:step with step > 0");
    const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    if (count > 1'000'000) throw Error(ErrorKind::ConfigParseError, "s-grid too fine");
    for (std::size_t i = 0; i <= count; ++i) grid.push_back(a + step * static_cast<double>(i));
    return grid;
  }
  for (const auto& part : split(text, ',')) grid.push_back(parse_double(part, "s-grid"));
  if (grid.empty()) throw Error(ErrorKind::ConfigParseError, "empty s-grid");
  std::sort(grid.begin(), grid.end());
  return grid;
}

Format parse_format(const std::string& f) {
  if (f == "csv") return Format::Csv;
  if (f == "json") return Format::Json;
  throw Error(ErrorKind::ConfigParseError, "unknown format '" + f + "'");
}

RealNumber parse_real(const std::string& rational, const std::string& poly, const char* what) {
  if (!poly.empty()) {
    auto root = AlgebraicReal::largest_root(parse_poly(poly));
    if (!root) throw Error(ErrorKind::InvalidInput, std::string(what) + " polynomial has no real root");
    return *root;
  }
  if (rational.empty()) throw Error(ErrorKind::ConfigParseError, std::string(what) + " is required");
  return parse_rational(rational);
}

// ---------------------------------------------------------------------------
// Metadata

json parameters_of(const CLI::App* sub) {
  json params = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "out" || name == "format") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
      if (opt->get_type_size() == 0) value = "true";
    } else {
      value = opt->get_default_str();
    }
    params[name] = value;
  }
  return params;
}

Report start_report(Context& ctx, bool uses_system, bool uses_seed) {
  Report r;
  r.meta["tool"] = "normality-lab";
  r.meta["version"] = NORMLAB_VERSION;
  r.meta["command"] = ctx.sub->get_name();
  r.meta["seed"] = uses_seed ? json(ctx.common.seed) : json(nullptr);
  r.meta["system_hash"] = uses_system ? json(system_hash(ctx.sys().raw())) : json(nullptr);
  r.meta["rng"] = std::string(CounterRng::kAlgorithm);
  r.meta["parameters"] = parameters_of(ctx.sub);
  return r;
}

void add_common(CLI::App* sub, Common& c, bool system, bool seed) {
  if (system) sub->add_option("--system", c.system_path, "system definition file (JSON)");
  if (seed) sub->add_option("--seed", c.seed, "64-bit seed")->capture_default_str();
  sub->add_option("--out", c.out, "output path (default stdout)");
  sub->add_option("--format", c.format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
}

std::string str(const Rational& q) { return to_string(q); }

json interval_json(const Interval& i) { return json::array({str(i.lo), str(i.hi)}); }

// Sequence sources shared by normality, correlations and spacings.
struct SourceOptions {
  std::string kind = "orbit";
  unsigned base = 2;
  std::size_t length = 10'000;
  std::size_t samples = 1;
  unsigned guard = 16;
};

void add_source(CLI::App* sub, SourceOptions& s) {
  sub->add_option("--source", s.kind, "orbit (T_b orbit of sampled points) or uniform")
      ->capture_default_str()
      ->check(CLI::IsMember({"orbit", "uniform"}));
  sub->add_option("--base", s.base, "integer base b")->capture_default_str()->check(CLI::Range(2u, 1u << 16));
  sub->add_option("--length", s.length, "sequence length N")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--samples", s.samples, "number of sampled sequences")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--guard", s.guard, "guard digits")->capture_default_str();
}

SequenceSample make_sequence(Context& ctx, const SourceOptions& s, std::size_t index, DigitStream* keep = nullptr) {
  const std::uint64_t seed = CounterRng::derive(ctx.common.seed, index);
  if (s.kind == "uniform") return uniform_sample(s.length, seed);
  const auto& system = ctx.sys();
  WordStream ws = WordStream::bernoulli(system, seed);
  DigitStream ds = digits(system, ws, s.base, s.length + tail_digits(s.base), {s.guard, 6});
  SequenceSample out = orbit_sequence(ds, s.length);
  out.seed = seed;
  if (keep) *keep = std::move(ds);
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

Report run_validate(Context& ctx) {
  Report r;
  if (ctx.common.system_path.empty()) throw Error(ErrorKind::ConfigParseError, "--system is required");
  const RawSystem raw = read_system_file(ctx.common.system_path);
  const auto report = validate(raw);
  r.meta["tool"] = "normality-lab";
  r.meta["version"] = NORMLAB_VERSION;
  r.meta["command"] = "validate";
  r.meta["seed"] = nullptr;
  r.meta["system_hash"] = system_hash(raw);
  r.meta["rng"] = std::string(CounterRng::kAlgorithm);
  r.meta["parameters"] = parameters_of(ctx.sub);
  r.columns = {"check", "status", "detail"};
  const std::vector<std::pair<ErrorKind, const char*>> checks{{ErrorKind::DegenerateFixedPoints, "fixed points"},
                                                              {ErrorKind::WeightSumError, "weights"},
                                                              {ErrorKind::NonContractingMap, "contraction"},
                                                              {ErrorKind::HullNotInvariant, "hull"}};
  for (const auto& [kind, label] : checks) {
    std::string detail;
    for (const auto& issue : report.issues)
      if (issue.kind == kind) detail = issue.detail;
    r.add_row({label, detail.empty() ? "ok" : std::string(to_string(kind)), detail});
  }
  r.summary["valid"] = report.ok();
  json issues = json::array();
  for (const auto& issue : report.issues) issues.push_back({{"kind", to_string(issue.kind)}, {"detail", issue.detail}});
  r.summary["issues"] = issues;
  r.summary["attractor_hull"] = report.attractor_hull ? interval_json(*report.attractor_hull) : json(nullptr);
  return r;
}

struct ClassifyOptions {
  std::uint64_t base = 2;
  std::string poly;
};

Report run_classify(Context& ctx, const ClassifyOptions& o) {
  const bool with_system = !ctx.common.system_path.empty();
  if (!with_system && o.poly.empty()) throw Error(ErrorKind::ConfigParseError, "--system or --poly is required");
  Report r = start_report(ctx, with_system, false);
  if (with_system) {
    const Integer base(static_cast<unsigned long>(o.base));
    const auto report = classify_obstruction(ctx.sys(), base);
    const auto witness = incommensurable_slope(ctx.sys(), base);
    r.columns = {"map", "slope", "offset", "commensurable", "log_ratio", "translation_form", "numerator", "exponent"};
    const auto conj = conjugate(ctx.sys(), report.conjugacy);
    for (std::size_t i = 0; i < report.maps.size(); ++i) {
      const auto& m = report.maps[i];
      r.add_row({i + 1, str(conj.maps()[i].slope), str(conj.maps()[i].offset), m.slope.commensurable,
                 m.slope.ratio ? json(str(*m.slope.ratio)) : json(nullptr), m.translation.matches,
                 m.translation.matches ? json(m.translation.numerator.get_str()) : json(nullptr),
                 m.translation.matches ? json(m.translation.exponent) : json(nullptr)});
    }
    r.summary["base"] = o.base;
    r.summary["verdict"] = to_string(report.verdict);
    r.summary["conjugacy"] = {{"slope", str(report.conjugacy.slope)}, {"offset", str(report.conjugacy.offset)}};
    r.summary["incommensurable_slope"] = witness.applicable;
    r.summary["witness_map"] = witness.map_index ? json(*witness.map_index) : json(nullptr);
  }
  if (!o.poly.empty()) {
    const auto pisot = is_pisot(parse_poly(o.poly));
    json moduli = json::array();
    for (const auto& m : pisot.conjugate_moduli) moduli.push_back(interval_json(m));
    json coeffs = json::array();
    for (const auto& c : pisot.minimal_polynomial.c) coeffs.push_back(c.get_str());
    r.summary["pisot"] = {{"polynomial", coeffs},
                          {"is_pisot", pisot.is_pisot},
                          {"dominant_root", pisot.dominant_root ? interval_json(*pisot.dominant_root) : json(nullptr)},
                          {"conjugate_moduli", moduli}};
    if (!with_system) r.columns = {"is_pisot"}, r.add_row({pisot.is_pisot});
  }
  return r;
}

Report run_fourier(Context& ctx, const std::string& q_list) {
  Report r = start_report(ctx, true, false);
  r.columns = {"q", "re", "im", "modulus", "error_bound", "budget_exceeded"};
  bool any_budget = false;
  for (const auto& part : split(q_list, ',')) {
    const Rational q = parse_rational(part);
    const auto v = fourier_exact(ctx.sys(), q, FourierOptions{ctx.common.tol, ctx.common.budget});
    any_budget = any_budget || v.budget_exceeded;
    r.add_row({str(q), v.re, v.im, v.modulus(), v.error, v.budget_exceeded});
  }
  if (r.rows.empty()) throw Error(ErrorKind::ConfigParseError, "--q needs at least one frequency");
  r.summary["tol"] = ctx.common.tol;
  r.summary["budget_exceeded"] = any_budget;
  return r;
}

struct DecayOptions {
  int max_band = 20;
  std::size_t per_band = 512;
  std::string extra_bases;
  double alpha = 0.0;
  double tol = 1e-6;
};

Report run_decay(Context& ctx, const DecayOptions& o) {
  Report r = start_report(ctx, true, false);
  ProfileOptions opt;
  opt.max_band = o.max_band;
  opt.per_band_budget = o.per_band;
  opt.fourier = {o.tol, ctx.common.budget};
  for (const auto& b : split(o.extra_bases, ',')) opt.extra_bases.emplace_back(parse_long(b, "base"));
  const auto& system = ctx.sys();
  const DecayProfile profile = decay_profile(system, opt);
  r.columns = {"band", "sup", "argmax", "max_error", "grid_size", "budget_exceeded"};
  for (const auto& b : profile.bands) {
    r.add_row({b.band, b.sup, b.argmax.get_str(), b.max_error, b.grid_size, b.budget_exceeded});
  }
  json fit_json;
  std::optional<double> alpha;
  try {
    const auto fit = decay_fit(profile);
    json candidates = json::array();
    for (const auto& c : fit.candidates) {
      candidates.push_back({{"regime", to_string(c.regime)},
                            {"alpha", c.alpha},
                            {"alpha_low", c.alpha_low},
                            {"alpha_high", c.alpha_high},
                            {"residual_ss", c.residual_ss},
                            {"r_squared", c.r_squared}});
    }
    fit_json = {{"regime", to_string(fit.regime)},
                {"alpha", fit.alpha ? json(*fit.alpha) : json(nullptr)},
                {"alpha_interval", fit.alpha_interval ? json::array({fit.alpha_interval->first, fit.alpha_interval->second})
                                                      : json(nullptr)},
                {"bands_used", fit.bands_used},
                {"candidates", candidates}};
    alpha = fit.alpha;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientBands) throw;
    fit_json = {{"regime", "insufficient-bands"}, {"alpha", nullptr}, {"alpha_interval", nullptr},
                {"bands_used", 0}, {"candidates", json::array()}};
  }
  r.summary["fit"] = fit_json;
  const double check_alpha = o.alpha > 0 ? o.alpha : (alpha && *alpha > 0 ? *alpha : 1.0);
  const auto envelope = loglog_envelope_check(profile, check_alpha);
  r.summary["loglog_envelope"] = {{"alpha", check_alpha},
                                  {"verdict", to_string(envelope.verdict)},
                                  {"constant", envelope.constant},
                                  {"constant_convention", "max over the first half of bands j >= 3"}};
  json obstruction = json::object();
  for (unsigned long b = 2; b <= 10; ++b) {
    obstruction[std::to_string(b)] = to_string(classify_obstruction(system, Integer(b)).verdict);
  }
  r.summary["obstruction_by_base"] = obstruction;
  return r;
}

Report run_orbit(Context& ctx, const SourceOptions& s, bool digits_only) {
  Report r = start_report(ctx, true, true);
  const auto& system = ctx.sys();
  struct Item {
    DigitStream ds;
    SequenceSample orbit;
    std::uint64_t seed;
  };
  const auto items = parallel_map<Item>(s.samples, [&](std::size_t i) {
    Item item;
    item.seed = CounterRng::derive(ctx.common.seed, i);
    WordStream ws = WordStream::bernoulli(system, item.seed);
    const std::size_t count = digits_only ? s.length : s.length + tail_digits(s.base);
    item.ds = digits(system, ws, s.base, count, {s.guard, 6});
    if (!digits_only) item.orbit = orbit_sequence(item.ds, s.length);
    return item;
  });
  json samples = json::array();
  if (digits_only) {
    r.columns = {"sample", "index", "digit"};
  } else {
    r.columns = {"sample", "n", "value"};
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    samples.push_back({{"sample", i},
                       {"seed", it.seed},
                       {"word_depth", it.ds.word_depth},
                       {"certified_length", it.ds.certified_length},
                       {"exact", it.ds.exact}});
    if (digits_only) {
      for (std::size_t k = 0; k < it.ds.certified_length; ++k) r.add_row({i, k + 1, it.ds.digits[k]});
    } else {
      for (std::size_t n = 0; n < it.orbit.size(); ++n) r.add_row({i, n, it.orbit.values[n]});
    }
  }
  r.summary["base"] = s.base;
  double accuracy = 0.0;
  for (const auto& it : items) accuracy = std::max(accuracy, it.orbit.accuracy);
  r.summary["accuracy"] = accuracy;
  r.summary["samples"] = samples;
  return r;
}

struct BetaOptions {
  std::string beta;
  std::string beta_poly;
  std::string x;
  std::size_t depth = 256;
  std::size_t length = 100;
  long precision_bits = 0;
};

Report run_beta_orbit(Context& ctx, const BetaOptions& o) {
  const bool sampled = o.x.empty();
  Report r = start_report(ctx, sampled, sampled);
  const RealNumber beta = parse_real(o.beta, o.beta_poly, "--beta");
  PointApproximation pt;
  if (sampled) {
    pt = point_of_word(ctx.sys(), sample_word(ctx.sys(), o.depth, ctx.common.seed));
  } else {
    const Rational x = parse_rational(o.x);
    pt = {x, 0, {}, x};
  }
  const auto result = beta_orbit(pt, beta, o.length, o.precision_bits);
  r.columns = {"n", "value"};
  for (std::size_t n = 0; n < result.sample.size(); ++n) r.add_row({n + 1, result.sample.values[n]});
  r.summary["status"] = to_string(result.status);
  r.summary["emitted"] = result.sample.size();
  r.summary["precision_bits"] = result.precision_bits;
  r.summary["accuracy"] = result.sample.accuracy;
  r.summary["input_radius"] = to_double(pt.radius);
  return r;
}

struct PowerOptions {
  std::string x;
  std::string x_poly;
  std::size_t length = 100;
  long precision_bits = 0;
};

Report run_power_orbit(Context& ctx, const PowerOptions& o) {
  Report r = start_report(ctx, false, false);
  const RealNumber x = parse_real(o.x, o.x_poly, "--x");
  const auto sample = power_orbit(x, o.length, o.precision_bits);
  r.columns = {"n", "value"};
  for (std::size_t n = 0; n < sample.size(); ++n) r.add_row({n + 1, sample.values[n]});
  r.summary["accuracy"] = sample.accuracy;
  r.summary["discrepancy"] = discrepancy(sample);
  return r;
}

struct NormalityOptions {
  std::size_t block = 1;
  long q_max = 10;
  double discrepancy_threshold = 0.05;
  double weyl_threshold = 0.05;
  double frequency_tolerance = 0.02;
};

Report run_normality(Context& ctx, const SourceOptions& s, const NormalityOptions& o) {
  if (s.kind != "orbit") throw Error(ErrorKind::ConfigParseError, "normality reads digit streams: --source orbit");
  Report r = start_report(ctx, true, true);
  struct Row {
    double disc = 0, weyl = 0, freq_dev = 0;
    long weyl_argmax = 0;
  };
  const auto rows = parallel_map<Row>(s.samples, [&](std::size_t i) {
    DigitStream ds;
    const auto seq = make_sequence(ctx, s, i, &ds);
    Row row;
    row.disc = discrepancy(seq);
    for (const auto& w : weyl_report(seq, o.q_max, o.weyl_threshold)) {
      if (w.modulus > row.weyl) row.weyl = w.modulus, row.weyl_argmax = w.q;
    }
    DigitStream prefix = ds;
    prefix.certified_length = s.length;
    row.freq_dev = digit_frequencies(prefix, o.block).max_deviation();
    return row;
  });
  r.columns = {"sample", "seed", "discrepancy", "max_weyl_modulus", "weyl_argmax", "max_block_deviation", "pass"};
  std::size_t passes = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const bool pass = row.disc <= o.discrepancy_threshold && row.weyl <= o.weyl_threshold &&
                      row.freq_dev <= o.frequency_tolerance;
    passes += pass;
    r.add_row({i, CounterRng::derive(ctx.common.seed, i), row.disc, row.weyl, row.weyl_argmax, row.freq_dev, pass});
  }
  r.summary["samples"] = rows.size();
  r.summary["passed"] = passes;
  r.summary["thresholds"] = {{"discrepancy", o.discrepancy_threshold},
                             {"weyl", o.weyl_threshold},
                             {"block_frequency", o.frequency_tolerance}};
  r.summary["verdict"] = passes == rows.size() ? "consistent with normality" : "deviations observed";
  return r;
}

struct CorrelationOptions {
  unsigned k = 2;
  double box = 0.0;
  double triangle = 0.0;
};

Report run_correlations(Context& ctx, const SourceOptions& s, const CorrelationOptions& o) {
  if ((o.box > 0) == (o.triangle > 0)) throw Error(ErrorKind::ConfigParseError, "give exactly one of --box, --triangle");
  Report r = start_report(ctx, s.kind == "orbit", true);
  const TestFunction f = o.box > 0 ? TestFunction::box(o.box) : TestFunction::triangle(o.triangle);
  std::vector<CorrelationResult> results;
  for (std::size_t i = 0; i < s.samples; ++i) {
    results.push_back(k_level_correlation(make_sequence(ctx, s, i), o.k, f));
  }
  r.columns = {"sample", "seed", "k", "test_function", "N", "R_k", "integral", "deviation"};
  double mean = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& c = results[i];
    mean += c.value;
    r.add_row({i, CounterRng::derive(ctx.common.seed, i), c.k, c.test_function, c.n, c.value, c.integral, c.deviation});
  }
  mean /= static_cast<double>(results.size());
  r.summary["k"] = o.k;
  r.summary["test_function"] = f.describe();
  r.summary["test_function_family"] = "product-form box/triangle substitutes for smooth compactly supported f";
  r.summary["mean_R_k"] = mean;
  r.summary["integral"] = results.front().integral;
  r.summary["relative_deviation"] = std::fabs(mean - results.front().integral) / results.front().integral;
  r.summary["verdict"] = std::fabs(mean - results.front().integral) <= 0.1 * results.front().integral
                             ? "consistent with Poissonian"
                             : "not consistent with Poissonian";
  return r;
}

Report run_spacings(Context& ctx, const SourceOptions& s, const std::string& grid_text, double threshold) {
  Report r = start_report(ctx, s.kind == "orbit", true);
  const auto grid = parse_grid(grid_text);
  std::vector<SpacingReport> reports;
  for (std::size_t i = 0; i < s.samples; ++i) reports.push_back(level_spacings(make_sequence(ctx, s, i), grid));
  r.columns = {"sample", "s", "G", "poisson"};
  json sups = json::array();
  std::size_t passes = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      r.add_row({i, grid[j], reports[i].cdf[j], -std::expm1(-grid[j])});
    }
    sups.push_back(reports[i].sup_distance);
    passes += reports[i].sup_distance <= threshold;
  }
  r.summary["sup_distance"] = sups;
  r.summary["threshold"] = threshold;
  r.summary["passed"] = passes;
  r.summary["verdict"] = passes == reports.size() ? "consistent with Poissonian" : "not consistent with Poissonian";
  return r;
}

struct MartingaleOptions {
  unsigned base = 2;
  long q = 1;
  std::string n_list = "100,1000,10000";
  std::size_t samples = 1;
};

Report run_martingale(Context& ctx, const MartingaleOptions& o) {
  Report r = start_report(ctx, true, true);
  const auto ns = parse_size_list(o.n_list, "--N-list");
  std::vector<GapSeries> series;
  for (std::size_t i = 0; i < o.samples; ++i) {
    const std::uint64_t seed = o.samples == 1 ? ctx.common.seed : CounterRng::derive(ctx.common.seed, i);
    series.push_back(martingale_gap(ctx.sys(), seed, o.q, ns, o.base, ctx.common.tol));
  }
  r.columns = {"seed", "N", "empirical_re", "empirical_im", "cylinder_re", "cylinder_im", "gap", "error_bound"};
  for (const auto& s : series) {
    for (const auto& row : s.rows) {
      r.add_row({s.seed, row.n, row.empirical.real(), row.empirical.imag(), row.cylinder.real(), row.cylinder.imag(),
                 row.gap, row.error});
    }
  }
  json medians = json::object();
  for (std::size_t k = 0; k < ns.size(); ++k) {
    std::vector<double> gaps;
    for (const auto& s : series) gaps.push_back(s.rows[k].gap);
    std::sort(gaps.begin(), gaps.end());
    const std::size_t m = gaps.size();
    medians[std::to_string(ns[k])] = m % 2 ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]);
  }
  r.summary["p"] = o.base;
  r.summary["q"] = o.q;
  r.summary["median_gap"] = medians;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on pointwise normality of self-similar measures"};
  app.set_version_flag("--version", NORMLAB_VERSION);
  app.require_subcommand(1);

  Context ctx;
  std::function<Report()> action;
  auto bind = [&](CLI::App* sub, std::function<Report()> fn) {
    sub->callback([&ctx, &action, sub, fn] {
      ctx.sub = sub;
      action = fn;
    });
  };

  auto* validate_cmd = app.add_subcommand("validate", "check a system definition");
  add_common(validate_cmd, ctx.common, true, false);
  bind(validate_cmd, [&] { return run_validate(ctx); });

  ClassifyOptions classify_opt;
  auto* classify_cmd = app.add_subcommand("classify", "obstruction form and commensurability for a base");
  add_common(classify_cmd, ctx.common, true, false);
  classify_cmd->add_option("--base", classify_opt.base, "integer base b")->capture_default_str()->check(CLI::Range(2ul, 1ul << 40));
  classify_cmd->add_option("--poly", classify_opt.poly, "monic integer polynomial for a Pisot check, ascending c0,c1,...");
  bind(classify_cmd, [&] { return run_classify(ctx, classify_opt); });

  std::string q_list = "1";
  auto* fourier_cmd = app.add_subcommand("fourier", "F_q of the self-similar measure");
  add_common(fourier_cmd, ctx.common, true, false);
  fourier_cmd->add_option("--q", q_list, "frequency or comma list of rationals")->capture_default_str();
  fourier_cmd->add_option("--tol", ctx.common.tol, "error tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  fourier_cmd->add_option("--budget", ctx.common.budget, "node budget")->capture_default_str();
  bind(fourier_cmd, [&] { return run_fourier(ctx, q_list); });

  DecayOptions decay_opt;
  auto* decay_cmd = app.add_subcommand("decay", "dyadic band profile of |F_q| and regime fit");
  add_common(decay_cmd, ctx.common, true, false);
  decay_cmd->add_option("--max-band", decay_opt.max_band, "last band j (<= 40)")->capture_default_str()->check(CLI::Range(0, 40));
  decay_cmd->add_option("--per-band", decay_opt.per_band, "integers sampled per band")->capture_default_str();
  decay_cmd->add_option("--extra-bases", decay_opt.extra_bases, "extra bases whose powers join the grid");
  decay_cmd->add_option("--alpha", decay_opt.alpha, "exponent for the log-log envelope check (default: fitted)");
  decay_cmd->add_option("--tol", decay_opt.tol, "error tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  decay_cmd->add_option("--budget", ctx.common.budget, "node budget per frequency")->capture_default_str();
  bind(decay_cmd, [&] { return run_decay(ctx, decay_opt); });

  SourceOptions orbit_opt;
  orbit_opt.length = 1000;
  auto* orbit_cmd = app.add_subcommand("orbit", "T_b orbits of sampled points");
  add_common(orbit_cmd, ctx.common, true, true);
  add_source(orbit_cmd, orbit_opt);
  orbit_cmd->get_option("--source")->check(CLI::IsMember({"orbit"}));
  bind(orbit_cmd, [&] { return run_orbit(ctx, orbit_opt, false); });

  SourceOptions digits_opt;
  digits_opt.length = 1000;
  auto* digits_cmd = app.add_subcommand("digits", "certified base-b digits of sampled points");
  add_common(digits_cmd, ctx.common, true, true);
  add_source(digits_cmd, digits_opt);
  digits_cmd->get_option("--source")->check(CLI::IsMember({"orbit"}));
  bind(digits_cmd, [&] { return run_orbit(ctx, digits_opt, true); });

  BetaOptions beta_opt;
  auto* beta_cmd = app.add_subcommand("beta-orbit", "T_beta orbit in ball arithmetic");
  add_common(beta_cmd, ctx.common, true, true);
  beta_cmd->add_option("--beta", beta_opt.beta, "rational beta > 1");
  beta_cmd->add_option("--beta-poly", beta_opt.beta_poly, "beta as the largest root of c0,c1,...");
  beta_cmd->add_option("--x", beta_opt.x, "exact starting point (default: sampled from --system)");
  beta_cmd->add_option("--depth", beta_opt.depth, "word depth for the sampled point")->capture_default_str();
  beta_cmd->add_option("--length", beta_opt.length, "orbit length N")->capture_default_str();
  beta_cmd->add_option("--precision-bits", beta_opt.precision_bits, "initial working precision (0: automatic)")->capture_default_str();
  bind(beta_cmd, [&] { return run_beta_orbit(ctx, beta_opt); });

  PowerOptions power_opt;
  auto* power_cmd = app.add_subcommand("power-orbit", "x^n mod 1");
  add_common(power_cmd, ctx.common, false, false);
  power_cmd->add_option("--x", power_opt.x, "rational x > 1");
  power_cmd->add_option("--x-poly", power_opt.x_poly, "x as the largest root of c0,c1,...");
  power_cmd->add_option("--length", power_opt.length, "number of terms N")->capture_default_str();
  power_cmd->add_option("--precision-bits", power_opt.precision_bits, "initial working precision (0: automatic)")->capture_default_str();
  bind(power_cmd, [&] { return run_power_orbit(ctx, power_opt); });

  SourceOptions normality_src;
  NormalityOptions normality_opt;
  auto* normality_cmd = app.add_subcommand("normality", "discrepancy, block frequencies and Weyl sums");
  add_common(normality_cmd, ctx.common, true, true);
  add_source(normality_cmd, normality_src);
  normality_cmd->add_option("--block", normality_opt.block, "block length L")->capture_default_str();
  normality_cmd->add_option("--q", normality_opt.q_max, "largest Weyl frequency")->capture_default_str()->check(CLI::PositiveNumber);
  normality_cmd->add_option("--threshold", normality_opt.weyl_threshold, "Weyl modulus threshold")->capture_default_str();
  normality_cmd->add_option("--discrepancy-threshold", normality_opt.discrepancy_threshold)->capture_default_str();
  normality_cmd->add_option("--frequency-tolerance", normality_opt.frequency_tolerance)->capture_default_str();
  bind(normality_cmd, [&] { return run_normality(ctx, normality_src, normality_opt); });

  SourceOptions corr_src;
  CorrelationOptions corr_opt;
  auto* corr_cmd = app.add_subcommand("correlations", "k-level correlations R_k");
  add_common(corr_cmd, ctx.common, true, true);
  add_source(corr_cmd, corr_src);
  corr_cmd->add_option("--k", corr_opt.k, "correlation order (2..4)")->capture_default_str();
  corr_cmd->add_option("--box", corr_opt.box, "box test function of half-width W");
  corr_cmd->add_option("--triangle", corr_opt.triangle, "triangle test function of half-width W");
  bind(corr_cmd, [&] { return run_correlations(ctx, corr_src, corr_opt); });

  SourceOptions spacing_src;
  std::string s_grid = "0:4:0.25";
  double spacing_threshold = 0.03;
  auto* spacing_cmd = app.add_subcommand("spacings", "level spacing distribution G(s)");
  add_common(spacing_cmd, ctx.common, true, true);
  add_source(spacing_cmd, spacing_src);
  spacing_cmd->add_option("--s-grid", s_grid, "a:b:step or comma list")->capture_default_str();
  spacing_cmd->add_option("--threshold", spacing_threshold, "sup distance threshold")->capture_default_str();
  bind(spacing_cmd, [&] { return run_spacings(ctx, spacing_src, s_grid, spacing_threshold); });

  MartingaleOptions mart_opt;
  auto* mart_cmd = app.add_subcommand("martingale", "empirical vs cylinder Fourier modes along one word");
  add_common(mart_cmd, ctx.common, true, true);
  mart_cmd->add_option("--base", mart_opt.base, "integer p")->capture_default_str()->check(CLI::Range(2u, 1u << 16));
  mart_cmd->add_option("--q", mart_opt.q, "integer frequency")->capture_default_str();
  mart_cmd->add_option("--N-list", mart_opt.n_list, "increasing comma list of N")->capture_default_str();
  mart_cmd->add_option("--samples", mart_opt.samples, "number of seeds")->capture_default_str()->check(CLI::PositiveNumber);
  mart_cmd->add_option("--tol", ctx.common.tol, "Fourier tolerance")->capture_default_str();
  bind(mart_cmd, [&] { return run_martingale(ctx, mart_opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  try {
    const Format format = parse_format(ctx.common.format);
    const Report report = action();
    emit(report, format, ctx.common.out);
    if (ctx.sub->get_name() == "validate" && !report.summary["valid"].get<bool>()) return 2;
    return 0;
  } catch (const Error& e) {
    std::cerr << "normality-lab: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "normality-lab: " << e.what() << "\n";
    return 4;
  }
}
