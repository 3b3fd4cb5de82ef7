#include "rwrs/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "rwrs/errors.hpp"
#include "rwrs/format.hpp"
#include "rwrs/limits.hpp"
#include "rwrs/parallel.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/stats.hpp"

namespace rwrs {

namespace {

constexpr std::uint64_t kCoxReferenceStream = 0xc0c5;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::size_t resolve_workers(std::size_t workers) { return workers == 0 ? default_workers() : workers; }

void require_replicas(const ExperimentConfig& config) {
  if (config.replicas < 100) throw DomainError("verdict-bearing runs need at least 100 replicas");
  if (config.queries.empty()) throw DomainError("no query sets given");
}

std::string query_name(const ExperimentConfig& config, const char* check, std::size_t i) {
  return config.label + "." + check + ".I" + std::to_string(i + 1);
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::undefined: return "undefined";
  }
  return "undefined";
}

TestReport& judge(TestReport& r) {
  if (std::isnan(r.estimate) || std::isnan(r.reference)) {
    r.verdict = Verdict::undefined;
    return r;
  }
  bool ok = false;
  const double diff = r.estimate - r.reference;
  switch (r.comparison) {
    case Comparison::within_sigma: ok = std::abs(diff) <= r.tolerance * r.se; break;
    case Comparison::within_relative: ok = std::abs(diff) <= r.tolerance * std::abs(r.reference); break;
    case Comparison::at_least: ok = diff >= -r.tolerance * r.se; break;
    case Comparison::at_most: ok = diff <= r.tolerance * r.se; break;
    case Comparison::below: ok = diff < 0.0; break;
    case Comparison::above: ok = diff > 0.0; break;
  }
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  return r;
}

void write_reports_csv(std::ostream& os, std::span<const TestReport> reports, Timing timing) {
  os << "name,estimate,se,reference,verdict,runtime_ms,seed\n";
  for (const auto& r : reports) {
    os << r.name << ',' << format_double(r.estimate) << ',' << format_double(r.se) << ','
       << format_double(r.reference) << ',' << to_string(r.verdict) << ',';
    if (timing == Timing::include) os << format_double(std::round(r.runtime_ms * 1000.0) / 1000.0);
    os << ',' << r.seed << '\n';
  }
}

void write_summary(std::ostream& os, std::span<const TestReport> reports) {
  std::size_t pass = 0, fail = 0, undefined = 0;
  for (const auto& r : reports) {
    os << (r.verdict == Verdict::pass ? "PASS " : r.verdict == Verdict::fail ? "FAIL " : "UNDEF") << ' ' << r.name
       << ": " << format_double(r.estimate) << " vs " << format_double(r.reference) << " (se "
       << format_double(r.se) << ')';
    if (!r.note.empty()) os << "  " << r.note;
    os << '\n';
    (r.verdict == Verdict::pass ? pass : r.verdict == Verdict::fail ? fail : undefined)++;
  }
  os << pass << " passed, " << fail << " failed, " << undefined << " undefined\n";
}

bool all_pass(std::span<const TestReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.verdict == Verdict::pass; });
}

RegimeRule calibrate(const StepDistribution& walk, std::int64_t n, std::size_t replicas, std::uint64_t seed,
                     std::size_t workers, std::optional<Regime> expected) {
  if (expected && *expected != walk.regime())
    throw RegimeError("calibrate: walk regime is " + to_string(walk.regime()) + ", expected " +
                      to_string(*expected));
  if (walk.family() == StepFamily::drift) return RegimeRule::transient(1.0, 0.0);
  if (walk.regime() == Regime::recurrent) return RegimeRule::recurrent(walk.alpha());
  if (n < 1000) throw DomainError("calibrate: horizon must be at least 1000");
  if (replicas < 2) throw DomainError("calibrate: need at least 2 replicas");
  if (walk.regime() == Regime::transient) {
    const auto q = estimate_q(walk, n, replicas, seed, workers);
    return RegimeRule::transient(q.slope.value, q.slope.se);
  }
  const auto h = estimate_h(walk, n, replicas, seed, workers);
  return RegimeRule::boundary(h.value, h.se);
}

PointPattern simulate_replica(const ExperimentConfig& config, const RegimeRule& rule, std::size_t replica) {
  const std::uint64_t seed = replica_seed(config.master_seed, replica);
  const auto walk = discover(config.walk, config.n, stream_seed(seed, kWalkStream));
  return build_pattern(walk, config.scenery, rule, stream_seed(seed, kSceneryStream));
}

std::vector<PointPattern> simulate_patterns(const ExperimentConfig& config, const RegimeRule& rule) {
  m_of_n(rule, config.n);  // fail fast on a degenerate scale
  return parallel_map<PointPattern>(config.replicas, resolve_workers(config.workers),
                                    [&](std::size_t r) { return simulate_replica(config, rule, r); });
}

CountTable simulate_counts(const ExperimentConfig& config, const RegimeRule& rule) {
  m_of_n(rule, config.n);
  return parallel_map<std::vector<std::int64_t>>(
      config.replicas, resolve_workers(config.workers), [&](std::size_t r) {
        const auto pattern = simulate_replica(config, rule, r);
        std::vector<std::int64_t> counts;
        counts.reserve(config.queries.size());
        for (const auto& q : config.queries) counts.push_back(count_in(pattern, q));
        return counts;
      });
}

bool disjoint(const QuerySet& x, const QuerySet& y) {
  if (x.b <= y.a || y.b <= x.a) return true;
  for (const auto& p : x.heights.parts)
    for (const auto& q : y.heights.parts)
      if (std::max(p.lo, q.lo) < std::min(p.hi, q.hi)) return false;
  return true;
}

std::string describe(const QuerySet& query) {
  std::string s = "(" + format_double(query.a) + ";" + format_double(query.b) + "]x";
  for (std::size_t i = 0; i < query.heights.parts.size(); ++i) {
    if (i > 0) s += "u";
    s += "(" + format_double(query.heights.parts[i].lo) + ";" + format_double(query.heights.parts[i].hi) + "]";
  }
  return s;
}

std::vector<TestReport> poisson_checks(const CountTable& counts, const ExperimentConfig& config,
                                       double relative_error) {
  require_replicas(config);
  if (counts.size() != config.replicas) throw DomainError("poisson_checks: one count row per replica is required");
  const auto& tail = config.scenery.tail();
  const auto m = static_cast<double>(counts.size());
  const std::size_t k = config.queries.size();
  std::string shared = "void and mean share replicas";
  if (k > 1) shared += "; " + std::to_string(k) + " query sets: bonferroni level " + format_double(k * 0.0027);

  std::vector<TestReport> out;
  std::vector<std::vector<double>> columns(k, std::vector<double>(counts.size()));
  for (std::size_t i = 0; i < k; ++i) {
    const auto& q = config.queries[i];
    std::vector<std::int64_t> col(counts.size());
    std::size_t zeros = 0;
    for (std::size_t r = 0; r < counts.size(); ++r) {
      if (counts[r].size() != k) throw DomainError("poisson_checks: one count per query set is required");
      col[r] = counts[r][i];
      columns[i][r] = static_cast<double>(col[r]);
      zeros += col[r] == 0;
    }
    const double lambda = poisson_mean(q, tail);
    const double void_ref = poisson_void(q, tail);

    TestReport v;
    v.name = query_name(config, "void", i);
    const auto ve = frequency_estimate(zeros, counts.size());
    v.estimate = ve.value;
    v.reference = void_ref;
    const double v_cal = void_ref * lambda * relative_error;
    v.se = std::sqrt(ve.se * ve.se + v_cal * v_cal);
    v.tolerance = config.sigma;
    v.seed = config.master_seed;
    v.note = describe(q) + "; " + shared;
    out.push_back(judge(v));

    TestReport mean;
    mean.name = query_name(config, "mean", i);
    const auto me = mean_estimate(columns[i]);
    mean.estimate = me.value;
    mean.reference = lambda;
    const double m_cal = lambda * relative_error;
    mean.se = std::sqrt(me.se * me.se + m_cal * m_cal);
    mean.tolerance = config.sigma;
    mean.seed = config.master_seed;
    mean.note = describe(q) + "; " + shared;
    out.push_back(judge(mean));

    const std::int64_t max_obs = *std::max_element(col.begin(), col.end());
    const auto top = std::max<std::int64_t>(max_obs, static_cast<std::int64_t>(std::ceil(lambda + 10.0 * std::sqrt(lambda) + 10.0)));
    std::vector<double> pmf(static_cast<std::size_t>(top) + 1);
    for (std::int64_t j = 0; j <= top; ++j) pmf[static_cast<std::size_t>(j)] = poisson_pmf(lambda, j);
    const auto gof = chi_square_gof(col, pmf);
    TestReport g;
    g.name = query_name(config, "gof", i);
    g.estimate = gof.p_value;
    g.reference = 0.01;
    g.comparison = Comparison::above;
    g.seed = config.master_seed;
    g.note = "chi2 " + format_double(gof.statistic) + " df " + format_double(gof.df) + " (p-value vs level)";
    out.push_back(judge(g));
  }

  if (config.independence) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) {
        if (!disjoint(config.queries[i], config.queries[j])) continue;
        TestReport c;
        c.name = config.label + ".corr.I" + std::to_string(i + 1) + ".I" + std::to_string(j + 1);
        const bool flat = sample_variance(columns[i]) == 0.0 || sample_variance(columns[j]) == 0.0;
        c.estimate = flat ? 0.0 : pearson_correlation(columns[i], columns[j]);
        c.reference = 0.0;
        c.se = 1.0 / std::sqrt(m);
        c.tolerance = config.sigma;
        c.seed = config.master_seed;
        c.note = "disjoint sets; constant counts read as zero correlation";
        out.push_back(judge(c));
      }
  }
  return out;
}

std::vector<TestReport> verify_poisson(const ExperimentConfig& config, const RegimeRule& rule) {
  const Regime regime = config.walk.regime();
  if (regime == Regime::recurrent) throw RegimeError("verify_poisson: recurrent walks have a Cox limit");
  if (rule.regime != regime) throw RegimeError("verify_poisson: rule does not match the walk's regime");
  require_replicas(config);
  const auto start = std::chrono::steady_clock::now();
  const auto counts = simulate_counts(config, rule);
  double rel = 0.0;
  if (regime == Regime::transient && rule.q_hat > 0.0) rel = rule.q_se / rule.q_hat;
  if (regime == Regime::boundary) rel = rule.h_se / rule.h_hat;
  auto reports = poisson_checks(counts, config, rel);
  const double ms = elapsed_ms(start);
  for (auto& r : reports) r.runtime_ms = ms;
  return reports;
}

std::vector<TestReport> verify_poisson_with(const ExperimentConfig& config, const CountSource& source) {
  require_replicas(config);
  const auto start = std::chrono::steady_clock::now();
  const auto counts = parallel_map<std::vector<std::int64_t>>(config.replicas, resolve_workers(config.workers),
                                                              [&](std::size_t r) { return source(r); });
  auto reports = poisson_checks(counts, config);
  const double ms = elapsed_ms(start);
  for (auto& r : reports) r.runtime_ms = ms;
  return reports;
}

namespace {

std::vector<TestReport> cox_checks(const CountTable& counts, const ExperimentConfig& config, const CoxSettings& cox) {

  CoxLimit limit{config.walk, cox.resolution > 0 ? cox.resolution : 10 * config.n,
                 cox.replicas > 0 ? cox.replicas : config.replicas};
  const std::uint64_t ref_seed = stream_seed(config.master_seed, kCoxReferenceStream);
  const auto& tail = config.scenery.tail();

  std::vector<TestReport> out;
  for (std::size_t i = 0; i < config.queries.size(); ++i) {
    const auto& q = config.queries[i];
    const auto ref = cox_void_mc(limit, q, tail, ref_seed, config.workers);
    const double mass = nu(tail, q.heights);
    std::vector<double> col(counts.size());
    std::size_t zeros = 0;
    for (std::size_t r = 0; r < counts.size(); ++r) {
      col[r] = static_cast<double>(counts[r][i]);
      zeros += counts[r][i] == 0;
    }
    const std::string note = describe(q) + "; reference N=" + std::to_string(limit.resolution) +
                             " M=" + std::to_string(limit.replicas) + "; void and mean share replicas";

    TestReport v;
    v.name = config.label + ".void.I" + std::to_string(i + 1);
    const auto ve = frequency_estimate(zeros, counts.size());
    v.estimate = ve.value;
    v.reference = ref.void_prob.value;
    v.se = std::hypot(ve.se, ref.void_prob.se);
    v.tolerance = config.sigma;
    v.seed = config.master_seed;
    v.note = note;
    out.push_back(judge(v));

    TestReport mean;
    mean.name = config.label + ".mean.I" + std::to_string(i + 1);
    const auto me = mean_estimate(col);
    mean.estimate = me.value;
    mean.reference = mass == 0.0 ? 0.0 : ref.mean_increment.value * mass;
    mean.se = std::hypot(me.se, mass == 0.0 ? 0.0 : ref.mean_increment.se * mass);
    mean.tolerance = config.sigma;
    mean.seed = config.master_seed;
    mean.note = note;
    out.push_back(judge(mean));
  }
  return out;
}

void check_cox_regime(const ExperimentConfig& config) {
  const double alpha = config.walk.alpha();
  if (!(alpha > 1.0 && alpha <= 2.0)) throw RegimeError("verify_cox: needs a recurrent walk (alpha in (1, 2])");
  require_replicas(config);
}

}  // namespace

std::vector<TestReport> verify_cox(const ExperimentConfig& config, const CoxSettings& cox) {
  check_cox_regime(config);
  const auto start = std::chrono::steady_clock::now();
  const auto counts = simulate_counts(config, RegimeRule::recurrent(config.walk.alpha()));
  auto out = cox_checks(counts, config, cox);
  const double ms = elapsed_ms(start);
  for (auto& r : out) r.runtime_ms = ms;
  return out;
}

std::vector<TestReport> verify_cox_with(const ExperimentConfig& config, const CountSource& source,
                                        const CoxSettings& cox) {
  check_cox_regime(config);
  const auto start = std::chrono::steady_clock::now();
  const auto counts = parallel_map<std::vector<std::int64_t>>(config.replicas, resolve_workers(config.workers),
                                                              [&](std::size_t r) { return source(r); });
  auto out = cox_checks(counts, config, cox);
  const double ms = elapsed_ms(start);
  for (auto& r : out) r.runtime_ms = ms;
  return out;
}

}  // namespace rwrs
