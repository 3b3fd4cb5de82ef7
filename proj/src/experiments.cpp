#include "rwrs/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "rwrs/errors.hpp"
#include "rwrs/extremal.hpp"
#include "rwrs/format.hpp"
#include "rwrs/mixing.hpp"
#include "rwrs/parallel.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/stats.hpp"

namespace rwrs {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string prefix(const Study& study, const char* fallback) { return study.label.empty() ? fallback : study.label; }

std::vector<std::int64_t> horizons_of(const Study& study) {
  return study.horizons.empty() ? std::vector<std::int64_t>{study.n} : study.horizons;
}

std::size_t calibration_replicas(const Study& study) {
  return study.calibration_replicas > 0 ? study.calibration_replicas : study.replicas;
}

RegimeRule calibrate_for(const Study& study, std::int64_t n) {
  return calibrate(study.walk, n, calibration_replicas(study), stream_seed(study.seed, kCalibrationStream),
                   study.workers);
}

TestReport row(std::string name, double estimate, double se, double reference, Comparison cmp, double tolerance,
               std::uint64_t seed, std::string note = {}) {
  TestReport r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.se = se;
  r.reference = reference;
  r.comparison = cmp;
  r.tolerance = tolerance;
  r.seed = seed;
  r.note = std::move(note);
  return judge(r);
}

std::string horizon_tag(std::int64_t n) { return ".n" + std::to_string(n); }

}  // namespace

double marginal_median(const SceneryModel& model) {
  switch (model.kind()) {
    case SceneryKind::iid: return tail_quantile(model.tail(), 0.5);
    case SceneryKind::gaussian_ar1: return 0.0;
    case SceneryKind::moving_max:
      return tail_quantile(model.tail(), -std::expm1(std::log(0.5) / static_cast<double>(model.window())));
  }
  return 0.0;
}

Discoveries first_discoveries(const StepDistribution& walk, int k, std::uint64_t seed, std::int64_t max_steps) {
  if (k < 1) throw DomainError("first_discoveries: k must be positive");
  StepSampler step(walk, seed);
  Discoveries d;
  std::int64_t s = 0;
  for (std::int64_t t = 1; static_cast<int>(d.sites.size()) < k; ++t) {
    if (t > max_steps) throw ResourceError("first_discoveries: step budget exhausted");
    s = static_cast<std::int64_t>(static_cast<std::uint64_t>(s) + static_cast<std::uint64_t>(step()));
    if (std::find(d.sites.begin(), d.sites.end(), s) == d.sites.end()) {
      d.sites.push_back(s);
      d.times.push_back(t);
    }
    d.n = t;
  }
  return d;
}

std::vector<TestReport> range_law_study(const Study& study, const std::vector<double>& ts, double tolerance) {
  if (study.walk.regime() != Regime::transient) throw RegimeError("range law study: needs a transient walk");
  if (ts.empty()) throw DomainError("range law study: no time points");
  const auto start = Clock::now();
  const std::string p = prefix(study, "range");
  const auto q = estimate_q(study.walk, study.n, calibration_replicas(study),
                            stream_seed(study.seed, kCalibrationStream), study.workers);
  const double q_hat = q.slope.value;

  std::vector<double> sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::int64_t> checkpoints;
  for (const double t : sorted) {
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("range law study: t must lie in (0, 1]");
    checkpoints.push_back(static_cast<std::int64_t>(std::floor(t * static_cast<double>(study.n))));
  }
  const std::size_t workers = study.workers == 0 ? default_workers() : study.workers;
  const auto ranges = parallel_map<std::vector<std::int64_t>>(study.replicas, workers, [&](std::size_t r) {
    return range_at(study.walk, checkpoints, stream_seed(replica_seed(study.seed, r), kWalkStream));
  });

  std::vector<TestReport> out;
  out.push_back(row(p + ".q_agreement", q.slope.value, std::hypot(q.slope.se, q.no_return.se), q.no_return.value,
                    Comparison::within_sigma, study.sigma, study.seed,
                    "slope estimator vs no-return frequency at n=" + std::to_string(study.n)));
  const auto nd = static_cast<double>(study.n);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    std::vector<double> ratio(ranges.size());
    for (std::size_t r = 0; r < ranges.size(); ++r) ratio[r] = static_cast<double>(ranges[r][i]) / (nd * q_hat);
    const auto e = mean_estimate(ratio);
    out.push_back(row(p + ".t" + format_double(sorted[i]), e.value, e.se, sorted[i], Comparison::within_relative,
                      tolerance, study.seed, "mean R_[nt]/(n q_hat); q_hat " + format_double(q_hat)));
  }
  const double ms = elapsed_ms(start);
  for (auto& r : out) r.runtime_ms = ms;
  return out;
}

std::vector<TestReport> extremal_index_study(const Study& study) {
  const auto start = Clock::now();
  const auto rule = calibrate_for(study, study.n);
  const double u = study.scenery.threshold(study.tau, static_cast<double>(study.n));
  RwrsSetup setup{study.walk, study.scenery, study.n, BlockScheme::default_for(study.n),
                  study.replicas, study.seed, study.workers};
  const auto mu = mu_prime(setup, u, study.tau);
  auto r = row(prefix(study, "extremal") + ".mu_prime", mu.mu_prime.value, std::hypot(mu.mu_prime.se, rule.q_se),
               rule.q_hat, Comparison::within_sigma, study.sigma, study.seed,
               "reference q_hat; rescaled mu' " + format_double(mu.rescaled.value) + "; exceedances per replica " +
                   format_double(mu.mean_exceedances));
  if (!mu.defined) {
    r.verdict = Verdict::undefined;
    r.note = "no exceedances: estimator undefined";
  }
  r.runtime_ms = elapsed_ms(start);
  return {r};
}

std::vector<TestReport> dprime_rwrs_study(const Study& study, double fraction) {
  const std::string p = prefix(study, "dprime_rwrs");
  std::vector<TestReport> out;
  std::vector<Estimate> sums;
  for (const auto h : horizons_of(study)) {
    const auto start = Clock::now();
    const auto rule = calibrate_for(study, h);
    const double u = study.scenery.threshold(study.tau, static_cast<double>(m_of_n(rule, h)));
    const auto k_n = BlockScheme::default_for(h).k_n;
    const auto rep = dprime_sum_rwrs(study.walk, study.scenery, h, k_n, study.replicas, u, study.tau, rule.q_hat,
                                     stream_seed(study.seed, static_cast<std::uint64_t>(h)), study.workers);
    auto r = row(p + horizon_tag(h), rep.sum.value, rep.sum.se, fraction * rep.reference_bound.value(),
                 Comparison::at_least, 0.0, study.seed,
                 format_double(fraction) + " x tau(1-q_hat) with tau(1-q_hat) = " +
                     format_double(*rep.reference_bound) + "; r_n " + std::to_string(rep.r_n));
    r.runtime_ms = elapsed_ms(start);
    out.push_back(r);
    sums.push_back(rep.sum);
  }
  const auto hs = horizons_of(study);
  for (std::size_t i = 1; i < sums.size(); ++i)
    out.push_back(row(p + ".trend" + horizon_tag(hs[i]), sums[i].value, std::hypot(sums[i].se, sums[i - 1].se),
                      sums[i - 1].value, Comparison::at_least, study.sigma, study.seed,
                      "non-decreasing vs n=" + std::to_string(hs[i - 1])));
  return out;
}

std::vector<TestReport> dprime_scenery_study(const Study& study, double vanish, double persist) {
  const std::string p = prefix(study, "dprime_scenery");
  const bool iid = study.scenery.kind() == SceneryKind::iid;
  const auto hs = horizons_of(study);
  std::vector<TestReport> out;
  std::vector<Estimate> sums;
  for (const auto h : hs) {
    const auto start = Clock::now();
    const double u = study.scenery.threshold(study.tau, static_cast<double>(h));
    const auto k_n = BlockScheme::default_for(h).k_n;
    const auto rep = dprime_sum_scenery(study.scenery, h, k_n, study.replicas, u,
                                        stream_seed(study.seed, static_cast<std::uint64_t>(h)), study.workers);
    const double pu = study.scenery.marginal_tail(u);
    const auto hd = static_cast<double>(h);
    const auto rd = static_cast<double>(rep.r_n);
    TestReport r;
    if (iid) {
      // Exact law: the count is Binomial(r_n, p); sigma taken under the closed form.
      const double se = hd * pu * std::sqrt(rd * pu * (1.0 - pu) / static_cast<double>(study.replicas));
      r = row(p + horizon_tag(h), rep.sum.value, se, hd * rd * pu * pu, Comparison::within_sigma, study.sigma,
              study.seed, "closed form n r_n p^2; r_n " + std::to_string(rep.r_n));
    } else {
      r = row(p + horizon_tag(h), rep.sum.value, rep.sum.se, persist, Comparison::above, 0.0, study.seed,
              "dependent scenery: sum stays away from zero; r_n " + std::to_string(rep.r_n));
    }
    r.runtime_ms = elapsed_ms(start);
    out.push_back(r);
    sums.push_back(rep.sum);
  }
  if (iid) {
    for (std::size_t i = 1; i < sums.size(); ++i)
      out.push_back(row(p + ".decrease" + horizon_tag(hs[i]), sums[i].value, 0.0, sums[i - 1].value,
                        Comparison::below, 0.0, study.seed, "vs n=" + std::to_string(hs[i - 1])));
    out.push_back(row(p + ".vanish" + horizon_tag(hs.back()), sums.back().value, sums.back().se, vanish,
                      Comparison::below, 0.0, study.seed));
  }
  return out;
}

std::vector<TestReport> dinfty_study(const Study& study, const std::vector<std::int64_t>& ks) {
  if (ks.empty()) throw DomainError("dinfty study: no k values");
  const auto start = Clock::now();
  const std::string p = prefix(study, "dinfty");
  const auto rule = calibrate_for(study, study.n);
  const double u = study.scenery.threshold(study.tau, static_cast<double>(m_of_n(rule, study.n)));
  const auto k_n = BlockScheme::default_for(study.n).k_n;
  const auto reps = dinfty_sum(study.walk, study.scenery, study.n, k_n, ks, study.replicas, u, study.seed,
                               study.workers);
  const double bound = study.tau * (1.0 - rule.q_hat);
  std::vector<TestReport> out;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& rep = reps[i];
    const std::string name = p + ".k" + std::to_string(rep.k);
    if (i == 0)
      out.push_back(row(name, rep.sum.value, rep.sum.se, bound, Comparison::above, 0.0, study.seed,
                        "vs tau(1-q_hat); r_n " + std::to_string(rep.r_n)));
    else
      out.push_back(row(name, rep.sum.value, std::hypot(rep.sum.se, reps[i - 1].sum.se), reps[i - 1].sum.value,
                        Comparison::at_most, study.sigma, study.seed,
                        "non-increasing vs k=" + std::to_string(reps[i - 1].k)));
  }
  if (reps.front().k != 1) out.front() = row(out.front().name, reps.front().sum.value, reps.front().sum.se, 0.0,
                                             Comparison::above, 0.0, study.seed, "positive");
  const double ms = elapsed_ms(start);
  for (auto& r : out) r.runtime_ms = ms;
  return out;
}

std::vector<TestReport> discovery_independence_study(const Study& study, int k, int bins) {
  if (bins < 2) throw DomainError("discovery independence study: need at least 2 bins");
  const auto start = Clock::now();
  const std::string p = prefix(study, "discovery");
  const double u = marginal_median(study.scenery);
  const std::size_t workers = study.workers == 0 ? default_workers() : study.workers;
  struct Draw {
    std::int64_t tau;
    double value;
    double fresh;
  };
  const auto draws = parallel_map<Draw>(study.replicas, workers, [&](std::size_t r) {
    const std::uint64_t seed = replica_seed(study.seed, r);
    const auto d = first_discoveries(study.walk, k, stream_seed(seed, kWalkStream));
    const std::int64_t site[1] = {d.sites.back()};
    const std::int64_t origin[1] = {0};
    return Draw{d.times.back(), sample_scenery(study.scenery, site, stream_seed(seed, kSceneryStream))[0],
                sample_scenery(study.scenery, origin, stream_seed(seed, 0x6672))[0]};
  });

  // Quantile bins of tau_k: consecutive values pooled to about M / bins each.
  std::map<std::int64_t, std::size_t> freq;
  for (const auto& d : draws) ++freq[d.tau];
  // The target is recomputed from what is left, so an atom at tau_k = k
  // does not swallow the other bins.
  std::map<std::int64_t, std::size_t> bin_of;
  std::size_t bin = 0;
  double filled = 0.0;
  double left = static_cast<double>(draws.size());
  double target = left / bins;
  for (const auto& [t, c] : freq) {
    if (filled >= target && static_cast<int>(bin) + 1 < bins) {
      ++bin;
      left -= filled;
      filled = 0.0;
      target = left / static_cast<double>(bins - static_cast<int>(bin));
    }
    bin_of[t] = bin;
    filled += static_cast<double>(c);
  }
  std::size_t groups = bin + 1;
  if (groups > 1 && filled < target / 2) {
    for (auto& [t, b] : bin_of)
      if (b == bin) b = bin - 1;
    --groups;
  }
  std::vector<double> table(2 * groups, 0.0);
  std::vector<double> values, fresh;
  for (const auto& d : draws) {
    table[(d.value > u ? 1 : 0) * groups + bin_of[d.tau]] += 1.0;
    values.push_back(d.value);
    fresh.push_back(d.fresh);
  }
  const auto chi = chi_square_independence(table, 2, groups);
  const auto ks = ks_two_sample(values, fresh);
  std::vector<TestReport> out;
  out.push_back(row(p + ".independence", chi.p_value, 0.0, 0.01, Comparison::above, 0.0, study.seed,
                    "chi2 " + format_double(chi.statistic) + " df " + format_double(chi.df) + "; tau_" +
                        std::to_string(k) + " in " + std::to_string(groups) + " bins (p-value vs level)"));
  out.push_back(row(p + ".marginal", ks.p_value, 0.0, 0.01, Comparison::above, 0.0, study.seed,
                    "KS " + format_double(ks.statistic) + " vs fresh marginal draws (p-value vs level)"));
  const double ms = elapsed_ms(start);
  for (auto& r : out) r.runtime_ms = ms;
  return out;
}

std::vector<TestReport> obrien_study(const Study& study) {
  const auto start = Clock::now();
  const std::string p = prefix(study, "obrien");
  const auto scheme = BlockScheme::default_for(study.n);
  const double u = study.scenery.threshold(study.tau, static_cast<double>(study.n));
  const auto rep = obrien_theta(study.scenery, study.n, scheme, study.replicas, u, study.seed, study.workers);
  std::vector<TestReport> out;
  if (!rep.defined) {
    TestReport r = row(p + ".theta", rep.theta.value, rep.theta.se, rep.theta.value, Comparison::within_sigma,
                       study.sigma, study.seed, "P(xi > u) = 0: undefined");
    r.verdict = Verdict::undefined;
    out.push_back(r);
  } else {
    if (const auto ref = obrien_reference(study.scenery, scheme.r_n, u))
      out.push_back(row(p + ".theta", rep.theta.value, rep.theta.se, *ref, Comparison::within_sigma, study.sigma,
                        study.seed, "closed form; r_n " + std::to_string(scheme.r_n)));
    const double np = static_cast<double>(study.n) * study.scenery.marginal_tail(u);
    const double d = rep.exp_approximation * np * rep.theta.se;
    out.push_back(row(p + ".max_vs_exp", rep.max_below.value, std::hypot(rep.max_below.se, d), rep.exp_approximation,
                      Comparison::within_sigma, study.sigma, study.seed,
                      "P(M_n <= u) vs exp(-n P(xi > u) theta_hat); theta_hat " + format_double(rep.theta.value)));
  }
  const double ms = elapsed_ms(start);
  for (auto& r : out) r.runtime_ms = ms;
  return out;
}

std::vector<TestReport> gap_study(const Study& study, double bound) {
  const std::string p = prefix(study, "gap");
  const auto hs = horizons_of(study);
  std::vector<TestReport> out;
  std::vector<GapReport> gaps;
  for (const auto h : hs) {
    const auto start = Clock::now();
    const double u = study.scenery.threshold(study.tau, static_cast<double>(h));
    RwrsSetup setup{study.walk, study.scenery, h, BlockScheme::default_for(h),
                    study.replicas, stream_seed(study.seed, static_cast<std::uint64_t>(h)), study.workers};
    const auto g = theorem6_gap(setup, u);
    auto r = row(p + horizon_tag(h), g.gap, g.gap_se, bound, Comparison::below, 0.0, study.seed,
                 "P(M <= u) " + format_double(g.max_below.value) + " exp(-S) " + format_double(g.exp_minus_sum) +
                     (g.method == GapMethod::conditional ? "; scenery integrated out" : "; frequencies"));
    r.runtime_ms = elapsed_ms(start);
    out.push_back(r);
    gaps.push_back(g);
  }
  if (gaps.size() > 1)
    out.push_back(row(p + ".shrinks" + horizon_tag(hs.back()), gaps.back().gap, gaps.back().gap_se, gaps.front().gap,
                      Comparison::below, 0.0, study.seed, "vs n=" + std::to_string(hs.front())));
  return out;
}

}  // namespace rwrs
