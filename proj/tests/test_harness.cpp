#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rwrs/errors.hpp"
#include "rwrs/harness.hpp"
#include "rwrs/limits.hpp"
#include "rwrs/rng.hpp"

using namespace rwrs;

namespace {

// Exact Poisson process with intensity Leb x nu above `floor`: nu-tail
// arrival times of a unit-rate process mapped back to heights.
std::vector<std::int64_t> exact_poisson_counts(const TailFamily& tail, double floor,
                                               const std::vector<QuerySet>& queries, std::uint64_t seed) {
  Xoshiro256 g(seed);
  const double total = nu_tail(tail, floor);
  std::vector<std::int64_t> counts(queries.size(), 0);
  double gamma = 0;
  while (true) {
    gamma += -std::log(to_open_unit(g()));
    if (gamma > total) break;
    const double y = nu_tail_inverse(tail, gamma);
    const double t = to_open_unit(g());
    for (std::size_t i = 0; i < queries.size(); ++i)
      counts[i] += queries[i].a < t && t <= queries[i].b && queries[i].heights.contains(y);
  }
  return counts;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.scenery = SceneryModel::iid(TailFamily::frechet(2));
  c.replicas = 1000;
  c.queries = {{0, 0.5, HeightSet(1, INFINITY)}, {0.5, 1, HeightSet(0.5, INFINITY)}};
  c.workers = 1;
  return c;
}

TestReport report(double est, double se, double ref, Comparison cmp, double tol = 3.0) {
  TestReport r;
  r.estimate = est;
  r.se = se;
  r.reference = ref;
  r.comparison = cmp;
  r.tolerance = tol;
  return judge(r);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("verdicts") {
    CHECK(report(1.0, 0.1, 1.29, Comparison::within_sigma).verdict == Verdict::pass);
    CHECK(report(1.0, 0.1, 1.31, Comparison::within_sigma).verdict == Verdict::fail);
    CHECK(report(1.02, 0, 1.0, Comparison::within_relative, 0.03).verdict == Verdict::pass);
    CHECK(report(1.04, 0, 1.0, Comparison::within_relative, 0.03).verdict == Verdict::fail);
    CHECK(report(0.75, 0.1, 1.0, Comparison::at_least).verdict == Verdict::pass);
    CHECK(report(0.65, 0.1, 1.0, Comparison::at_least).verdict == Verdict::fail);
    CHECK(report(1.25, 0.1, 1.0, Comparison::at_most).verdict == Verdict::pass);
    CHECK(report(1.35, 0.1, 1.0, Comparison::at_most).verdict == Verdict::fail);
    CHECK(report(0.5, 0, 0.5, Comparison::below).verdict == Verdict::fail);
    CHECK(report(0.4, 0, 0.5, Comparison::below).verdict == Verdict::pass);
    CHECK(report(0.5, 0, 0.5, Comparison::above).verdict == Verdict::fail);
    CHECK(report(NAN, 0.1, 1.0, Comparison::within_sigma).verdict == Verdict::undefined);
    CHECK(to_string(Verdict::undefined) == "undefined");
  }

  TEST_CASE("report csv") {
    std::vector<TestReport> rs(2);
    rs[0].name = "a.void.I1";
    rs[0].estimate = 0.375;
    rs[0].se = 0.01;
    rs[0].reference = 0.36787944117144233;
    rs[0].seed = 42;
    rs[0].runtime_ms = 12.5;
    judge(rs[0]);
    rs[1].name = "b";
    rs[1].estimate = NAN;
    judge(rs[1]);
    std::ostringstream plain, timed;
    write_reports_csv(plain, rs);
    write_reports_csv(timed, rs, Timing::include);
    CHECK(plain.str() ==
          "name,estimate,se,reference,verdict,runtime_ms,seed\n"
          "a.void.I1,0.375,0.01,0.36787944117144233,pass,,42\n"
          "b,nan,0,0,undefined,,0\n");
    CHECK(timed.str().find(",pass,12.5,42\n") != std::string::npos);
    CHECK_FALSE(all_pass(rs));
    std::ostringstream sum;
    write_summary(sum, rs);
    CHECK(sum.str().find("1 passed, 0 failed, 1 undefined") != std::string::npos);
  }

  TEST_CASE("query sets") {
    const QuerySet a{0, 0.5, HeightSet(1, 2)}, b{0.5, 1, HeightSet(1, 2)}, c{0.2, 0.7, HeightSet(2, 3)},
        d{0.2, 0.7, HeightSet(1.5, 3)};
    CHECK(disjoint(a, b));
    CHECK(disjoint(a, c));
    CHECK_FALSE(disjoint(a, d));
    const auto s = describe({0, 1, HeightSet({{1, 2}, {3, INFINITY}})});
    CHECK(s.find(',') == std::string::npos);
    CHECK(s.rfind("(0;1]x(1;2]u(3;", 0) == 0);
  }

  TEST_CASE("calibration") {
    auto rule = calibrate(StepDistribution::drift(), 10, 1, 1);
    CHECK(rule.regime == Regime::transient);
    CHECK(rule.q_hat == 1.0);
    CHECK(m_of_n(rule, 777) == 777);
    rule = calibrate(StepDistribution::simple_lazy(), 10000, 1, 1);
    CHECK(rule.regime == Regime::recurrent);
    CHECK(m_of_n(rule, 10000) == 100);
    rule = calibrate(StepDistribution::symmetric_zeta(1.0), 1000, 50, 1, 1);
    CHECK(rule.regime == Regime::boundary);
    CHECK(rule.h_hat > 1.0);
    rule = calibrate(StepDistribution::symmetric_zeta(0.5), 1000, 50, 1, 1, Regime::transient);
    CHECK(rule.q_hat > 0.5);
    CHECK(rule.q_hat < 1.0);
    CHECK_THROWS_AS(calibrate(StepDistribution::symmetric_zeta(0.5), 1000, 50, 1, 1, Regime::boundary), RegimeError);
    CHECK_THROWS_AS(calibrate(StepDistribution::symmetric_zeta(0.5), 999, 50, 1, 1), DomainError);
  }

  TEST_CASE("exact Poisson sampler passes every check") {
    auto config = small_config();
    const auto tail = config.scenery.tail();
    const auto reports = verify_poisson_with(config, [&](std::size_t r) {
      return exact_poisson_counts(tail, 0.5, config.queries, replica_seed(77, r));
    });
    // void, mean, gof per set plus one correlation
    CHECK(reports.size() == 7);
    for (const auto& r : reports) {
      INFO(r.name, " ", r.estimate, " vs ", r.reference);
      CHECK(r.verdict == Verdict::pass);
    }
    CHECK(reports[0].name == "poisson.void.I1");
    CHECK(reports.back().name == "poisson.corr.I1.I2");
  }

  TEST_CASE("false failure rate of the exact sampler stays near nominal") {
    auto config = small_config();
    config.replicas = 500;
    const auto tail = config.scenery.tail();
    int failed = 0, checks = 0;
    for (std::uint64_t run = 0; run < 100; ++run) {
      const auto reports = verify_poisson_with(config, [&](std::size_t r) {
        return exact_poisson_counts(tail, 0.5, config.queries, replica_seed(1000 + run, r));
      });
      for (const auto& r : reports) {
        ++checks;
        failed += r.verdict != Verdict::pass;
      }
    }
    // Nominal: five 3-sigma checks (0.27%) and two gof checks at 1% per run.
    const double expected = 100 * (5 * 0.0027 + 2 * 0.01);
    CHECK(checks == 700);
    CHECK(failed <= expected + 3 * std::sqrt(expected) + 1);
  }

  TEST_CASE("clustered counts are rejected") {
    auto config = small_config();
    const auto tail = config.scenery.tail();
    const auto reports = verify_poisson_with(config, [&](std::size_t r) {
      // Every point doubled, half the intensity: same mean, wrong law.
      auto q = config.queries;
      std::vector<std::int64_t> c(q.size());
      Xoshiro256 g(replica_seed(5, r));
      for (std::size_t i = 0; i < q.size(); ++i) {
        std::poisson_distribution<std::int64_t> pois(poisson_mean(q[i], tail) / 2);
        c[i] = 2 * pois(g);
      }
      return c;
    });
    CHECK(reports[0].verdict == Verdict::fail);  // void
    CHECK(reports[1].verdict == Verdict::pass);  // mean
    CHECK(reports[2].verdict == Verdict::fail);  // gof
  }

  TEST_CASE("input validation") {
    auto config = small_config();
    config.replicas = 99;
    const CountSource zero = [](std::size_t) { return std::vector<std::int64_t>{0, 0}; };
    CHECK_THROWS_AS(verify_poisson_with(config, zero), DomainError);
    config = small_config();
    config.queries.clear();
    CHECK_THROWS_AS(verify_poisson_with(config, zero), DomainError);
    config = small_config();
    config.walk = StepDistribution::simple_lazy();
    CHECK_THROWS_AS(verify_poisson(config, RegimeRule::recurrent(2.0)), RegimeError);
    config.walk = StepDistribution::symmetric_zeta(0.5);
    CHECK_THROWS_AS(verify_poisson(config, RegimeRule::boundary(2.0)), RegimeError);
    CHECK_THROWS_AS(verify_cox(config), RegimeError);
  }

  TEST_CASE("worker count does not change the report bytes") {
    auto config = small_config();
    config.n = 2000;
    config.replicas = 200;
    config.master_seed = 9;
    const auto rule = RegimeRule::transient(0.8, 0.01);
    std::string out[2];
    for (int w = 0; w < 2; ++w) {
      config.workers = w == 0 ? 1 : 3;
      std::ostringstream os;
      write_reports_csv(os, verify_poisson(config, rule));
      out[w] = os.str();
    }
    CHECK(out[0] == out[1]);
    CHECK(simulate_counts(config, rule) == simulate_counts(config, rule));
  }

  TEST_CASE("Cox checks against an injected Cox sampler") {
    ExperimentConfig config;
    config.walk = StepDistribution::simple_lazy();
    config.scenery = SceneryModel::iid(TailFamily::gumbel_exponential());
    config.n = 1000;
    config.replicas = 2000;
    config.workers = 1;
    config.label = "cox";
    config.queries = {{0, 1, HeightSet(0, INFINITY)}, {0.2, 0.6, HeightSet(-1, 1)}, {0, 1, HeightSet()}};
    const CoxSettings cox{10000, 2000};
    const auto tail = config.scenery.tail();
    const auto reports = verify_cox_with(config, [&](std::size_t r) {
      Xoshiro256 g(replica_seed(31, r));
      std::vector<std::int64_t> counts;
      for (std::size_t i = 0; i < config.queries.size(); ++i) {
        const auto& q = config.queries[i];
        const std::vector<std::int64_t> at{static_cast<std::int64_t>(std::floor(10000 * q.a)),
                                           static_cast<std::int64_t>(std::floor(10000 * q.b))};
        const auto range = range_at(config.walk, at, replica_seed(32 + i, r));
        const double z = static_cast<double>(range[1] - range[0]) / 100.0;
        const double mass = z * nu(tail, q.heights);
        if (mass == 0.0) {
          counts.push_back(0);
          continue;
        }
        std::poisson_distribution<std::int64_t> pois(mass);
        counts.push_back(pois(g));
      }
      return counts;
    }, cox);
    REQUIRE(reports.size() == 6);
    for (const auto& r : reports) {
      INFO(r.name, " ", r.estimate, " vs ", r.reference, " se ", r.se);
      CHECK(r.verdict == Verdict::pass);
    }
    CHECK(reports[4].name == "cox.void.I3");
    CHECK(reports[4].estimate == 1.0);
    CHECK(reports[4].reference == 1.0);
    CHECK(reports[5].reference == 0.0);
  }
}
