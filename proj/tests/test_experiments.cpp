#include <doctest.h>

#include <cmath>
#include <vector>

#include "rwrs/errors.hpp"
#include "rwrs/experiments.hpp"

using namespace rwrs;

TEST_SUITE("experiments") {
  TEST_CASE("marginal medians") {
    CHECK(marginal_median(SceneryModel::iid(TailFamily::frechet(2))) == doctest::Approx(std::sqrt(2.0)));
    CHECK(marginal_median(SceneryModel::iid(TailFamily::gumbel_exponential())) == doctest::Approx(std::log(2.0)));
    CHECK(std::abs(marginal_median(SceneryModel::gaussian_ar1(0.4))) < 1e-12);
    // max of two iid: F(x)^2 = 1/2
    CHECK(marginal_median(SceneryModel::moving_max(2, TailFamily::frechet(2))) ==
          doctest::Approx(1.0 / std::sqrt(1.0 - std::sqrt(0.5))));
  }

  TEST_CASE("first discoveries") {
    const auto d = first_discoveries(StepDistribution::drift(), 5, 1);
    CHECK(d.times == std::vector<std::int64_t>{1, 2, 3, 4, 5});
    CHECK(d.sites == std::vector<std::int64_t>{1, 2, 3, 4, 5});
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto z = first_discoveries(StepDistribution::symmetric_zeta(0.5), 5, seed);
      const auto full = discover(StepDistribution::symmetric_zeta(0.5), z.times.back(), seed);
      REQUIRE(z.times.size() == 5);
      CHECK(std::vector<std::int64_t>(full.times.begin(), full.times.begin() + 5) == z.times);
      CHECK(std::vector<std::int64_t>(full.sites.begin(), full.sites.begin() + 5) == z.sites);
    }
  }

  TEST_CASE("drift walk range law is exact") {
    Study s;
    s.walk = StepDistribution::drift();
    s.n = 1000;
    s.replicas = 10;
    s.workers = 1;
    const auto reports = range_law_study(s, {0.25, 0.5, 1.0});
    for (const auto& r : reports) {
      INFO(r.name);
      CHECK(r.verdict == Verdict::pass);
    }
    s.walk = StepDistribution::simple_lazy();
    CHECK_THROWS_AS(range_law_study(s, {0.5}), RegimeError);
  }

  TEST_CASE("study seeds pin the reports") {
    Study s;
    s.n = 1000;
    s.horizons = {1000, 2000};
    s.replicas = 300;
    s.seed = 3;
    s.workers = 1;
    const auto a = dprime_scenery_study(s);
    s.workers = 3;
    const auto b = dprime_scenery_study(s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].name == b[i].name);
      CHECK(a[i].estimate == b[i].estimate);
    }
  }
}
