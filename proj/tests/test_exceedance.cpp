#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rwrs/errors.hpp"
#include "rwrs/exceedance.hpp"
#include "rwrs/limits.hpp"

using namespace rwrs;

namespace {

Discoveries hand_walk() {
  Discoveries d;
  d.n = 5;
  d.times = {1, 3, 5};
  d.sites = {1, 0, 3};
  return d;
}

PointPattern hand_pattern() {
  const std::vector<double> values{4, 1, 9};  // xi(1), xi(0), xi(3)
  return build_pattern_from_heights(hand_walk(), values, norming_constants(TailFamily::frechet(1), 5.0),
                                    RegimeRule::transient(1.0));
}

}  // namespace

TEST_SUITE("exceedance") {
  TEST_CASE("time scale m(n)") {
    CHECK(m_of_n(RegimeRule::transient(0.5), 1000) == 500);
    CHECK(m_of_n(RegimeRule::boundary(10.0), 1000) == 100);
    CHECK(m_of_n(RegimeRule::recurrent(2.0), 1000000) == 1000);
    CHECK(m_of_n(RegimeRule::recurrent(1.5), 1000000) == 10000);
    CHECK_THROWS_AS(m_of_n(RegimeRule::transient(1e-4), 100), DegenerateScaleError);
    CHECK_THROWS_AS(RegimeRule::transient(0.0), ParameterError);
    CHECK_THROWS_AS(RegimeRule::boundary(0.5), ParameterError);
    CHECK_THROWS_AS(RegimeRule::recurrent(0.9), ParameterError);
  }

  TEST_CASE("hand-built pattern") {
    const auto p = hand_pattern();
    REQUIRE(p.points.size() == 3);
    CHECK(p.points[0].t == doctest::Approx(0.2));
    CHECK(p.points[0].y == doctest::Approx(0.8));
    CHECK(p.points[1].t == doctest::Approx(0.6));
    CHECK(p.points[1].y == doctest::Approx(0.2));
    CHECK(p.points[2].t == doctest::Approx(1.0));
    CHECK(p.points[2].y == doctest::Approx(1.8));
  }

  TEST_CASE("counts and voids") {
    const auto p = hand_pattern();
    CHECK(count_in(p, {0, 1, HeightSet(0.5, INFINITY)}) == 2);
    CHECK(count_in(p, {0.2, 1, HeightSet(0.5, INFINITY)}) == 1);  // (a, b] excludes t = 0.2
    CHECK(count_in(p, {0, 0.6, HeightSet(0, INFINITY)}) == 2);
    CHECK(count_in(p, {0.5, 0.5, HeightSet(0, INFINITY)}) == 0);
    CHECK(void_in(p, {0.5, 0.5, HeightSet(0, INFINITY)}));
    CHECK(count_in(p, {0, 1, HeightSet(1e9, INFINITY)}) == 0);
    CHECK(count_in(p, {0, 1, HeightSet({{0, 0.5}, {1, 2}})}) == 2);
    CHECK_THROWS_AS(count_in(p, {0.7, 0.3, HeightSet(0, 1)}), DomainError);
    CHECK_THROWS_AS(count_in(p, {0, 1, HeightSet(2, 1)}), DomainError);
  }

  TEST_CASE("constant path gives one point at t = 1/n") {
    const WalkPath path{3, {5, 5, 5}, {1, 1, 1}, {1}, {5}};
    const auto p = build_pattern(path, SceneryModel::iid(TailFamily::frechet(2)), RegimeRule::transient(1.0), 4);
    REQUIRE(p.points.size() == 1);
    CHECK(p.points[0].t == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("one point per discovery, heights rescaled at level m(n)") {
    const auto model = SceneryModel::iid(TailFamily::frechet(2));
    const auto rule = RegimeRule::transient(0.8);
    for (std::uint64_t seed = 1; seed < 20; ++seed) {
      const auto walk = discover(StepDistribution::symmetric_zeta(0.5), 700, seed);
      const auto p = build_pattern(walk, model, rule, seed + 100);
      REQUIRE(p.points.size() == walk.sites.size());
      const auto values = sample_scenery(model, walk.sites, seed + 100);
      const double a = std::sqrt(560.0);  // m = floor(0.8 * 700)
      for (std::size_t k = 0; k < values.size(); ++k) {
        CHECK(p.points[k].t == static_cast<double>(walk.times[k]) / 700.0);
        CHECK(p.points[k].y == doctest::Approx(values[k] / a));
      }
    }
  }

  TEST_CASE("pattern csv") {
    const std::vector<PointPattern> ps{hand_pattern()};
    std::ostringstream os;
    write_pattern_csv(os, ps);
    CHECK(os.str() == "replica,t,y\n0,0.2,0.8\n0,0.6,0.2\n0,1,1.8\n");
  }
}

TEST_SUITE("limits") {
  TEST_CASE("poisson mean and void") {
    const auto fr = TailFamily::frechet(2);
    const auto gu = TailFamily::gumbel_exponential();
    CHECK(poisson_mean({0, 1, HeightSet(1, INFINITY)}, fr) == doctest::Approx(1.0));
    CHECK(poisson_mean({0.3, 0.3, HeightSet(1, INFINITY)}, fr) == 0.0);
    CHECK(poisson_mean({0, 2, HeightSet(std::log(2.0), INFINITY)}, gu) == doctest::Approx(1.0));
    CHECK(poisson_void({0, 1, HeightSet(1, INFINITY)}, fr) == doctest::Approx(0.36787944117144233));
    CHECK(poisson_void({0, 1, HeightSet()}, fr) == 1.0);
    CHECK(poisson_void({0, 1, HeightSet(0, INFINITY)}, gu) == doctest::Approx(std::exp(-1.0)));
    CHECK_THROWS_AS(poisson_mean({1, 0, HeightSet(1, 2)}, fr), DomainError);
  }

  TEST_CASE("poisson pmf") {
    CHECK(poisson_pmf(1.0, 0) == doctest::Approx(std::exp(-1.0)));
    CHECK(poisson_pmf(1.0, 1) == doctest::Approx(std::exp(-1.0)));
    CHECK(poisson_pmf(2.5, 3) == doctest::Approx(std::exp(-2.5) * 2.5 * 2.5 * 2.5 / 6));
    CHECK(poisson_pmf(0.0, 0) == 1.0);
    CHECK(poisson_pmf(0.0, 3) == 0.0);
    double total = 0;
    for (int k = 0; k < 200; ++k) total += poisson_pmf(40.0, k);
    CHECK(total == doctest::Approx(1.0));
    CHECK(poisson_count_pmf({0, 1, HeightSet(1, INFINITY)}, TailFamily::frechet(2), 0) ==
          doctest::Approx(std::exp(-1.0)));
  }

  TEST_CASE("cox reference degenerate cases") {
    const CoxLimit lim{StepDistribution::simple_lazy(), 1000, 50};
    const auto gu = TailFamily::gumbel_exponential();
    auto e = cox_void_mc(lim, {0, 1, HeightSet()}, gu, 1);
    CHECK(e.void_prob.value == 1.0);
    e = cox_void_mc(lim, {0.4, 0.4, HeightSet(0, INFINITY)}, gu, 1);
    CHECK(e.void_prob.value == 1.0);
    CHECK(e.mean_increment.value == 0.0);
    e = cox_void_mc(lim, {0, 1, HeightSet(0, INFINITY)}, TailFamily::frechet(2), 1);
    CHECK(e.void_prob.value >= e.jensen_bound);
  }

  TEST_CASE("cox reference errors") {
    const auto gu = TailFamily::gumbel_exponential();
    CHECK_THROWS_AS(cox_void_mc({StepDistribution::symmetric_zeta(0.5), 100, 10}, {0, 1, HeightSet(0, 1)}, gu, 1),
                    RegimeError);
    CHECK_THROWS_AS(cox_void_mc({StepDistribution::simple_lazy(), 100, 10}, {0, 2, HeightSet(0, 1)}, gu, 1),
                    DomainError);
    CHECK_THROWS_AS(
        cox_void_mc({StepDistribution::simple_lazy(), 1000000000, 10000}, {0, 1, HeightSet(0, 1)}, gu, 1),
        ResourceError);
  }

  TEST_CASE("cox reference reproducible across disjoint seed streams") {
    const CoxLimit lim{StepDistribution::simple_lazy(), 100000, 2000};
    const QuerySet q{0, 1, HeightSet(0, INFINITY)};
    const auto gu = TailFamily::gumbel_exponential();
    const auto a = cox_void_mc(lim, q, gu, 101);
    const auto b = cox_void_mc(lim, q, gu, 202);
    CHECK(std::abs(a.void_prob.value - b.void_prob.value) <= 3 * std::hypot(a.void_prob.se, b.void_prob.se));
    CHECK(a.void_prob.value > 0.2);
    CHECK(a.void_prob.value < 0.6);
    // Same seed, same answer.
    CHECK(cox_void_mc(lim, q, gu, 101, 1).void_prob.value == a.void_prob.value);
  }
}
