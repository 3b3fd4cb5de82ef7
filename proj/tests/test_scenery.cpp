#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rwrs/errors.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/stats.hpp"

using namespace rwrs;

namespace {

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

std::vector<std::int64_t> iota_sites(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> s(static_cast<std::size_t>(hi - lo + 1));
  std::iota(s.begin(), s.end(), lo);
  return s;
}

}  // namespace

TEST_SUITE("scenery") {
  TEST_CASE("tail probabilities") {
    CHECK(tail_prob(TailFamily::frechet(2), 10) == doctest::Approx(0.01));
    CHECK(tail_prob(TailFamily::frechet(2), 0.5) == 1.0);
    CHECK(tail_prob(TailFamily::weibull(1), -0.25) == doctest::Approx(0.25));
    CHECK(tail_prob(TailFamily::weibull(1), 0.5) == 0.0);
    CHECK(tail_prob(TailFamily::gumbel_exponential(), 2.0) == doctest::Approx(std::exp(-2.0)));
    const double g = tail_prob(TailFamily::gumbel_gaussian(), 1.96);
    CHECK(std::abs(g - 0.0250) <= 1e-4);
    CHECK(g == doctest::Approx(normal_sf(1.96)).epsilon(1e-10));
  }

  TEST_CASE("quantile inverts the tail") {
    for (const auto& t : {TailFamily::frechet(2), TailFamily::frechet(0.7), TailFamily::weibull(1),
                          TailFamily::weibull(2.5), TailFamily::gumbel_exponential(), TailFamily::gumbel_gaussian()})
      for (double p : {1e-9, 1e-4, 0.1, 0.5, 0.9, 1.0 - 1e-6})
        CHECK(tail_prob(t, tail_quantile(t, p)) == doctest::Approx(p).epsilon(1e-9));
  }

  TEST_CASE("norming constants") {
    auto c = norming_constants(TailFamily::frechet(2), std::int64_t{100});
    CHECK(c.a == doctest::Approx(10.0));
    CHECK(c.b == 0.0);
    const auto n = static_cast<std::int64_t>(std::llround(std::exp(10.0)));
    c = norming_constants(TailFamily::gumbel_exponential(), n);
    CHECK(c.a == 1.0);
    CHECK(c.b == std::log(static_cast<double>(n)));
    c = norming_constants(TailFamily::gumbel_gaussian(), std::int64_t{10000});
    CHECK(10000.0 * normal_sf(c.threshold(0.0)) == doctest::Approx(1.0).epsilon(0.1));
    c = norming_constants(TailFamily::weibull(1), std::int64_t{50});
    CHECK(c.a == doctest::Approx(0.02));
    CHECK(50 * tail_prob(TailFamily::weibull(1), c.threshold(-1.0)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(norming_constants(TailFamily::frechet(2), std::int64_t{0}), DomainError);
  }

  TEST_CASE("limit measure nu") {
    CHECK(nu(TailFamily::frechet(2), HeightSet(1, INFINITY)) == doctest::Approx(1.0));
    CHECK(nu(TailFamily::frechet(2), HeightSet(2, 4)) == doctest::Approx(0.25 - 1.0 / 16));
    CHECK(nu(TailFamily::frechet(2), HeightSet()) == 0.0);
    CHECK(nu(TailFamily::gumbel_exponential(), HeightSet()) == 0.0);
    CHECK(nu(TailFamily::gumbel_exponential(), HeightSet(0, INFINITY)) == doctest::Approx(1.0));
    CHECK(nu(TailFamily::gumbel_exponential(), HeightSet(std::log(2.0), INFINITY)) == doctest::Approx(0.5));
    CHECK(nu(TailFamily::weibull(1), HeightSet(-0.5, 0)) == doctest::Approx(0.5));
    // Overlapping parts are counted once.
    CHECK(nu(TailFamily::frechet(2), HeightSet({{1, 3}, {2, INFINITY}})) == doctest::Approx(1.0));
    CHECK_THROWS_AS(nu(TailFamily::frechet(2), HeightSet(3, 1)), DomainError);
    CHECK_THROWS_AS(nu(TailFamily::frechet(2), HeightSet(-1, 2)), DomainError);
    CHECK_THROWS_AS(nu(TailFamily::weibull(1), HeightSet(-1, 1)), DomainError);
  }

  TEST_CASE("iid scenery is counter based") {
    const auto model = SceneryModel::iid(TailFamily::frechet(2));
    const std::vector<std::int64_t> sites{0, 5, -3};
    CHECK(sample_scenery(model, sites, 99) == sample_scenery(model, sites, 99));
    const std::vector<std::int64_t> other{-3, 12};
    CHECK(sample_scenery(model, other, 99)[0] == sample_scenery(model, sites, 99)[2]);
    CHECK(sample_scenery(model, sites, 99) != sample_scenery(model, sites, 100));
  }

  TEST_CASE("moving max is the window maximum of the iid latents") {
    const auto tail = TailFamily::frechet(2);
    const auto latent = sample_scenery(SceneryModel::iid(tail), iota_sites(-2, 4), 7);
    const auto mm = sample_scenery(SceneryModel::moving_max(2, tail), iota_sites(-2, 3), 7);
    for (std::size_t i = 0; i < mm.size(); ++i) CHECK(mm[i] == std::max(latent[i], latent[i + 1]));
    // xi(0) = xi(1) exactly when eta_1 dominates eta_0 and eta_2.
    int shared = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto eta = sample_scenery(SceneryModel::iid(tail), iota_sites(0, 2), seed);
      const auto xi = sample_scenery(SceneryModel::moving_max(2, tail), iota_sites(0, 1), seed);
      const bool dominates = eta[1] >= eta[0] && eta[1] >= eta[2];
      CHECK((xi[0] == xi[1]) == dominates);
      shared += dominates;
    }
    CHECK(shared > 0);
  }

  TEST_CASE("gaussian AR(1) lag-one autocorrelation") {
    const auto model = SceneryModel::gaussian_ar1(0.5);
    const auto xs = sample_scenery(model, iota_sites(0, 10000), 31);
    const std::span<const double> all(xs);
    const double r1 = pearson_correlation(all.first(xs.size() - 1), all.last(xs.size() - 1));
    CHECK(std::abs(r1 - 0.5) <= 0.02);
    const auto m = mean_estimate(xs);
    CHECK(std::abs(m.value) < 0.1);
    CHECK(sample_variance(xs) == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("AR(1) values do not depend on the queried set") {
    const auto model = SceneryModel::gaussian_ar1(0.7);
    const auto wide = sample_scenery(model, iota_sites(-20, 20), 5);
    const std::vector<std::int64_t> few{7, -13, 3};
    const auto narrow = sample_scenery(model, few, 5);
    CHECK(narrow[0] == wide[27]);
    CHECK(narrow[1] == wide[7]);
    CHECK(narrow[2] == wide[23]);
    const std::vector<std::int64_t> far{0, std::int64_t{1} << 28};
    CHECK_THROWS_AS(sample_scenery(model, far, 5), ResourceError);
  }

  TEST_CASE("marginal tails and closed-form block probabilities") {
    const auto tail = TailFamily::frechet(2);
    const double u = 3.0;
    const double p = tail_prob(tail, u);
    const auto mm = SceneryModel::moving_max(3, tail);
    CHECK(mm.marginal_tail(u) == doctest::Approx(1 - std::pow(1 - p, 3)));
    const std::vector<std::int64_t> sites{0, 1, 5};
    CHECK(*SceneryModel::iid(tail).prob_all_at_most(sites, u) == doctest::Approx(std::pow(1 - p, 3)));
    // Windows [0,2], [1,3], [5,7] cover 7 latents.
    CHECK(*mm.prob_all_at_most(sites, u) == doctest::Approx(std::pow(1 - p, 7)));
    CHECK_FALSE(SceneryModel::gaussian_ar1(0.3).prob_all_at_most(sites, 0.0).has_value());
    // moving-max is normed at level m n.
    CHECK(mm.norming(100).a == doctest::Approx(std::sqrt(300.0)));
  }

  TEST_CASE("conditioning on an exceedance") {
    const auto tail = TailFamily::frechet(2);
    const auto iid = SceneryModel::iid(tail);
    const double u = 10.0;
    const std::vector<std::int64_t> sites{-4, 0, 9};
    std::vector<double> anchor;
    for (std::uint64_t seed = 0; seed < 4000; ++seed) {
      const auto v = sample_scenery_given_exceedance(iid, sites, 0, u, seed);
      REQUIRE(v[1] > u);
      anchor.push_back(v[1]);
      if (seed < 50) {
        const auto plain = sample_scenery(iid, sites, seed);
        CHECK(v[0] == plain[0]);
        CHECK(v[2] == plain[2]);
      }
    }
    // Given xi > u, xi / u is Pareto(2): median u sqrt(2).
    const double above = static_cast<double>(
        std::count_if(anchor.begin(), anchor.end(), [&](double x) { return x > u * std::sqrt(2.0); }));
    CHECK(std::abs(above / 4000 - 0.5) < 4 * std::sqrt(0.25 / 4000));

    // moving-max m=2: P(xi(1) > u | xi(0) > u) = (1 - 2F^2 + F^3) / (1 - F^2).
    const auto mm = SceneryModel::moving_max(2, tail);
    const double f = 1 - tail_prob(tail, u);
    const double want = (1 - 2 * f * f + f * f * f) / (1 - f * f);
    const std::vector<std::int64_t> pair{0, 1};
    const int reps = 20000;
    int both = 0;
    for (int r = 0; r < reps; ++r) {
      const auto v = sample_scenery_given_exceedance(mm, pair, 0, u, replica_seed(3, r));
      REQUIRE(v[0] > u);
      both += v[1] > u;
    }
    CHECK(std::abs(both / double(reps) - want) < 4 * std::sqrt(want * (1 - want) / reps));

    const auto ar = SceneryModel::gaussian_ar1(0.5);
    for (std::uint64_t seed = 0; seed < 200; ++seed) CHECK(sample_scenery_given_exceedance(ar, sites, 0, 2.5, seed)[1] > 2.5);
    CHECK_THROWS_AS(sample_scenery_given_exceedance(SceneryModel::iid(TailFamily::weibull(1)), sites, 0, 0.5, 1),
                    DomainError);
  }
}
