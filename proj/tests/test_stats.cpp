#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rwrs/parallel.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/stats.hpp"

using namespace rwrs;

TEST_SUITE("stats") {
  TEST_CASE("mix64 reference values") {
    // SplitMix64 outputs for the state sequence starting at 0 (published test vector).
    CHECK(mix64(0x9e3779b97f4a7c15ULL) == 0xe220a8397b1dcdafULL);
    CHECK(mix64(2 * 0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
  }

  TEST_CASE("seed derivation is pinned") {
    CHECK(replica_seed(42, 0) == mix64(mix64(42) ^ 0x632be59bd9b4e019ULL));
    CHECK(replica_seed(42, 3) == mix64(mix64(42) ^ (3 * kGolden + 0x632be59bd9b4e019ULL)));
    CHECK(stream_seed(7, 1) == mix64(7 + 2 * kGolden));
    CHECK(replica_seed(1, 0) != replica_seed(1, 1));
    CHECK(replica_seed(1, 0) != replica_seed(2, 0));
  }

  TEST_CASE("unit conversions stay inside their intervals") {
    CHECK(to_open_unit(0) > 0.0);
    CHECK(to_open_unit(~0ULL) < 1.0);
    CHECK(to_unit(0) == 0.0);
    CHECK(to_unit(~0ULL) < 1.0);
  }

  TEST_CASE("xoshiro is deterministic and roughly uniform") {
    Xoshiro256 a(5), b(5);
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
    Xoshiro256 g(11);
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += g.uniform();
    CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  }

  TEST_CASE("mean and frequency estimates") {
    const std::vector<double> xs{1, 2, 3, 4};
    const auto e = mean_estimate(xs);
    CHECK(e.value == doctest::Approx(2.5));
    CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    const auto f = frequency_estimate(25, 100);
    CHECK(f.value == 0.25);
    CHECK(f.se == doctest::Approx(std::sqrt(0.25 * 0.75 / 100)));
  }

  TEST_CASE("correlation and linear fit") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> y{3, 5, 7, 9, 11};
    CHECK(pearson_correlation(x, y) == doctest::Approx(1.0));
    const auto fit = linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
  }

  TEST_CASE("chi-square tail matches closed forms") {
    // df = 2: exp(-x/2).
    CHECK(chi_square_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)));
    // df = 1: erfc(sqrt(x/2)).
    CHECK(chi_square_sf(3.84, 1.0) == doctest::Approx(std::erfc(std::sqrt(1.92))));
  }

  TEST_CASE("goodness of fit accepts exact frequencies and rejects a shifted law") {
    // Observations laid out exactly in proportion to the pmf.
    std::vector<std::int64_t> obs;
    const std::vector<double> pmf{0.25, 0.5, 0.25};
    for (int i = 0; i < 100; ++i) obs.push_back(0);
    for (int i = 0; i < 200; ++i) obs.push_back(1);
    for (int i = 0; i < 100; ++i) obs.push_back(2);
    const auto ok = chi_square_gof(obs, pmf);
    CHECK(ok.statistic == doctest::Approx(0.0));
    CHECK(ok.p_value == doctest::Approx(1.0));
    std::vector<std::int64_t> bad(400, 2);
    CHECK(chi_square_gof(bad, pmf).p_value < 1e-6);
  }

  TEST_CASE("independence table") {
    const std::vector<double> indep{10, 20, 30, 60};  // rows proportional
    CHECK(chi_square_independence(indep, 2, 2).statistic == doctest::Approx(0.0));
    const std::vector<double> dep{50, 0, 0, 50};
    CHECK(chi_square_independence(dep, 2, 2).p_value < 1e-10);
  }

  TEST_CASE("kolmogorov tail and two-sample test") {
    // P(K > 1.36) ~ 0.049 is the textbook 5% point.
    CHECK(kolmogorov_sf(1.36) == doctest::Approx(0.0494).epsilon(0.01));
    std::vector<double> a(500), b(500);
    Xoshiro256 g(3);
    for (auto& v : a) v = g.uniform();
    for (auto& v : b) v = g.uniform();
    CHECK(ks_two_sample(a, b).p_value > 0.01);
    for (auto& v : b) v += 0.3;
    CHECK(ks_two_sample(a, b).p_value < 1e-6);
  }

  TEST_CASE("parallel_map keeps order and rethrows the first failure") {
    const auto out = parallel_map<std::size_t>(1000, 4, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < out.size(); ++i) REQUIRE(out[i] == i * i);
    CHECK_THROWS_WITH(parallel_map<int>(100, 3,
                                        [](std::size_t i) -> int {
                                          if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
                                          return 0;
                                        }),
                      "17");
  }
}
