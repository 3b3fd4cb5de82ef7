#pragma once

// Summary statistics and the classical tests used by the verdict layer.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rwrs {

/// A Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Sample mean with standard error sd/sqrt(count); summation in index order.
Estimate mean_estimate(std::span<const double> xs);

/// Frequency estimate of a Bernoulli mean: p and sqrt(p(1-p)/count).
Estimate frequency_estimate(std::size_t successes, std::size_t count);

double sample_variance(std::span<const double> xs);

/// Pearson correlation; 0 when either sample is constant.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Upper tail P(X > x) of a chi-square law with `df` degrees of freedom.
double chi_square_sf(double x, double df);

struct ChiSquareResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  std::size_t bins = 0;
};

/// Pearson goodness of fit of integer observations against a pmf.
/// `pmf[k]` is the reference probability of value k; mass beyond the last
/// entry forms an open tail bin. Adjacent bins are pooled from the left
/// until each has expected count >= min_expected, leftovers merge into the
/// last pooled bin.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> observations, std::span<const double> pmf,
                               double min_expected = 5.0);

/// Pearson test of independence for a rows x cols contingency table
/// (row-major). Empty rows or columns are dropped before counting df.
ChiSquareResult chi_square_independence(std::span<const double> table, std::size_t rows,
                                        std::size_t cols);

/// Kolmogorov limiting distribution: P(sup|B| > lambda) for a Brownian bridge.
double kolmogorov_sf(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with Stephens' small-sample correction.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace rwrs
