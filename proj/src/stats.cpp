#include "rwrs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "rwrs/parallel.hpp"

namespace rwrs {

std::size_t default_workers() {
  if (const char* env = std::getenv("RWRS_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Estimate mean_estimate(std::span<const double> xs) {
  if (xs.empty()) return {};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  return {mean, std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()))};
}

Estimate frequency_estimate(std::size_t successes, std::size_t count) {
  if (count == 0) return {};
  const double p = static_cast<double>(successes) / static_cast<double>(count);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(count))};
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson_correlation: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: constant abscissa");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

double chi_square_sf(double x, double df) {
  if (df <= 0.0) return 1.0;
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

ChiSquareResult chi_square_gof(std::span<const std::int64_t> observations, std::span<const double> pmf,
                               double min_expected) {
  const std::size_t k_bins = pmf.size() + 1;  // last bin is the open tail
  std::vector<double> observed(k_bins, 0.0);
  for (std::int64_t v : observations) {
    if (v < 0) throw std::invalid_argument("chi_square_gof: negative observation");
    const auto idx = static_cast<std::size_t>(v);
    observed[std::min(idx, k_bins - 1)] += 1.0;
  }
  const auto total = static_cast<double>(observations.size());
  std::vector<double> expected(k_bins, 0.0);
  double mass = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    expected[k] = pmf[k] * total;
    mass += pmf[k];
  }
  expected.back() = std::max(0.0, 1.0 - mass) * total;

  std::vector<double> pooled_obs, pooled_exp;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t k = 0; k < k_bins; ++k) {
    acc_o += observed[k];
    acc_e += expected[k];
    if (acc_e >= min_expected) {
      pooled_obs.push_back(acc_o);
      pooled_exp.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (pooled_exp.empty()) {
      pooled_obs.push_back(acc_o);
      pooled_exp.push_back(acc_e);
    } else {
      pooled_obs.back() += acc_o;
      pooled_exp.back() += acc_e;
    }
  }

  ChiSquareResult res;
  res.bins = pooled_exp.size();
  if (res.bins < 2) return res;
  for (std::size_t i = 0; i < res.bins; ++i) {
    if (pooled_exp[i] <= 0.0) continue;
    const double d = pooled_obs[i] - pooled_exp[i];
    res.statistic += d * d / pooled_exp[i];
  }
  res.df = static_cast<double>(res.bins - 1);
  res.p_value = chi_square_sf(res.statistic, res.df);
  return res;
}

ChiSquareResult chi_square_independence(std::span<const double> table, std::size_t rows, std::size_t cols) {
  if (table.size() != rows * cols) throw std::invalid_argument("chi_square_independence: bad table shape");
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      row_sum[r] += table[r * cols + c];
      col_sum[c] += table[r * cols + c];
      total += table[r * cols + c];
    }
  ChiSquareResult res;
  const auto live_rows = static_cast<std::size_t>(std::count_if(row_sum.begin(), row_sum.end(), [](double v) { return v > 0; }));
  const auto live_cols = static_cast<std::size_t>(std::count_if(col_sum.begin(), col_sum.end(), [](double v) { return v > 0; }));
  res.bins = live_rows * live_cols;
  if (live_rows < 2 || live_cols < 2) return res;
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_sum[r] <= 0) continue;
    for (std::size_t c = 0; c < cols; ++c) {
      if (col_sum[c] <= 0) continue;
      const double e = row_sum[r] * col_sum[c] / total;
      const double d = table[r * cols + c] - e;
      res.statistic += d * d / e;
    }
  }
  res.df = static_cast<double>((live_rows - 1) * (live_cols - 1));
  res.p_value = chi_square_sf(res.statistic, res.df);
  return res;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges too slowly; the value is 1 to double precision
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace rwrs
