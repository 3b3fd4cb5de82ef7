#include "rwrs/limits.hpp"

#include <cmath>
#include <limits>

#include "rwrs/errors.hpp"
#include "rwrs/parallel.hpp"

namespace rwrs {

double poisson_mean(const QuerySet& query, const TailFamily& tail) {
  if (query.a > query.b) throw DomainError("poisson_mean: a must not exceed b");
  if (query.a == query.b) return 0.0;
  const double mass = nu(tail, query.heights);
  if (mass == 0.0) return 0.0;
  return (query.b - query.a) * mass;
}

double poisson_void(const QuerySet& query, const TailFamily& tail) { return std::exp(-poisson_mean(query, tail)); }

double poisson_pmf(double lambda, std::int64_t k) {
  if (k < 0) throw DomainError("poisson_pmf: k must be nonnegative");
  if (lambda < 0.0) throw DomainError("poisson_pmf: negative mean");
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  if (std::isinf(lambda)) return 0.0;
  const auto kd = static_cast<double>(k);
  return std::exp(-lambda + kd * std::log(lambda) - std::lgamma(kd + 1.0));
}

double poisson_count_pmf(const QuerySet& query, const TailFamily& tail, std::int64_t k) {
  return poisson_pmf(poisson_mean(query, tail), k);
}

CoxEstimate cox_void_mc(const CoxLimit& limit, const QuerySet& query, const TailFamily& tail,
                        std::uint64_t master_seed, std::size_t workers) {
  const double alpha = limit.driver.alpha();
  if (!(alpha > 1.0 && alpha <= 2.0)) throw RegimeError("cox_void_mc: the Cox limit needs alpha in (1, 2]");
  if (!(query.a >= 0.0 && query.a <= query.b && query.b <= 1.0))
    throw DomainError("cox_void_mc: need 0 <= a <= b <= 1 on the scaled horizon");
  if (limit.resolution < 1 || limit.replicas < 1) throw DomainError("cox_void_mc: resolution and replicas must be positive");
  if (static_cast<double>(limit.resolution) * static_cast<double>(limit.replicas) > 1e12)
    throw ResourceError("cox_void_mc: resolution x replicas exceeds 10^12 steps");
  if (workers == 0) workers = default_workers();

  const double mass = nu(tail, query.heights);
  const auto big_n = static_cast<double>(limit.resolution);
  const double scale = std::pow(big_n, 1.0 / alpha);
  const std::int64_t lo = static_cast<std::int64_t>(std::floor(big_n * query.a));
  const std::int64_t hi = static_cast<std::int64_t>(std::floor(big_n * query.b));

  const auto z = parallel_map<double>(limit.replicas, workers, [&](std::size_t r) {
    if (lo == hi) return 0.0;
    const std::int64_t checkpoints[2] = {lo, hi};
    const auto ranges = range_at(limit.driver, checkpoints, stream_seed(replica_seed(master_seed, r), kWalkStream));
    return static_cast<double>(ranges[1] - ranges[0]) / scale;
  });

  std::vector<double> voids(z.size());
  for (std::size_t r = 0; r < z.size(); ++r) {
    const double exponent = z[r] == 0.0 ? 0.0 : z[r] * mass;
    voids[r] = std::exp(-exponent);
  }
  CoxEstimate est;
  est.void_prob = mean_estimate(voids);
  est.mean_increment = mean_estimate(z);
  est.jensen_bound = std::exp(-(est.mean_increment.value == 0.0 ? 0.0 : est.mean_increment.value * mass));
  return est;
}

}  // namespace rwrs
