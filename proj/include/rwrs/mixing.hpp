#pragma once

// Monte Carlo estimates of the local dependence sums
//   scenery:  n sum_{j=1}^{r_n} P(xi(0) > u, xi(j) > u)
//   RWRS:     n sum_{j=2}^{r_n} P(xi(S_1) > u, xi(S_j) > u)
//   D^k:      n sum_{j=k+1}^{r_n} P(xi(S_1) > u >= M'_{2,k}, xi(S_j) > u)
// with r_n = floor(n / k_n). Each is sampled under the scenery law
// conditioned on the anchor exceeding u and rescaled by n P(xi > u), which
// leaves the estimand unchanged while keeping rare joint exceedances visible.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rwrs/scenery.hpp"
#include "rwrs/stats.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

struct MixingSumReport {
  std::int64_t n = 0;
  std::int64_t k_n = 0;
  std::int64_t r_n = 0;
  std::int64_t k = 1;  // D^k index; 1 for the plain D' sums
  Estimate sum;
  std::optional<double> reference_bound;
};

MixingSumReport dprime_sum_scenery(const SceneryModel& model, std::int64_t n, std::int64_t k_n, std::size_t replicas,
                                   double u, std::uint64_t seed, std::size_t workers = 0);

/// `reference_bound` is tau (1 - q_hat).
MixingSumReport dprime_sum_rwrs(const StepDistribution& walk, const SceneryModel& model, std::int64_t n,
                                std::int64_t k_n, std::size_t replicas, double u, double tau, double q_hat,
                                std::uint64_t seed, std::size_t workers = 0);

/// One report per k; k = 1 reproduces dprime_sum_rwrs bit for bit.
/// Throws SchemeError unless 1 <= k < r_n for every k.
std::vector<MixingSumReport> dinfty_sum(const StepDistribution& walk, const SceneryModel& model, std::int64_t n,
                                        std::int64_t k_n, std::span<const std::int64_t> ks, std::size_t replicas,
                                        double u, std::uint64_t seed, std::size_t workers = 0);

}  // namespace rwrs
