#pragma once

// Reference values of the limit laws: the Poisson process with intensity
// Lebesgue x nu, and a Monte Carlo reference for the Cox process driven by
// the Lebesgue measure of the range of the stable Levy process.

#include <cstdint>

#include "rwrs/exceedance.hpp"
#include "rwrs/stats.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

/// (b - a) nu(B).
double poisson_mean(const QuerySet& query, const TailFamily& tail);

/// exp(-(b - a) nu(B)).
double poisson_void(const QuerySet& query, const TailFamily& tail);

/// e^-lambda lambda^k / k!, evaluated in log space.
double poisson_pmf(double lambda, std::int64_t k);
double poisson_count_pmf(const QuerySet& query, const TailFamily& tail, std::int64_t k);

/// Discretized driver of the Cox limit: the walk `driver` (alpha in (1, 2])
/// at resolution N, so that (R_{floor(Nb)} - R_{floor(Na)}) / N^(1/alpha)
/// approximates m_Y((a, b]).
struct CoxLimit {
  StepDistribution driver;
  std::int64_t resolution = 0;
  std::size_t replicas = 0;
};

struct CoxEstimate {
  Estimate void_prob;       // E exp(-Z nu(B))
  Estimate mean_increment;  // E Z
  double jensen_bound = 0;  // exp(-E[Z] nu(B))
};

/// Throws RegimeError unless alpha in (1, 2], DomainError unless
/// 0 <= a <= b <= 1, ResourceError when N * M exceeds 10^12 steps.
CoxEstimate cox_void_mc(const CoxLimit& limit, const QuerySet& query, const TailFamily& tail,
                        std::uint64_t master_seed, std::size_t workers = 0);

}  // namespace rwrs
