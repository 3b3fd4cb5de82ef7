#pragma once

// Integer random walks in the domain of attraction of alpha-stable laws,
// their range R_k, discovery times tau_k and the constants q and h(n).

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rwrs/rng.hpp"
#include "rwrs/stats.hpp"

namespace rwrs {

enum class StepFamily { symmetric_zeta, simple_lazy, drift };

/// Stability regime selecting the limit theorem: alpha < 1, alpha = 1, alpha > 1.
enum class Regime { transient, boundary, recurrent };

Regime regime_of(double alpha);
std::string to_string(Regime regime);

namespace detail {
class ZetaSampler;
}

/// Law of a single step X.
///
/// symmetric_zeta: P(X = 0) = p0, P(X = +-k) = (1 - p0) k^-(1+alpha) / (2 zeta(1+alpha)), k >= 1.
/// simple_lazy:    P(X = 0) = p0, P(X = +-1) = (1 - p0) / 2; the alpha = 2 representative.
/// drift:          X = +1 always. Degenerate test hook that never returns (q = 1);
///                 it carries a nominal alpha so it can stand in for any regime.
class StepDistribution {
 public:
  static StepDistribution symmetric_zeta(double alpha, double laziness = 0.0);
  static StepDistribution simple_lazy(double laziness = 0.5);
  static StepDistribution drift(double alpha = 0.5);

  StepFamily family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  double laziness() const noexcept { return laziness_; }
  Regime regime() const { return regime_of(alpha_); }
  bool nearest_neighbour() const noexcept { return family_ != StepFamily::symmetric_zeta; }

  /// c in P(|X| = k) = c k^-(1+alpha) for the zeta family; (1 - p0) for lazy.
  double tail_constant() const;
  double pmf(std::int64_t k) const;
  /// P(|X| > k).
  double abs_tail(std::uint64_t k) const;

  std::string describe() const;

  const detail::ZetaSampler* zeta_sampler() const noexcept { return zeta_.get(); }

 private:
  StepDistribution(StepFamily family, double alpha, double laziness);

  StepFamily family_;
  double alpha_;
  double laziness_;
  std::shared_ptr<const detail::ZetaSampler> zeta_;
};

/// Draws i.i.d. steps from a StepDistribution; deterministic in the seed.
///
/// The lazy walk with p0 = 1/2 reads two bits per step, least significant
/// first, from successive 64-bit words: X = b0 + b1 - 1. The table-driven
/// scanners below consume the identical stream.
class StepSampler {
 public:
  StepSampler(const StepDistribution& dist, std::uint64_t seed);
  std::int64_t operator()();

 private:
  StepDistribution dist_;
  Xoshiro256 rng_;
  std::uint64_t word_ = 0;
  int pairs_left_ = 0;
};

/// Positions S_1..S_n with their range process and discoveries.
struct WalkPath {
  std::int64_t n = 0;
  std::vector<std::int64_t> positions;        // S_1..S_n
  std::vector<std::int64_t> range;            // R_1..R_n
  std::vector<std::int64_t> discovery_times;  // tau_1..tau_{R_n}
  std::vector<std::int64_t> discovered_sites; // S_{tau_1}..S_{tau_{R_n}}
};

struct RangeDiscoveries {
  std::vector<std::int64_t> range;
  std::vector<std::int64_t> discovery_times;
  std::vector<std::int64_t> discovered_sites;
};

/// Exact range, discovery times (1-based) and discovered sites of a path.
RangeDiscoveries range_and_discoveries(std::span<const std::int64_t> positions);

/// Samples S_1..S_n. Throws DomainError for n < 1.
WalkPath sample_walk(const StepDistribution& dist, std::int64_t n, std::uint64_t seed);

/// Discovery times and sites only, without storing positions. Same random
/// stream as sample_walk, so the result equals range_and_discoveries of the
/// sampled path.
struct Discoveries {
  std::int64_t n = 0;
  std::vector<std::int64_t> times;
  std::vector<std::int64_t> sites;
};
Discoveries discover(const StepDistribution& dist, std::int64_t n, std::uint64_t seed);
Discoveries discoveries_of(const WalkPath& path);

/// R_t at each checkpoint t (nondecreasing, R_0 = 0) without storing the path.
std::vector<std::int64_t> range_at(const StepDistribution& dist, std::span<const std::int64_t> checkpoints,
                                   std::uint64_t seed);

/// Range and number of visits to the origin, #{k <= n : S_k = 0}.
struct ReturnScan {
  std::int64_t range = 0;
  std::int64_t visits_to_origin = 0;
};
ReturnScan scan_returns(const StepDistribution& dist, std::int64_t n, std::uint64_t seed);

enum class RegimeCheck { enforce, skip };

/// Two estimators of q = P(S_k != 0 for all k >= 1):
/// slope = replica mean of R_n / n, no_return = frequency of {S_k != 0, k <= n}.
/// agreement_z = |slope - no_return| / combined standard error.
struct QEstimate {
  Estimate slope;
  Estimate no_return;
  double agreement_z = 0.0;
};

/// Throws RegimeError for alpha >= 1 unless the check is skipped.
QEstimate estimate_q(const StepDistribution& dist, std::int64_t n, std::size_t replicas,
                     std::uint64_t master_seed, std::size_t workers = 0,
                     RegimeCheck check = RegimeCheck::enforce);

/// h(n) = 1 + sum_{k<=n} P(S_k = 0), estimated as 1 + replica mean of the
/// visit count to the origin.
Estimate estimate_h(const StepDistribution& dist, std::int64_t n, std::size_t replicas,
                    std::uint64_t master_seed, std::size_t workers = 0);

/// Sum_{j > k} j^-s for s > 1 (Euler-Maclaurin beyond a direct head).
double zeta_tail_sum(double s, std::uint64_t k);

}  // namespace rwrs
