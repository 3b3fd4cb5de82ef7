#pragma once

// Extremal-index machinery over the visited sites of a walk: ordered sites,
// block/stripe partitions, the mu'(u_n) estimator, O'Brien's conditional
// probability for a plain scenery and the gap statistic comparing
// P(M_{S_n} <= u_n) with the exponential of the block-leader sum.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rwrs/scenery.hpp"
#include "rwrs/stats.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

/// k_n blocks driver, l_n stripe width, r_n = floor(n / k_n) block size.
struct BlockScheme {
  std::int64_t k_n = 1;
  std::int64_t l_n = 0;
  std::int64_t r_n = 1;

  /// k_n = floor(n^0.6), l_n = floor(n^0.2).
  static BlockScheme default_for(std::int64_t n);
  static BlockScheme make(std::int64_t n, std::int64_t k_n, std::int64_t l_n);

  /// Realized number of blocks ceil(R / r_n) for R ordered sites.
  std::int64_t block_count(std::int64_t sites) const;
};

/// Block [begin, end) of the ordered sites with stripe [stripe_begin, end):
/// the l_n largest elements, empty for a final block shorter than l_n.
struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t stripe_begin = 0;

  std::size_t size() const { return end - begin; }
  std::size_t stripe_size() const { return end - stripe_begin; }
};

/// Sorted distinct visited sites S_(1) < ... < S_(R_n).
std::vector<std::int64_t> order_visited_sites(const WalkPath& path);
std::vector<std::int64_t> order_visited_sites(const Discoveries& walk);

/// Consecutive blocks of r_n ordered sites (last possibly short).
/// Throws SchemeError if r_n < 1 or l_n >= r_n.
std::vector<Block> make_blocks(std::size_t site_count, const BlockScheme& scheme);

/// Number of blocks containing a value above u, i.e. the number of pairs
/// (j, i) with xi(S_((j-1)r+i)) > u >= max of the later sites of block j.
/// `values[i]` is the scenery at the i-th ordered site.
std::int64_t count_block_leaders(std::span<const Block> blocks, std::span<const double> values, double u);

/// Walk + scenery experiment shared by the estimators below.
struct RwrsSetup {
  StepDistribution walk;
  SceneryModel scenery;
  std::int64_t n = 0;
  BlockScheme scheme;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

/// mu'(u) = E[block leaders] / (n P(xi > u)). `rescaled` is mu' n P(xi > u) / tau.
struct MuPrimeReport {
  bool defined = false;
  Estimate mu_prime;
  Estimate rescaled;
  Estimate leaders;            // per-replica block-leader count
  double mean_exceedances = 0; // per-replica count of ordered sites above u
  double denominator = 0;      // n P(xi > u)
};

/// Throws RegimeError outside the transient regime.
MuPrimeReport mu_prime(const RwrsSetup& setup, double u, double tau);

/// theta_hat = P(M_{2,r_n} <= u | xi(1) > u), sampled from the conditional
/// scenery law, plus P(M_n <= u) by frequency and exp(-n P(xi(1) > u) theta_hat).
struct ObrienReport {
  bool defined = false;
  Estimate theta;
  Estimate max_below;
  double exp_approximation = 0;
};

ObrienReport obrien_theta(const SceneryModel& model, std::int64_t n, const BlockScheme& scheme, std::size_t replicas,
                          double u, std::uint64_t seed, std::size_t workers = 0);

/// Closed form of P(M_{2,r} <= u | xi(1) > u) for iid and moving-max
/// sceneries; nullopt for AR(1) or when P(xi > u) = 0.
std::optional<double> obrien_reference(const SceneryModel& model, std::int64_t r, double u);

enum class GapMethod {
  automatic,    // conditional when the scenery has closed-form block probabilities
  frequency,    // indicator frequencies over joint walk + scenery draws
  conditional,  // scenery integrated out exactly given each walk
};

/// |P(M_{S_n} <= u) - exp(-S)| with S the expected number of block leaders;
/// the two terms come from independent replica streams.
struct GapReport {
  Estimate max_below;
  Estimate leader_sum;
  double exp_minus_sum = 0;
  double gap = 0;
  double gap_se = 0;
  GapMethod method = GapMethod::frequency;
};

GapReport theorem6_gap(const RwrsSetup& setup, double u, GapMethod method = GapMethod::automatic);

}  // namespace rwrs
