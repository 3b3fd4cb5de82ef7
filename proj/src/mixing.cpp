#include "rwrs/mixing.hpp"

#include <algorithm>
#include <numeric>

#include "rwrs/errors.hpp"
#include "rwrs/parallel.hpp"
#include "rwrs/rng.hpp"

namespace rwrs {

namespace {

std::int64_t block_size(std::int64_t n, std::int64_t k_n) {
  if (n < 1) throw DomainError("mixing: n must be at least 1");
  if (k_n < 1 || k_n > n) throw SchemeError("mixing: need 1 <= k_n <= n");
  return n / k_n;
}

Estimate scaled(std::span<const double> counts, double factor) {
  const Estimate e = mean_estimate(counts);
  return {factor * e.value, factor * e.se};
}

// Per-replica counts for every k: 1{M'_{2,k} <= u} #{j in k+1..r : xi(S_j) > u}
// given xi(S_1) > u.
std::vector<std::vector<double>> walk_counts(const StepDistribution& walk, const SceneryModel& model,
                                             std::int64_t r_n, std::span<const std::int64_t> ks,
                                             std::size_t replicas, double u, std::uint64_t seed,
                                             std::size_t workers) {
  if (workers == 0) workers = default_workers();
  const auto per_replica = parallel_map<std::vector<double>>(replicas, workers, [&](std::size_t r) {
    const std::uint64_t rs = replica_seed(seed, r);
    StepSampler step(walk, stream_seed(rs, kWalkStream));
    std::vector<std::int64_t> pos(static_cast<std::size_t>(r_n));
    std::int64_t s = 0;
    for (auto& p : pos) {
      s = static_cast<std::int64_t>(static_cast<std::uint64_t>(s) + static_cast<std::uint64_t>(step()));
      p = s;
    }
    std::vector<std::int64_t> distinct = pos;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const auto values = sample_scenery_given_exceedance(model, distinct, pos[0], u, stream_seed(rs, kSceneryStream));
    std::vector<char> above(pos.size());
    for (std::size_t j = 0; j < pos.size(); ++j) {
      const auto it = std::lower_bound(distinct.begin(), distinct.end(), pos[j]);
      above[j] = values[static_cast<std::size_t>(it - distinct.begin())] > u;
    }
    // Index j here is time j + 1.
    std::vector<double> out;
    out.reserve(ks.size());
    for (const auto k : ks) {
      const auto ku = static_cast<std::size_t>(k);
      const bool quiet = std::none_of(above.begin() + 1, above.begin() + ku, [](char a) { return a != 0; });
      out.push_back(quiet ? static_cast<double>(std::count(above.begin() + ku, above.end(), 1)) : 0.0);
    }
    return out;
  });
  std::vector<std::vector<double>> by_k(ks.size(), std::vector<double>(replicas));
  for (std::size_t r = 0; r < replicas; ++r)
    for (std::size_t i = 0; i < ks.size(); ++i) by_k[i][r] = per_replica[r][i];
  return by_k;
}

}  // namespace

MixingSumReport dprime_sum_scenery(const SceneryModel& model, std::int64_t n, std::int64_t k_n, std::size_t replicas,
                                   double u, std::uint64_t seed, std::size_t workers) {
  const std::int64_t r_n = block_size(n, k_n);
  if (replicas < 1) throw DomainError("mixing: replicas must be positive");
  MixingSumReport rep{n, k_n, r_n, 1, {}, std::nullopt};
  const double p = model.marginal_tail(u);
  if (!(p > 0.0)) return rep;  // no exceedance possible
  if (workers == 0) workers = default_workers();
  std::vector<std::int64_t> sites(static_cast<std::size_t>(r_n) + 1);
  std::iota(sites.begin(), sites.end(), std::int64_t{0});
  const auto counts = parallel_map<double>(replicas, workers, [&](std::size_t r) {
    const auto values = sample_scenery_given_exceedance(model, sites, 0, u, replica_seed(seed, r));
    return static_cast<double>(std::count_if(values.begin() + 1, values.end(), [u](double v) { return v > u; }));
  });
  rep.sum = scaled(counts, static_cast<double>(n) * p);
  return rep;
}

MixingSumReport dprime_sum_rwrs(const StepDistribution& walk, const SceneryModel& model, std::int64_t n,
                                std::int64_t k_n, std::size_t replicas, double u, double tau, double q_hat,
                                std::uint64_t seed, std::size_t workers) {
  const std::int64_t one[1] = {1};
  auto reps = dinfty_sum(walk, model, n, k_n, one, replicas, u, seed, workers);
  reps[0].reference_bound = tau * (1.0 - q_hat);
  return reps[0];
}

std::vector<MixingSumReport> dinfty_sum(const StepDistribution& walk, const SceneryModel& model, std::int64_t n,
                                        std::int64_t k_n, std::span<const std::int64_t> ks, std::size_t replicas,
                                        double u, std::uint64_t seed, std::size_t workers) {
  const std::int64_t r_n = block_size(n, k_n);
  if (replicas < 1) throw DomainError("mixing: replicas must be positive");
  for (const auto k : ks)
    if (k < 1 || k >= r_n) throw SchemeError("mixing: need 1 <= k < r_n");
  std::vector<MixingSumReport> out;
  const double p = model.marginal_tail(u);
  if (!(p > 0.0)) {
    for (const auto k : ks) out.push_back({n, k_n, r_n, k, {}, std::nullopt});
    return out;
  }
  const auto counts = walk_counts(walk, model, r_n, ks, replicas, u, seed, workers);
  for (std::size_t i = 0; i < ks.size(); ++i)
    out.push_back({n, k_n, r_n, ks[i], scaled(counts[i], static_cast<double>(n) * p), std::nullopt});
  return out;
}

}  // namespace rwrs
