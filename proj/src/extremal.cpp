#include "rwrs/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rwrs/errors.hpp"
#include "rwrs/parallel.hpp"
#include "rwrs/rng.hpp"

namespace rwrs {

namespace {

std::int64_t floor_power(std::int64_t n, double power) {
  const double x = std::pow(static_cast<double>(n), power);
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(x));
}

// Streams of the gap statistic; kept apart from the per-replica walk/scenery ids.
constexpr std::uint64_t kGapMaxStream = 0x6d61;
constexpr std::uint64_t kGapSumStream = 0x7375;
constexpr std::uint64_t kObrienThetaStream = 0x7468;
constexpr std::uint64_t kObrienMaxStream = 0x6d78;

}  // namespace

BlockScheme BlockScheme::default_for(std::int64_t n) {
  if (n < 1) throw DomainError("block scheme: n must be at least 1");
  return make(n, floor_power(n, 0.6), floor_power(n, 0.2));
}

BlockScheme BlockScheme::make(std::int64_t n, std::int64_t k_n, std::int64_t l_n) {
  if (n < 1) throw DomainError("block scheme: n must be at least 1");
  if (k_n < 1 || k_n > n) throw SchemeError("block scheme: need 1 <= k_n <= n");
  if (l_n < 0) throw SchemeError("block scheme: stripe width must be nonnegative");
  BlockScheme s;
  s.k_n = k_n;
  s.l_n = l_n;
  s.r_n = n / k_n;
  if (s.l_n >= s.r_n) throw SchemeError("block scheme: stripe width must be below the block size");
  return s;
}

std::int64_t BlockScheme::block_count(std::int64_t sites) const {
  if (r_n < 1) throw SchemeError("block scheme: block size must be positive");
  return (sites + r_n - 1) / r_n;
}

std::vector<std::int64_t> order_visited_sites(const WalkPath& path) {
  std::vector<std::int64_t> sites = path.discovered_sites;
  std::sort(sites.begin(), sites.end());
  return sites;
}

std::vector<std::int64_t> order_visited_sites(const Discoveries& walk) {
  std::vector<std::int64_t> sites = walk.sites;
  std::sort(sites.begin(), sites.end());
  return sites;
}

std::vector<Block> make_blocks(std::size_t site_count, const BlockScheme& scheme) {
  if (scheme.r_n < 1) throw SchemeError("make_blocks: block size must be positive");
  if (scheme.l_n < 0 || scheme.l_n >= scheme.r_n) throw SchemeError("make_blocks: need 0 <= l_n < r_n");
  const auto r = static_cast<std::size_t>(scheme.r_n);
  const auto l = static_cast<std::size_t>(scheme.l_n);
  std::vector<Block> blocks;
  blocks.reserve((site_count + r - 1) / r);
  for (std::size_t begin = 0; begin < site_count; begin += r) {
    Block b;
    b.begin = begin;
    b.end = std::min(begin + r, site_count);
    b.stripe_begin = b.size() >= l ? b.end - l : b.end;
    blocks.push_back(b);
  }
  return blocks;
}

std::int64_t count_block_leaders(std::span<const Block> blocks, std::span<const double> values, double u) {
  std::int64_t leaders = 0;
  for (const auto& b : blocks) {
    if (b.end > values.size()) throw DomainError("count_block_leaders: block exceeds the value array");
    for (std::size_t i = b.begin; i < b.end; ++i)
      if (values[i] > u) {
        ++leaders;
        break;
      }
  }
  return leaders;
}

MuPrimeReport mu_prime(const RwrsSetup& setup, double u, double tau) {
  if (setup.walk.regime() != Regime::transient) throw RegimeError("mu_prime: needs a transient walk (alpha < 1)");
  if (setup.n < 1 || setup.replicas < 1) throw DomainError("mu_prime: n and replicas must be positive");
  const std::size_t workers = setup.workers == 0 ? default_workers() : setup.workers;

  struct Counts {
    double leaders;
    double exceedances;
  };
  const auto counts = parallel_map<Counts>(setup.replicas, workers, [&](std::size_t r) {
    const std::uint64_t seed = replica_seed(setup.seed, r);
    const auto walk = discover(setup.walk, setup.n, stream_seed(seed, kWalkStream));
    const auto sites = order_visited_sites(walk);
    const auto values = sample_scenery(setup.scenery, sites, stream_seed(seed, kSceneryStream));
    const auto blocks = make_blocks(sites.size(), setup.scheme);
    const auto above = std::count_if(values.begin(), values.end(), [u](double v) { return v > u; });
    return Counts{static_cast<double>(count_block_leaders(blocks, values, u)), static_cast<double>(above)};
  });

  std::vector<double> leaders(counts.size());
  double exceed = 0.0;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    leaders[r] = counts[r].leaders;
    exceed += counts[r].exceedances;
  }

  MuPrimeReport rep;
  rep.leaders = mean_estimate(leaders);
  rep.mean_exceedances = exceed / static_cast<double>(counts.size());
  rep.denominator = static_cast<double>(setup.n) * setup.scenery.marginal_tail(u);
  rep.defined = exceed > 0.0 && rep.denominator > 0.0;
  if (!rep.defined) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.mu_prime = {nan, nan};
    rep.rescaled = {nan, nan};
    return rep;
  }
  rep.mu_prime = {rep.leaders.value / rep.denominator, rep.leaders.se / rep.denominator};
  rep.rescaled = {rep.leaders.value / tau, rep.leaders.se / tau};
  return rep;
}

ObrienReport obrien_theta(const SceneryModel& model, std::int64_t n, const BlockScheme& scheme, std::size_t replicas,
                          double u, std::uint64_t seed, std::size_t workers) {
  if (n < 1 || replicas < 1) throw DomainError("obrien_theta: n and replicas must be positive");
  if (scheme.r_n < 1) throw SchemeError("obrien_theta: block size must be positive");
  if (workers == 0) workers = default_workers();
  ObrienReport rep;
  const double p = model.marginal_tail(u);

  std::vector<std::int64_t> block_sites(static_cast<std::size_t>(scheme.r_n));
  std::iota(block_sites.begin(), block_sites.end(), std::int64_t{1});
  std::vector<std::int64_t> all_sites(static_cast<std::size_t>(n));
  std::iota(all_sites.begin(), all_sites.end(), std::int64_t{1});

  const std::uint64_t max_master = stream_seed(seed, kObrienMaxStream);
  const auto below = parallel_map<char>(replicas, workers, [&](std::size_t r) {
    const auto values = sample_scenery(model, all_sites, replica_seed(max_master, r));
    return static_cast<char>(std::all_of(values.begin(), values.end(), [u](double v) { return v <= u; }));
  });
  rep.max_below = frequency_estimate(static_cast<std::size_t>(std::count(below.begin(), below.end(), 1)), replicas);

  if (!(p > 0.0)) {
    // Conditioning event has probability zero.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.theta = {nan, nan};
    rep.exp_approximation = nan;
    return rep;
  }

  const std::uint64_t theta_master = stream_seed(seed, kObrienThetaStream);
  const auto hits = parallel_map<char>(replicas, workers, [&](std::size_t r) {
    const auto values = sample_scenery_given_exceedance(model, block_sites, 1, u, replica_seed(theta_master, r));
    return static_cast<char>(std::all_of(values.begin() + 1, values.end(), [u](double v) { return v <= u; }));
  });
  rep.defined = true;
  rep.theta = frequency_estimate(static_cast<std::size_t>(std::count(hits.begin(), hits.end(), 1)), replicas);
  rep.exp_approximation = std::exp(-static_cast<double>(n) * p * rep.theta.value);
  return rep;
}

std::optional<double> obrien_reference(const SceneryModel& model, std::int64_t r, double u) {
  if (r < 1) throw SchemeError("obrien_reference: block size must be positive");
  if (model.kind() == SceneryKind::gaussian_ar1) return std::nullopt;
  const double p = model.marginal_tail(u);
  if (!(p > 0.0)) return std::nullopt;
  if (r == 1) return 1.0;
  const double pb = tail_prob(model.tail(), u);
  const double f = 1.0 - pb;
  if (model.kind() == SceneryKind::iid) return std::pow(f, static_cast<double>(r - 1));
  // xi(2..r) <= u pins eta_2..eta_{r+m-1}; xi(1) > u then needs eta_1 > u.
  const int m = model.window();
  return pb * std::pow(f, static_cast<double>(r + m - 2)) / p;
}

GapReport theorem6_gap(const RwrsSetup& setup, double u, GapMethod method) {
  if (setup.n < 1 || setup.replicas < 1) throw DomainError("theorem6_gap: n and replicas must be positive");
  const std::size_t workers = setup.workers == 0 ? default_workers() : setup.workers;
  const bool closed_form = setup.scenery.kind() != SceneryKind::gaussian_ar1;
  if (method == GapMethod::automatic) method = closed_form ? GapMethod::conditional : GapMethod::frequency;
  if (method == GapMethod::conditional && !closed_form)
    throw DomainError("theorem6_gap: no closed-form block probabilities for this scenery");

  GapReport rep;
  rep.method = method;
  const bool conditional = method == GapMethod::conditional;

  const std::uint64_t max_master = stream_seed(setup.seed, kGapMaxStream);
  const auto below = parallel_map<double>(setup.replicas, workers, [&](std::size_t r) {
    const std::uint64_t seed = replica_seed(max_master, r);
    const auto walk = discover(setup.walk, setup.n, stream_seed(seed, kWalkStream));
    const auto sites = order_visited_sites(walk);
    if (conditional) return *setup.scenery.prob_all_at_most(sites, u);
    const auto values = sample_scenery(setup.scenery, sites, stream_seed(seed, kSceneryStream));
    return std::all_of(values.begin(), values.end(), [u](double v) { return v <= u; }) ? 1.0 : 0.0;
  });

  const std::uint64_t sum_master = stream_seed(setup.seed, kGapSumStream);
  const auto sums = parallel_map<double>(setup.replicas, workers, [&](std::size_t r) {
    const std::uint64_t seed = replica_seed(sum_master, r);
    const auto walk = discover(setup.walk, setup.n, stream_seed(seed, kWalkStream));
    const auto sites = order_visited_sites(walk);
    const auto blocks = make_blocks(sites.size(), setup.scheme);
    if (conditional) {
      double s = 0.0;
      for (const auto& b : blocks) {
        const std::span<const std::int64_t> part(sites.data() + b.begin, b.size());
        s += 1.0 - *setup.scenery.prob_all_at_most(part, u);
      }
      return s;
    }
    const auto values = sample_scenery(setup.scenery, sites, stream_seed(seed, kSceneryStream));
    return static_cast<double>(count_block_leaders(blocks, values, u));
  });

  rep.max_below = mean_estimate(below);
  rep.leader_sum = mean_estimate(sums);
  rep.exp_minus_sum = std::exp(-rep.leader_sum.value);
  rep.gap = std::abs(rep.max_below.value - rep.exp_minus_sum);
  const double d = rep.exp_minus_sum * rep.leader_sum.se;
  rep.gap_se = std::sqrt(rep.max_below.se * rep.max_below.se + d * d);
  return rep;
}

}  // namespace rwrs
