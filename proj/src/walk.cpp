#include "rwrs/walk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <absl/container/flat_hash_set.h>

#include "rwrs/errors.hpp"
#include "rwrs/parallel.hpp"

namespace rwrs {

Regime regime_of(double alpha) {
  if (alpha < 1.0) return Regime::transient;
  if (alpha == 1.0) return Regime::boundary;
  return Regime::recurrent;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::transient: return "transient";
    case Regime::boundary: return "boundary";
    case Regime::recurrent: return "recurrent";
  }
  return "?";
}

double zeta_tail_sum(double s, std::uint64_t k) {
  if (!(s > 1.0)) throw ParameterError("zeta_tail_sum: exponent must exceed 1");
  // Direct head up to N, then Euler-Maclaurin for sum_{j > N} j^-s.
  constexpr std::uint64_t kHead = 64;
  const std::uint64_t big_n = std::max<std::uint64_t>(k, kHead);
  double head = 0.0;
  for (std::uint64_t j = big_n; j > k; --j) head += std::pow(static_cast<double>(j), -s);
  const double n = static_cast<double>(big_n);
  const double f = std::pow(n, -s);
  const double tail = n * f / (s - 1.0) - f / 2.0 + s * f / n / 12.0 -
                      s * (s + 1.0) * (s + 2.0) * f / (n * n * n) / 720.0 +
                      s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * f / (n * n * n * n * n) / 30240.0;
  return head + tail;
}

namespace detail {

// Alias-table inversion over |X| in {0, 1..K} plus one bucket for |X| > K,
// which is sampled exactly by rejection from a continuous Pareto proposal.
class ZetaSampler {
 public:
  static constexpr std::uint64_t kBody = 4096;

  ZetaSampler(double alpha, double laziness) : alpha_(alpha) {
    const double s = 1.0 + alpha;
    const double zeta = zeta_tail_sum(s, 0);
    scale_ = (1.0 - laziness) / zeta;
    std::vector<double> probs(kBody + 2);
    probs[0] = laziness;
    for (std::uint64_t k = 1; k <= kBody; ++k) probs[k] = scale_ * std::pow(static_cast<double>(k), -s);
    probs[kBody + 1] = scale_ * zeta_tail_sum(s, kBody);
    build_alias(probs);
    const double k1 = static_cast<double>(kBody + 1);
    bound_ = weight(k1);
  }

  double scale() const noexcept { return scale_; }

  std::uint64_t magnitude(Xoshiro256& rng) const {
    const std::uint64_t w = rng();
    const auto cell = static_cast<std::size_t>(((w >> 32) * static_cast<std::uint64_t>(prob_.size())) >> 32);
    const std::size_t idx = to_unit(rng()) < prob_[cell] ? cell : alias_[cell];
    if (idx <= kBody) return idx;
    return tail(rng);
  }

 private:
  // Ratio of the target pmf k^-(1+a) to the proposal mass of [k, k+1), up to constants.
  double weight(double k) const { return alpha_ / (k * -std::expm1(-alpha_ * std::log1p(1.0 / k))); }

  std::uint64_t tail(Xoshiro256& rng) const {
    constexpr double kCap = 0x1.0p62;
    const double k1 = static_cast<double>(kBody + 1);
    for (;;) {
      const double y = k1 * std::pow(rng.uniform(), -1.0 / alpha_);
      const double u = rng.uniform();
      if (!(y < kCap)) continue;  // truncation at 2^62; mass below 1e-9 per step
      const double k = std::floor(y);
      if (u * bound_ <= weight(k)) return static_cast<std::uint64_t>(k);
    }
  }

  void build_alias(const std::vector<double>& probs) {
    const std::size_t n = probs.size();
    double total = 0.0;
    for (double p : probs) total += p;
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = probs[i] / total * static_cast<double>(n);
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::size_t i : large) prob_[i] = 1.0;
    for (std::size_t i : small) prob_[i] = 1.0;
  }

  double alpha_;
  double scale_ = 0.0;
  double bound_ = 1.0;
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace detail

StepDistribution::StepDistribution(StepFamily family, double alpha, double laziness)
    : family_(family), alpha_(alpha), laziness_(laziness) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("step law: alpha must lie in (0, 2]");
  if (!(laziness >= 0.0 && laziness < 1.0)) throw ParameterError("step law: laziness must lie in [0, 1)");
  if (family == StepFamily::symmetric_zeta) zeta_ = std::make_shared<const detail::ZetaSampler>(alpha, laziness);
}

StepDistribution StepDistribution::symmetric_zeta(double alpha, double laziness) {
  return {StepFamily::symmetric_zeta, alpha, laziness};
}

StepDistribution StepDistribution::simple_lazy(double laziness) { return {StepFamily::simple_lazy, 2.0, laziness}; }

StepDistribution StepDistribution::drift(double alpha) { return {StepFamily::drift, alpha, 0.0}; }

double StepDistribution::tail_constant() const {
  switch (family_) {
    case StepFamily::symmetric_zeta: return zeta_->scale();
    case StepFamily::simple_lazy: return 1.0 - laziness_;
    case StepFamily::drift: return 1.0;
  }
  return 0.0;
}

double StepDistribution::pmf(std::int64_t k) const {
  switch (family_) {
    case StepFamily::symmetric_zeta:
      if (k == 0) return laziness_;
      return 0.5 * zeta_->scale() * std::pow(std::abs(static_cast<double>(k)), -(1.0 + alpha_));
    case StepFamily::simple_lazy:
      if (k == 0) return laziness_;
      return (k == 1 || k == -1) ? 0.5 * (1.0 - laziness_) : 0.0;
    case StepFamily::drift: return k == 1 ? 1.0 : 0.0;
  }
  return 0.0;
}

double StepDistribution::abs_tail(std::uint64_t k) const {
  switch (family_) {
    case StepFamily::symmetric_zeta: return zeta_->scale() * zeta_tail_sum(1.0 + alpha_, k);
    case StepFamily::simple_lazy: return k == 0 ? 1.0 - laziness_ : 0.0;
    case StepFamily::drift: return k == 0 ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string StepDistribution::describe() const {
  std::ostringstream os;
  switch (family_) {
    case StepFamily::symmetric_zeta: os << "zeta(alpha=" << alpha_ << ",p0=" << laziness_ << ")"; break;
    case StepFamily::simple_lazy: os << "lazy(p0=" << laziness_ << ")"; break;
    case StepFamily::drift: os << "drift(alpha=" << alpha_ << ")"; break;
  }
  return os.str();
}

StepSampler::StepSampler(const StepDistribution& dist, std::uint64_t seed) : dist_(dist), rng_(seed) {}

std::int64_t StepSampler::operator()() {
  switch (dist_.family()) {
    case StepFamily::drift: return 1;
    case StepFamily::simple_lazy:
      if (dist_.laziness() == 0.5) {
        if (pairs_left_ == 0) {
          word_ = rng_();
          pairs_left_ = 32;
        }
        const auto step = static_cast<std::int64_t>(word_ & 1U) + static_cast<std::int64_t>((word_ >> 1) & 1U) - 1;
        word_ >>= 2;
        --pairs_left_;
        return step;
      } else {
        const double u = rng_.uniform();
        const double p0 = dist_.laziness();
        if (u < p0) return 0;
        return u < p0 + 0.5 * (1.0 - p0) ? -1 : 1;
      }
    case StepFamily::symmetric_zeta: {
      const std::uint64_t sign_word = rng_();
      const auto mag = static_cast<std::int64_t>(dist_.zeta_sampler()->magnitude(rng_));
      return (sign_word >> 63) ? -mag : mag;
    }
  }
  return 0;
}

namespace {

// Wrapping addition: positions live on Z / 2^64, which never wraps at the
// horizons used here but keeps overflow defined.
inline std::int64_t add_wrap(std::int64_t pos, std::int64_t step) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(pos) + static_cast<std::uint64_t>(step));
}

void require_horizon(std::int64_t n) {
  if (n < 1) throw DomainError("walk horizon must be at least 1");
}

// Partial-sum extremes of eight lazy steps encoded in 16 bits (two bits per step).
struct LazyChunkTable {
  std::array<std::int8_t, 65536> sum{};
  std::array<std::int8_t, 65536> high{};
  std::array<std::int8_t, 65536> low{};

  LazyChunkTable() {
    for (std::uint32_t c = 0; c < 65536; ++c) {
      int s = 0, hi = std::numeric_limits<int>::min(), lo = std::numeric_limits<int>::max();
      for (int i = 0; i < 8; ++i) {
        s += static_cast<int>((c >> (2 * i)) & 1U) + static_cast<int>((c >> (2 * i + 1)) & 1U) - 1;
        hi = std::max(hi, s);
        lo = std::min(lo, s);
      }
      sum[c] = static_cast<std::int8_t>(s);
      high[c] = static_cast<std::int8_t>(hi);
      low[c] = static_cast<std::int8_t>(lo);
    }
  }
};

const LazyChunkTable& lazy_table() {
  static const LazyChunkTable table;
  return table;
}

// Lazy walk with p0 = 1/2. Reads the same bit stream as StepSampler but
// skips eight steps at a time whenever they cannot leave [min, max].
class LazyScanner {
 public:
  explicit LazyScanner(std::uint64_t seed) : rng_(seed), table_(lazy_table()) {}

  std::int64_t time() const noexcept { return t_; }
  std::int64_t range() const noexcept { return t_ == 0 ? 0 : max_ - min_ + 1; }

  template <class OnDiscovery>
  void advance_to(std::int64_t target, OnDiscovery&& on_discovery) {
    if (t_ == 0 && target > 0) {
      pos_ = step();
      t_ = 1;
      min_ = max_ = pos_;
      on_discovery(t_, pos_);
    }
    while (t_ < target) {
      if (pairs_left_ >= 8 && target - t_ >= 8) {
        const std::uint32_t c = static_cast<std::uint32_t>(word_ & 0xFFFFU);
        if (pos_ + table_.high[c] <= max_ && pos_ + table_.low[c] >= min_) {
          pos_ += table_.sum[c];
          word_ >>= 16;
          pairs_left_ -= 8;
          t_ += 8;
          continue;
        }
      }
      pos_ += step();
      ++t_;
      if (pos_ > max_) {
        max_ = pos_;
        on_discovery(t_, pos_);
      } else if (pos_ < min_) {
        min_ = pos_;
        on_discovery(t_, pos_);
      }
    }
  }

  // Range-only variant: branch-free chunk updates.
  void advance_range_to(std::int64_t target) {
    if (t_ == 0 && target > 0) advance_to(1, [](std::int64_t, std::int64_t) {});
    while (t_ < target) {
      if (pairs_left_ >= 8 && target - t_ >= 8) {
        const std::uint32_t c = static_cast<std::uint32_t>(word_ & 0xFFFFU);
        max_ = std::max<std::int64_t>(max_, pos_ + table_.high[c]);
        min_ = std::min<std::int64_t>(min_, pos_ + table_.low[c]);
        pos_ += table_.sum[c];
        word_ >>= 16;
        pairs_left_ -= 8;
        t_ += 8;
        continue;
      }
      pos_ += step();
      ++t_;
      max_ = std::max(max_, pos_);
      min_ = std::min(min_, pos_);
    }
  }

 private:
  std::int64_t step() {
    if (pairs_left_ == 0) {
      word_ = rng_();
      pairs_left_ = 32;
    }
    const auto s = static_cast<std::int64_t>(word_ & 1U) + static_cast<std::int64_t>((word_ >> 1) & 1U) - 1;
    word_ >>= 2;
    --pairs_left_;
    return s;
  }

  Xoshiro256 rng_;
  const LazyChunkTable& table_;
  std::uint64_t word_ = 0;
  int pairs_left_ = 0;
  std::int64_t t_ = 0;
  std::int64_t pos_ = 0;
  std::int64_t min_ = 0;
  std::int64_t max_ = 0;
};

bool uses_lazy_tables(const StepDistribution& dist) {
  return dist.family() == StepFamily::simple_lazy && dist.laziness() == 0.5;
}

// Generic step-by-step walker reporting new sites. Nearest-neighbour laws
// track [min, max]; the zeta law keeps a hash set of visited sites.
class SiteTracker {
 public:
  explicit SiteTracker(const StepDistribution& dist, std::int64_t expected_range)
      : interval_(dist.nearest_neighbour()) {
    if (!interval_) visited_.reserve(static_cast<std::size_t>(std::max<std::int64_t>(expected_range, 16)));
  }

  // True when `site` had not been visited before.
  bool visit(std::int64_t site) {
    if (interval_) {
      if (count_ == 0) {
        min_ = max_ = site;
      } else if (site > max_) {
        max_ = site;
      } else if (site < min_) {
        min_ = site;
      } else {
        return false;
      }
      ++count_;
      return true;
    }
    if (!visited_.insert(site).second) return false;
    ++count_;
    return true;
  }

  std::int64_t count() const noexcept { return count_; }

 private:
  bool interval_;
  std::int64_t count_ = 0;
  std::int64_t min_ = 0;
  std::int64_t max_ = 0;
  absl::flat_hash_set<std::int64_t> visited_;
};

std::int64_t expected_range_hint(const StepDistribution& dist, std::int64_t n) {
  return dist.nearest_neighbour() ? 0 : n / 2;
}

}  // namespace

RangeDiscoveries range_and_discoveries(std::span<const std::int64_t> positions) {
  RangeDiscoveries out;
  out.range.reserve(positions.size());
  absl::flat_hash_set<std::int64_t> seen;
  seen.reserve(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (seen.insert(positions[k]).second) {
      out.discovery_times.push_back(static_cast<std::int64_t>(k) + 1);
      out.discovered_sites.push_back(positions[k]);
    }
    out.range.push_back(static_cast<std::int64_t>(seen.size()));
  }
  return out;
}

WalkPath sample_walk(const StepDistribution& dist, std::int64_t n, std::uint64_t seed) {
  require_horizon(n);
  WalkPath path;
  path.n = n;
  path.positions.resize(static_cast<std::size_t>(n));
  StepSampler steps(dist, seed);
  std::int64_t pos = 0;
  for (auto& p : path.positions) {
    pos = add_wrap(pos, steps());
    p = pos;
  }
  auto rd = range_and_discoveries(path.positions);
  path.range = std::move(rd.range);
  path.discovery_times = std::move(rd.discovery_times);
  path.discovered_sites = std::move(rd.discovered_sites);
  return path;
}

Discoveries discover(const StepDistribution& dist, std::int64_t n, std::uint64_t seed) {
  require_horizon(n);
  Discoveries out;
  out.n = n;
  auto record = [&](std::int64_t t, std::int64_t site) {
    out.times.push_back(t);
    out.sites.push_back(site);
  };
  if (uses_lazy_tables(dist)) {
    LazyScanner scanner(seed);
    scanner.advance_to(n, record);
    return out;
  }
  StepSampler steps(dist, seed);
  SiteTracker tracker(dist, expected_range_hint(dist, n));
  std::int64_t pos = 0;
  for (std::int64_t t = 1; t <= n; ++t) {
    pos = add_wrap(pos, steps());
    if (tracker.visit(pos)) record(t, pos);
  }
  return out;
}

Discoveries discoveries_of(const WalkPath& path) {
  return {path.n, path.discovery_times, path.discovered_sites};
}

std::vector<std::int64_t> range_at(const StepDistribution& dist, std::span<const std::int64_t> checkpoints,
                                   std::uint64_t seed) {
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      (!checkpoints.empty() && checkpoints.front() < 0))
    throw DomainError("range_at: checkpoints must be nonnegative and nondecreasing");
  std::vector<std::int64_t> out;
  out.reserve(checkpoints.size());
  if (uses_lazy_tables(dist)) {
    LazyScanner scanner(seed);
    for (std::int64_t c : checkpoints) {
      scanner.advance_range_to(c);
      out.push_back(scanner.range());
    }
    return out;
  }
  StepSampler steps(dist, seed);
  const std::int64_t horizon = checkpoints.empty() ? 0 : checkpoints.back();
  SiteTracker tracker(dist, expected_range_hint(dist, horizon));
  std::int64_t pos = 0;
  std::int64_t t = 0;
  for (std::int64_t c : checkpoints) {
    for (; t < c; ++t) {
      pos = add_wrap(pos, steps());
      tracker.visit(pos);
    }
    out.push_back(tracker.count());
  }
  return out;
}

ReturnScan scan_returns(const StepDistribution& dist, std::int64_t n, std::uint64_t seed) {
  if (n < 0) throw DomainError("scan_returns: negative horizon");
  StepSampler steps(dist, seed);
  SiteTracker tracker(dist, expected_range_hint(dist, n));
  ReturnScan scan;
  std::int64_t pos = 0;
  for (std::int64_t t = 1; t <= n; ++t) {
    pos = add_wrap(pos, steps());
    tracker.visit(pos);
    if (pos == 0) ++scan.visits_to_origin;
  }
  scan.range = tracker.count();
  return scan;
}

QEstimate estimate_q(const StepDistribution& dist, std::int64_t n, std::size_t replicas, std::uint64_t master_seed,
                     std::size_t workers, RegimeCheck check) {
  if (check == RegimeCheck::enforce && dist.alpha() >= 1.0)
    throw RegimeError("estimate_q: q is only defined for the transient regime alpha < 1");
  require_horizon(n);
  if (replicas < 2) throw DomainError("estimate_q: need at least two replicas");
  if (workers == 0) workers = default_workers();

  const auto scans = parallel_map<ReturnScan>(replicas, workers, [&](std::size_t r) {
    return scan_returns(dist, n, replica_seed(master_seed, r));
  });
  std::vector<double> slope(replicas);
  std::size_t never_returned = 0;
  for (std::size_t r = 0; r < replicas; ++r) {
    slope[r] = static_cast<double>(scans[r].range) / static_cast<double>(n);
    if (scans[r].visits_to_origin == 0) ++never_returned;
  }
  QEstimate q;
  q.slope = mean_estimate(slope);
  q.no_return = frequency_estimate(never_returned, replicas);
  const double diff = std::abs(q.slope.value - q.no_return.value);
  const double se = std::hypot(q.slope.se, q.no_return.se);
  q.agreement_z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  return q;
}

Estimate estimate_h(const StepDistribution& dist, std::int64_t n, std::size_t replicas, std::uint64_t master_seed,
                    std::size_t workers) {
  if (n < 0) throw DomainError("estimate_h: negative horizon");
  if (n == 0) return {1.0, 0.0};
  if (replicas < 1) throw DomainError("estimate_h: need at least one replica");
  if (workers == 0) workers = default_workers();
  const auto visits = parallel_map<double>(replicas, workers, [&](std::size_t r) {
    return static_cast<double>(scan_returns(dist, n, replica_seed(master_seed, r)).visits_to_origin);
  });
  Estimate h = mean_estimate(visits);
  h.value += 1.0;
  return h;
}

}  // namespace rwrs
