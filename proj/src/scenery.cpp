#include "rwrs/scenery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "rwrs/errors.hpp"
#include "rwrs/rng.hpp"

namespace rwrs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gaussian_tail(double u) { return 0.5 * std::erfc(u / std::numbers::sqrt2); }

double gaussian_tail_quantile(double p) {
  if (p >= 1.0) return -kInf;
  if (p <= 0.0) return kInf;
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

// 1 - (1 - p)^m without cancellation.
double one_minus_power(double p, double m) {
  if (p >= 1.0) return 1.0;
  return -std::expm1(m * std::log1p(-p));
}

}  // namespace

TailFamily TailFamily::frechet(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("frechet: beta must be positive");
  return {TailKind::frechet, beta};
}

TailFamily TailFamily::weibull(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("weibull: delta must be positive");
  return {TailKind::weibull, delta};
}

TailFamily TailFamily::gumbel_exponential() { return {TailKind::gumbel_exponential, 1.0}; }
TailFamily TailFamily::gumbel_gaussian() { return {TailKind::gumbel_gaussian, 1.0}; }

double TailFamily::lower() const {
  switch (kind) {
    case TailKind::frechet: return 0.0;
    case TailKind::weibull: return -kInf;
    default: return -kInf;
  }
}

double TailFamily::upper() const { return kind == TailKind::weibull ? 0.0 : kInf; }

std::string TailFamily::describe() const {
  std::ostringstream os;
  switch (kind) {
    case TailKind::frechet: os << "frechet:" << shape; break;
    case TailKind::weibull: os << "weibull:" << shape; break;
    case TailKind::gumbel_exponential: os << "gumbel-exp"; break;
    case TailKind::gumbel_gaussian: os << "gumbel-gauss"; break;
  }
  return os.str();
}

NormingConstants norming_constants(const TailFamily& tail, double level) {
  if (!(level >= 1.0)) throw DomainError("norming_constants: level must be at least 1");
  switch (tail.kind) {
    case TailKind::frechet: return {std::pow(level, 1.0 / tail.shape), 0.0};
    case TailKind::weibull: return {std::pow(level, -1.0 / tail.shape), 0.0};
    case TailKind::gumbel_exponential: return {1.0, std::log(level)};
    case TailKind::gumbel_gaussian: {
      if (!(level > 1.0)) throw DomainError("norming_constants: gaussian norming needs level > 1");
      const double root = std::sqrt(2.0 * std::log(level));
      const double b = root - (std::log(std::log(level)) + std::log(4.0 * std::numbers::pi)) / (2.0 * root);
      return {1.0 / root, b};
    }
  }
  return {};
}

NormingConstants norming_constants(const TailFamily& tail, std::int64_t n) {
  if (n < 1) throw DomainError("norming_constants: n must be at least 1");
  return norming_constants(tail, static_cast<double>(n));
}

double tail_prob(const TailFamily& tail, double u) {
  switch (tail.kind) {
    case TailKind::frechet: return u < 1.0 ? 1.0 : std::pow(u, -tail.shape);
    case TailKind::weibull:
      if (u < -1.0) return 1.0;
      if (u >= 0.0) return 0.0;
      return std::pow(-u, tail.shape);
    case TailKind::gumbel_exponential: return u < 0.0 ? 1.0 : std::exp(-u);
    case TailKind::gumbel_gaussian: return gaussian_tail(u);
  }
  return 0.0;
}

double tail_quantile(const TailFamily& tail, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("tail_quantile: probability must lie in (0, 1]");
  switch (tail.kind) {
    case TailKind::frechet: return std::pow(p, -1.0 / tail.shape);
    case TailKind::weibull: return -std::pow(p, 1.0 / tail.shape);
    case TailKind::gumbel_exponential: return -std::log(p);
    case TailKind::gumbel_gaussian: return gaussian_tail_quantile(p);
  }
  return 0.0;
}

double nu_tail(const TailFamily& tail, double x) {
  switch (tail.kind) {
    case TailKind::frechet:
      if (x <= 0.0) return kInf;
      return std::pow(x, -tail.shape);
    case TailKind::weibull:
      if (x >= 0.0) return 0.0;
      return std::pow(-x, tail.shape);
    case TailKind::gumbel_exponential:
    case TailKind::gumbel_gaussian: return std::exp(-x);
  }
  return 0.0;
}

double nu_tail_inverse(const TailFamily& tail, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("nu_tail_inverse: tau must be positive and finite");
  switch (tail.kind) {
    case TailKind::frechet: return std::pow(tau, -1.0 / tail.shape);
    case TailKind::weibull: return -std::pow(tau, 1.0 / tail.shape);
    case TailKind::gumbel_exponential:
    case TailKind::gumbel_gaussian: return -std::log(tau);
  }
  return 0.0;
}

bool HeightSet::contains(double v) const {
  return std::any_of(parts.begin(), parts.end(), [v](const Interval& iv) { return iv.contains(v); });
}

bool HeightSet::empty() const {
  return std::all_of(parts.begin(), parts.end(), [](const Interval& iv) { return !(iv.lo < iv.hi); });
}

double nu(const TailFamily& tail, const HeightSet& set) {
  std::vector<Interval> parts;
  for (const auto& iv : set.parts) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi)
      throw DomainError("nu: malformed interval");
    if (iv.lo == iv.hi) continue;
    if (iv.lo < tail.lower() || iv.hi > tail.upper())
      throw DomainError("nu: interval leaves the state space of " + tail.describe());
    parts.push_back(iv);
  }
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : parts) {
    if (!merged.empty() && iv.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    else
      merged.push_back(iv);
  }
  double total = 0.0;
  for (const auto& iv : merged) total += nu_tail(tail, iv.lo) - nu_tail(tail, iv.hi);
  return total;
}

SceneryModel::SceneryModel(SceneryKind kind, TailFamily tail, double rho, int window)
    : kind_(kind), tail_(tail), rho_(rho), window_(window) {}

SceneryModel SceneryModel::iid(const TailFamily& tail) { return {SceneryKind::iid, tail, 0.0, 1}; }

SceneryModel SceneryModel::gaussian_ar1(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw ParameterError("gaussian_ar1: rho must lie in (-1, 1)");
  return {SceneryKind::gaussian_ar1, TailFamily::gumbel_gaussian(), rho, 1};
}

SceneryModel SceneryModel::moving_max(int window, const TailFamily& tail) {
  if (window < 1) throw ParameterError("moving_max: window must be at least 1");
  return {SceneryKind::moving_max, tail, 0.0, window};
}

std::string SceneryModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SceneryKind::iid: os << "iid(" << tail_.describe() << ")"; break;
    case SceneryKind::gaussian_ar1: os << "ar1(rho=" << rho_ << ")"; break;
    case SceneryKind::moving_max: os << "moving-max(m=" << window_ << "," << tail_.describe() << ")"; break;
  }
  return os.str();
}

double SceneryModel::marginal_tail(double u) const {
  switch (kind_) {
    case SceneryKind::iid: return tail_prob(tail_, u);
    case SceneryKind::gaussian_ar1: return gaussian_tail(u);
    case SceneryKind::moving_max: return one_minus_power(tail_prob(tail_, u), window_);
  }
  return 0.0;
}

NormingConstants SceneryModel::norming(double level) const {
  const double factor = kind_ == SceneryKind::moving_max ? static_cast<double>(window_) : 1.0;
  return norming_constants(tail_, factor * level);
}

double SceneryModel::threshold(double tau, double level) const {
  return norming(level).threshold(nu_tail_inverse(tail_, tau));
}

std::optional<double> SceneryModel::prob_all_at_most(std::span<const std::int64_t> sites, double u) const {
  switch (kind_) {
    case SceneryKind::iid: {
      const double p = tail_prob(tail_, u);
      if (sites.empty()) return 1.0;
      if (p >= 1.0) return 0.0;
      return std::exp(static_cast<double>(sites.size()) * std::log1p(-p));
    }
    case SceneryKind::moving_max: {
      if (sites.empty()) return 1.0;
      std::vector<std::int64_t> sorted(sites.begin(), sites.end());
      std::sort(sorted.begin(), sorted.end());
      // Size of the union of latent windows [s, s + m - 1].
      std::int64_t latent = 0;
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        const std::int64_t reach = i + 1 < sorted.size() ? sorted[i + 1] - sorted[i] : window_;
        latent += std::min<std::int64_t>(reach, window_);
      }
      const double p = tail_prob(tail_, u);
      if (p >= 1.0) return 0.0;
      return std::exp(static_cast<double>(latent) * std::log1p(-p));
    }
    case SceneryKind::gaussian_ar1: return std::nullopt;
  }
  return std::nullopt;
}

namespace {

double base_value(const TailFamily& tail, std::uint64_t seed, std::int64_t site) {
  return tail_quantile(tail, to_open_unit(site_key(seed, site)));
}

double innovation(std::uint64_t seed, std::int64_t site) {
  return gaussian_tail_quantile(to_open_unit(site_key(seed, site)));
}

// AR(1) values at `sites`, running the recursion outward from `origin`
// whose value is given. Forward and backward recursions are both exact
// because the stationary Gaussian AR(1) is reversible.
std::vector<double> ar1_from_origin(double rho, std::span<const std::int64_t> sites, std::int64_t origin,
                                    double origin_value, std::uint64_t seed) {
  std::vector<double> out(sites.size());
  if (sites.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(sites.begin(), sites.end());
  const std::int64_t lo = std::min(*lo_it, origin);
  const std::int64_t hi = std::max(*hi_it, origin);
  if (static_cast<double>(hi) - static_cast<double>(lo) + 1.0 > static_cast<double>(kMaxAr1Span))
    throw ResourceError("gaussian_ar1: covering interval exceeds the span limit");

  std::vector<std::size_t> order(sites.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sites[a] < sites[b]; });
  const double scale = std::sqrt(1.0 - rho * rho);

  // Sites at or above the origin, ascending.
  auto it = std::partition_point(order.begin(), order.end(), [&](std::size_t i) { return sites[i] < origin; });
  double x = origin_value;
  std::int64_t t = origin;
  for (auto j = it; j != order.end(); ++j) {
    for (; t < sites[*j]; ) {
      ++t;
      x = rho * x + scale * innovation(seed, t);
    }
    out[*j] = x;
  }
  // Sites below the origin, descending.
  x = origin_value;
  t = origin;
  for (auto j = std::make_reverse_iterator(it); j != order.rend(); ++j) {
    for (; t > sites[*j]; ) {
      --t;
      x = rho * x + scale * innovation(seed, t);
    }
    out[*j] = x;
  }
  return out;
}

}  // namespace

std::vector<double> sample_scenery(const SceneryModel& model, std::span<const std::int64_t> sites, std::uint64_t seed) {
  std::vector<double> out(sites.size());
  switch (model.kind()) {
    case SceneryKind::iid:
      for (std::size_t i = 0; i < sites.size(); ++i) out[i] = base_value(model.tail(), seed, sites[i]);
      return out;
    case SceneryKind::moving_max:
      for (std::size_t i = 0; i < sites.size(); ++i) {
        double v = -kInf;
        for (int j = 0; j < model.window(); ++j) v = std::max(v, base_value(model.tail(), seed, sites[i] + j));
        out[i] = v;
      }
      return out;
    case SceneryKind::gaussian_ar1:
      if (sites.empty()) return out;
      return ar1_from_origin(model.rho(), sites, 0, innovation(seed, 0), seed);
  }
  return out;
}

std::vector<double> sample_scenery_given_exceedance(const SceneryModel& model, std::span<const std::int64_t> sites,
                                                    std::int64_t anchor, double u, std::uint64_t seed) {
  const double p = model.marginal_tail(u);
  if (!(p > 0.0)) throw DomainError("conditional scenery: threshold lies above the support");
  std::vector<double> out(sites.size());
  const TailFamily& tail = model.tail();

  switch (model.kind()) {
    case SceneryKind::iid:
      for (std::size_t i = 0; i < sites.size(); ++i) {
        const double w = to_open_unit(site_key(seed, sites[i]));
        out[i] = tail_quantile(tail, sites[i] == anchor ? p * w : w);
      }
      return out;

    case SceneryKind::moving_max: {
      // Latent window of the anchor: J = first latent index above u.
      // P(J = j) = F^j (1 - F) / (1 - F^m), earlier latents <= u, later ones free.
      const int m = model.window();
      const double pb = tail_prob(tail, u);
      const double total = one_minus_power(pb, m);
      const double w_j = to_open_unit(site_key(stream_seed(seed, 0x51), anchor)) * total;
      int first = m - 1;
      for (int j = 0; j < m; ++j) {
        if (w_j <= one_minus_power(pb, j + 1)) {
          first = j;
          break;
        }
      }
      auto latent = [&](std::int64_t k) {
        const double w = to_open_unit(site_key(seed, k));
        const std::int64_t offset = k - anchor;
        if (offset < 0 || offset >= m) return tail_quantile(tail, w);
        if (offset < first) return tail_quantile(tail, pb + w * (1.0 - pb));
        if (offset == first) return tail_quantile(tail, pb * w);
        return tail_quantile(tail, w);
      };
      for (std::size_t i = 0; i < sites.size(); ++i) {
        double v = -kInf;
        for (int j = 0; j < m; ++j) v = std::max(v, latent(sites[i] + j));
        out[i] = v;
      }
      return out;
    }

    case SceneryKind::gaussian_ar1: {
      if (sites.empty()) return out;
      const double start = gaussian_tail_quantile(p * to_open_unit(site_key(seed, anchor)));
      return ar1_from_origin(model.rho(), sites, anchor, start, seed);
    }
  }
  return out;
}

}  // namespace rwrs
