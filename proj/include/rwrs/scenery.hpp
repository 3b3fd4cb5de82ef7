#pragma once

// Stationary random sceneries {xi(k), k in Z}, their tail families, norming
// constants (a_n, b_n) and the limit measure nu of the exceedance counts.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rwrs {

enum class TailKind { frechet, weibull, gumbel_exponential, gumbel_gaussian };

/// Extreme-value domain of a base law, with the fixed representative used
/// for simulation:
///   frechet(beta):       Pareto, P(xi > u) = u^-beta for u >= 1; E = (0, inf]
///   weibull(delta):      xi = -U^(1/delta), P(xi > u) = (-u)^delta on [-1, 0]; E = (-inf, 0]
///   gumbel_exponential:  unit exponential; E = (-inf, inf]
///   gumbel_gaussian:     standard normal; E = (-inf, inf]
/// Weibull with delta != 1 is experimental.
struct TailFamily {
  TailKind kind = TailKind::frechet;
  double shape = 1.0;

  static TailFamily frechet(double beta);
  static TailFamily weibull(double delta = 1.0);
  static TailFamily gumbel_exponential();
  static TailFamily gumbel_gaussian();

  /// Closure of the state space E.
  double lower() const;
  double upper() const;
  std::string describe() const;

  friend bool operator==(const TailFamily&, const TailFamily&) = default;
};

struct NormingConstants {
  double a = 1.0;
  double b = 0.0;
  double threshold(double x) const { return a * x + b; }
  double rescale(double value) const { return (value - b) / a; }
};

/// Norming at (real) level n >= 1 such that n P(xi > a_n x + b_n) -> nu(x, inf).
NormingConstants norming_constants(const TailFamily& tail, double level);
NormingConstants norming_constants(const TailFamily& tail, std::int64_t n);

/// Exact P(xi > u) for the base law.
double tail_prob(const TailFamily& tail, double u);

/// Inverse of tail_prob: the u with P(xi > u) = p, p in (0, 1].
double tail_quantile(const TailFamily& tail, double p);

/// nu(x, inf) = x^-beta, (-x)^delta or e^-x.
double nu_tail(const TailFamily& tail, double x);

/// The x with nu(x, inf) = tau.
double nu_tail_inverse(const TailFamily& tail, double tau);

/// Half-open interval (lo, hi]; hi may be +inf.
struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double v) const { return v > lo && v <= hi; }
};

/// Finite union of half-open intervals of E.
struct HeightSet {
  std::vector<Interval> parts;

  HeightSet() = default;
  HeightSet(double lo, double hi) : parts{{lo, hi}} {}
  explicit HeightSet(std::vector<Interval> intervals) : parts(std::move(intervals)) {}

  bool contains(double v) const;
  bool empty() const;
};

/// nu(B) by additivity over the parts of B (overlaps are merged first).
/// Throws DomainError when B leaves E or an interval is malformed.
double nu(const TailFamily& tail, const HeightSet& set);

enum class SceneryKind { iid, gaussian_ar1, moving_max };

/// Stationary scenery models.
///   iid(tail):           xi(k) i.i.d. from the tail family's base law.
///   gaussian_ar1(rho):   stationary N(0,1) AR(1), corr(xi(0), xi(k)) = rho^|k|.
///   moving_max(m, tail): xi(k) = max(eta_k, ..., eta_{k+m-1}), eta i.i.d. base law.
class SceneryModel {
 public:
  static SceneryModel iid(const TailFamily& tail);
  static SceneryModel gaussian_ar1(double rho);
  static SceneryModel moving_max(int window, const TailFamily& tail);

  SceneryKind kind() const noexcept { return kind_; }
  const TailFamily& tail() const noexcept { return tail_; }
  double rho() const noexcept { return rho_; }
  int window() const noexcept { return window_; }
  std::string describe() const;

  /// P(xi(0) > u) for the stationary marginal.
  double marginal_tail(double u) const;

  /// The marginal of moving_max(m) is tail-equivalent to m times the base
  /// tail, so it is normed at level m * n; other models at level n.
  NormingConstants norming(double level) const;

  /// u_n = a_n x + b_n with nu(x, inf) = tau, normed at `level`.
  double threshold(double tau, double level) const;

  /// P(max over `sites` <= u) when a closed form exists (iid, moving_max).
  /// Sites must be distinct.
  std::optional<double> prob_all_at_most(std::span<const std::int64_t> sites, double u) const;

 private:
  SceneryModel(SceneryKind kind, TailFamily tail, double rho, int window);

  SceneryKind kind_;
  TailFamily tail_;
  double rho_ = 0.0;
  int window_ = 1;
};

/// Largest covering interval (max - min + 1) the AR(1) sampler will walk.
inline constexpr std::int64_t kMaxAr1Span = std::int64_t{1} << 27;

/// Scenery values at `sites` (result[i] belongs to sites[i]).
///
/// iid and moving_max values are counter-based on (seed, site), so any two
/// queries with the same seed agree on common sites. gaussian_ar1 runs the
/// recursion outward from site 0 over the covering interval, which keeps
/// the same property; it throws ResourceError beyond kMaxAr1Span.
std::vector<double> sample_scenery(const SceneryModel& model, std::span<const std::int64_t> sites,
                                   std::uint64_t seed);

/// Scenery values at `sites` drawn from the law conditioned on
/// {xi(anchor) > u}. Unconditioned latent variables reuse the counter keys of
/// sample_scenery, so the two samplers share random numbers away from the
/// anchor. Requires marginal_tail(u) > 0.
std::vector<double> sample_scenery_given_exceedance(const SceneryModel& model, std::span<const std::int64_t> sites,
                                                    std::int64_t anchor, double u, std::uint64_t seed);

}  // namespace rwrs
