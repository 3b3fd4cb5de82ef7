#pragma once

// The rescaled exceedance point pattern
//   N^(n) = sum_k delta_{(tau_k / n, (xi(S_{tau_k}) - b_{m(n)}) / a_{m(n)})}
// built from one walk and one scenery realization.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rwrs/scenery.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

/// Time scale m(n): floor(q n) (transient), floor(n / h(n)) (boundary),
/// floor(n^(1/alpha)) (recurrent), with q and h(n) replaced by estimates.
struct RegimeRule {
  Regime regime = Regime::transient;
  double q_hat = 1.0;
  double q_se = 0.0;
  double h_hat = 1.0;
  double h_se = 0.0;
  double alpha = 0.5;

  static RegimeRule transient(double q_hat, double q_se = 0.0);
  static RegimeRule boundary(double h_hat, double h_se = 0.0);
  static RegimeRule recurrent(double alpha);
};

/// Throws DegenerateScaleError when m(n) rounds to zero.
std::int64_t m_of_n(const RegimeRule& rule, std::int64_t n);

struct Point {
  double t = 0.0;
  double y = 0.0;
};

struct PointPattern {
  std::vector<Point> points;
  std::int64_t n = 0;
  RegimeRule regime;
};

/// Product set (a, b] x B.
struct QuerySet {
  double a = 0.0;
  double b = 1.0;
  HeightSet heights;
};

/// One point per discovered site, heights rescaled by the model's norming
/// at level m(n). The scenery is sampled on the discovered sites only.
PointPattern build_pattern(const Discoveries& walk, const SceneryModel& model, const RegimeRule& rule,
                           std::uint64_t scenery_seed);
PointPattern build_pattern(const WalkPath& path, const SceneryModel& model, const RegimeRule& rule,
                           std::uint64_t scenery_seed);

/// Pattern from scenery values supplied for each discovery, in discovery order.
PointPattern build_pattern_from_heights(const Discoveries& walk, std::span<const double> scenery_values,
                                        const NormingConstants& norming, const RegimeRule& rule);

/// Points with t in (a, b] and y in B. Throws DomainError if a > b, a < 0
/// or B has a malformed interval.
std::int64_t count_in(const PointPattern& pattern, const QuerySet& query);
bool void_in(const PointPattern& pattern, const QuerySet& query);

/// CSV with header `replica,t,y`, one row per point, shortest round-trip decimals.
void write_pattern_csv(std::ostream& os, std::span<const PointPattern> replicas);

}  // namespace rwrs
