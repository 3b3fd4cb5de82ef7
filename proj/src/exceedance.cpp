#include "rwrs/exceedance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "rwrs/errors.hpp"
#include "rwrs/format.hpp"

namespace rwrs {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

RegimeRule RegimeRule::transient(double q_hat, double q_se) {
  if (!(q_hat > 0.0 && q_hat <= 1.0)) throw ParameterError("transient rule: q must lie in (0, 1]");
  RegimeRule r;
  r.regime = Regime::transient;
  r.q_hat = q_hat;
  r.q_se = q_se;
  return r;
}

RegimeRule RegimeRule::boundary(double h_hat, double h_se) {
  if (!(h_hat >= 1.0)) throw ParameterError("boundary rule: h(n) is at least 1");
  RegimeRule r;
  r.regime = Regime::boundary;
  r.h_hat = h_hat;
  r.h_se = h_se;
  r.alpha = 1.0;
  return r;
}

RegimeRule RegimeRule::recurrent(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw ParameterError("recurrent rule: alpha must lie in (1, 2]");
  RegimeRule r;
  r.regime = Regime::recurrent;
  r.alpha = alpha;
  return r;
}

namespace {

// Integer part, snapping values within 1e-9 relative of an integer onto it
// so that e.g. (10^6)^(1/2) is exactly 1000.
std::int64_t integer_part(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(x));
}

}  // namespace

std::int64_t m_of_n(const RegimeRule& rule, std::int64_t n) {
  if (n < 1) throw DomainError("m_of_n: n must be at least 1");
  const auto nd = static_cast<double>(n);
  std::int64_t m = 0;
  switch (rule.regime) {
    case Regime::transient: m = integer_part(rule.q_hat * nd); break;
    case Regime::boundary: m = integer_part(nd / rule.h_hat); break;
    case Regime::recurrent: m = integer_part(std::pow(nd, 1.0 / rule.alpha)); break;
  }
  if (m < 1) throw DegenerateScaleError("m(n) rounds to zero");
  return m;
}

PointPattern build_pattern_from_heights(const Discoveries& walk, std::span<const double> scenery_values,
                                        const NormingConstants& norming, const RegimeRule& rule) {
  if (walk.n < 1) throw DomainError("build_pattern: horizon must be at least 1");
  if (scenery_values.size() != walk.times.size())
    throw DomainError("build_pattern: one scenery value per discovery is required");
  PointPattern pattern;
  pattern.n = walk.n;
  pattern.regime = rule;
  pattern.points.reserve(walk.times.size());
  const auto nd = static_cast<double>(walk.n);
  for (std::size_t k = 0; k < walk.times.size(); ++k)
    pattern.points.push_back({static_cast<double>(walk.times[k]) / nd, norming.rescale(scenery_values[k])});
  return pattern;
}

PointPattern build_pattern(const Discoveries& walk, const SceneryModel& model, const RegimeRule& rule,
                           std::uint64_t scenery_seed) {
  const std::int64_t m = m_of_n(rule, walk.n);
  const auto values = sample_scenery(model, walk.sites, scenery_seed);
  return build_pattern_from_heights(walk, values, model.norming(static_cast<double>(m)), rule);
}

PointPattern build_pattern(const WalkPath& path, const SceneryModel& model, const RegimeRule& rule,
                           std::uint64_t scenery_seed) {
  return build_pattern(discoveries_of(path), model, rule, scenery_seed);
}

namespace {

void validate(const QuerySet& query) {
  if (std::isnan(query.a) || std::isnan(query.b) || query.a < 0.0 || query.a > query.b)
    throw DomainError("query: time window must satisfy 0 <= a <= b");
  for (const auto& iv : query.heights.parts)
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) throw DomainError("query: malformed height interval");
}

}  // namespace

std::int64_t count_in(const PointPattern& pattern, const QuerySet& query) {
  validate(query);
  // t-coordinates are strictly increasing.
  const auto first = std::upper_bound(pattern.points.begin(), pattern.points.end(), query.a,
                                      [](double a, const Point& p) { return a < p.t; });
  std::int64_t count = 0;
  for (auto it = first; it != pattern.points.end() && it->t <= query.b; ++it)
    if (query.heights.contains(it->y)) ++count;
  return count;
}

bool void_in(const PointPattern& pattern, const QuerySet& query) { return count_in(pattern, query) == 0; }

void write_pattern_csv(std::ostream& os, std::span<const PointPattern> replicas) {
  os << "replica,t,y\n";
  for (std::size_t r = 0; r < replicas.size(); ++r)
    for (const auto& p : replicas[r].points) os << r << ',' << format_double(p.t) << ',' << format_double(p.y) << '\n';
}

}  // namespace rwrs
