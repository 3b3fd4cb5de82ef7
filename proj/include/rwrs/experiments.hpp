#pragma once

// Studies built from the estimators, each returning report rows: range law,
// extremal index, local dependence sums, discovery independence, O'Brien's
// theta and the block gap. Shared by the command-line tool and the
// acceptance suite.

#include <cstdint>
#include <vector>

#include "rwrs/harness.hpp"

namespace rwrs {

struct Study {
  StepDistribution walk = StepDistribution::symmetric_zeta(0.5);
  SceneryModel scenery = SceneryModel::iid(TailFamily::frechet(2.0));
  std::int64_t n = 10000;
  std::vector<std::int64_t> horizons;  // multi-horizon studies; empty: {n}
  std::size_t replicas = 1000;
  std::size_t calibration_replicas = 0;  // 0: replicas
  double tau = 1.0;
  double sigma = 3.0;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string label;  // report name prefix; empty: the study's own
};

/// Calibration stream used by the studies: stream_seed(seed, this).
inline constexpr std::uint64_t kCalibrationStream = 0xca1b;

/// mean R_{floor(nt)} / (n q_hat) within relative `tolerance` of t for each
/// t, plus agreement of the two q estimators. Transient walks only.
std::vector<TestReport> range_law_study(const Study& study, const std::vector<double>& ts, double tolerance = 0.03);

/// mu'(u_n) with n P(xi > u_n) = tau against q_hat (combined sigma).
std::vector<TestReport> extremal_index_study(const Study& study);

/// Per horizon: sum >= fraction * tau (1 - q_hat) with u normed at
/// floor(q_hat n); successive horizons non-decreasing within sigma.
std::vector<TestReport> dprime_rwrs_study(const Study& study, double fraction = 0.8);

/// Per horizon with u normed at n. iid: sum vs n r_n P(xi > u)^2 within
/// sigma, decreasing, last horizon below `vanish`. Other sceneries: sum
/// above `persist` at every horizon.
std::vector<TestReport> dprime_scenery_study(const Study& study, double vanish = 0.05, double persist = 0.2);

/// D^k sums for each k at horizon n (u normed at floor(q_hat n)); each k
/// at most the previous one within sigma.
std::vector<TestReport> dinfty_study(const Study& study, const std::vector<std::int64_t>& ks);

/// Chi-square independence of (tau_k bin, xi(S_{tau_k}) > median) and a
/// two-sample KS test of xi(S_{tau_k}) against the marginal.
std::vector<TestReport> discovery_independence_study(const Study& study, int k = 5, int bins = 5);

/// theta_hat vs the closed form when one exists, and P(M_n <= u) vs
/// exp(-n P(xi > u) theta_hat).
std::vector<TestReport> obrien_study(const Study& study);

/// Per horizon: gap below `bound`; last horizon's gap below the first's.
std::vector<TestReport> gap_study(const Study& study, double bound = 0.05);

/// Median of the scenery's stationary marginal.
double marginal_median(const SceneryModel& model);

/// Times and sites of the first k discoveries (k small).
Discoveries first_discoveries(const StepDistribution& walk, int k, std::uint64_t seed,
                              std::int64_t max_steps = 100000000);

}  // namespace rwrs
