#pragma once

// Replication engine and statistical verdicts: calibration of the time
// scale, Poisson and Cox verification of the exceedance point process, and
// the report rows they produce.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwrs/exceedance.hpp"
#include "rwrs/scenery.hpp"
#include "rwrs/walk.hpp"

namespace rwrs {

enum class Verdict { pass, fail, undefined };
std::string to_string(Verdict verdict);

/// How a report's estimate is held against its reference.
///   within_sigma:    |estimate - reference| <= tolerance * se
///   within_relative: |estimate - reference| <= tolerance * |reference|
///   at_least:        estimate >= reference - tolerance * se
///   at_most:         estimate <= reference + tolerance * se
///   below:           estimate < reference
///   above:           estimate > reference
enum class Comparison { within_sigma, within_relative, at_least, at_most, below, above };

/// `se` is the combined standard error of estimate - reference.
struct TestReport {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double reference = 0.0;
  Verdict verdict = Verdict::undefined;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  Comparison comparison = Comparison::within_sigma;
  double tolerance = 3.0;
  std::string note;
};

/// Sets the verdict from the comparison; a NaN estimate is undefined.
TestReport& judge(TestReport& report);

enum class Timing { include, omit };

/// CSV `name,estimate,se,reference,verdict,runtime_ms,seed`. With
/// Timing::omit the runtime field is left empty so reruns are byte-identical.
void write_reports_csv(std::ostream& os, std::span<const TestReport> reports, Timing timing = Timing::omit);

/// One line per report plus a pass/fail tally.
void write_summary(std::ostream& os, std::span<const TestReport> reports);

bool all_pass(std::span<const TestReport> reports);

struct ExperimentConfig {
  StepDistribution walk = StepDistribution::symmetric_zeta(0.5);
  SceneryModel scenery = SceneryModel::iid(TailFamily::frechet(2.0));
  std::int64_t n = 10000;
  std::size_t replicas = 1000;
  std::uint64_t master_seed = 1;
  std::vector<QuerySet> queries;
  double sigma = 3.0;
  /// Test the pairwise correlation of counts on disjoint query sets.
  bool independence = true;
  std::size_t workers = 0;
  /// Prefix of report names.
  std::string label = "poisson";
};

/// Fills q_hat (transient, slope estimator at horizon n) or h_hat (boundary);
/// recurrent walks need no estimation and drift walks have q = 1 exactly.
/// Throws DomainError for n < 1000 when estimation is needed and
/// RegimeError when `expected` disagrees with the walk's regime.
RegimeRule calibrate(const StepDistribution& walk, std::int64_t n, std::size_t replicas, std::uint64_t seed,
                     std::size_t workers = 0, std::optional<Regime> expected = std::nullopt);

/// Patterns of replicas [0, M): replica r uses replica_seed(master, r) with
/// the walk and scenery sub-streams.
PointPattern simulate_replica(const ExperimentConfig& config, const RegimeRule& rule, std::size_t replica);
std::vector<PointPattern> simulate_patterns(const ExperimentConfig& config, const RegimeRule& rule);

/// counts[r][i] = N(I_i) in replica r.
using CountTable = std::vector<std::vector<std::int64_t>>;
CountTable simulate_counts(const ExperimentConfig& config, const RegimeRule& rule);

/// Source of per-replica counts, one entry per query set.
using CountSource = std::function<std::vector<std::int64_t>(std::size_t replica)>;

/// Void, mean, chi-square fit and (disjoint sets) correlation checks of a
/// count table against the Poisson limit of the model's tail. `relative_error`
/// is the relative standard error of the time-scale calibration; it widens
/// the void and mean bands by the delta method.
std::vector<TestReport> poisson_checks(const CountTable& counts, const ExperimentConfig& config,
                                       double relative_error = 0.0);

/// Throws RegimeError unless the walk is transient or boundary and matches `rule`.
std::vector<TestReport> verify_poisson(const ExperimentConfig& config, const RegimeRule& rule);

/// Same checks with counts drawn from `source` instead of the walk.
std::vector<TestReport> verify_poisson_with(const ExperimentConfig& config, const CountSource& source);

struct CoxSettings {
  std::int64_t resolution = 0;  // 0: 10 n
  std::size_t replicas = 0;     // 0: config.replicas
};

/// Void frequency vs cox_void_mc and mean count vs E[Z] nu(B), each with
/// both Monte Carlo layers in the combined sigma. Throws RegimeError unless
/// alpha in (1, 2].
std::vector<TestReport> verify_cox(const ExperimentConfig& config, const CoxSettings& cox = {});

/// Same checks with counts drawn from `source` instead of the walk.
std::vector<TestReport> verify_cox_with(const ExperimentConfig& config, const CountSource& source,
                                        const CoxSettings& cox = {});

bool disjoint(const QuerySet& x, const QuerySet& y);

/// "(a;b]x(lo;hi]u..." rendering without commas, for report notes.
std::string describe(const QuerySet& query);

}  // namespace rwrs
