#include "rwrs/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rwrs/errors.hpp"
#include "rwrs/experiments.hpp"
#include "rwrs/extremal.hpp"
#include "rwrs/format.hpp"
#include "rwrs/harness.hpp"
#include "rwrs/mixing.hpp"

namespace rwrs {

namespace {

constexpr const char* kVersion = "1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw UsageError("not a number: '" + text + "'");
  return v;
}

std::int64_t parse_count(const std::string& text) {
  const double v = parse_number(text);
  if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 9e18) throw UsageError("not an integer: '" + text + "'");
  return static_cast<std::int64_t>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::pair<double, double> parse_pair(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("expected 'lo,hi', got '" + text + "'");
  return {parse_number(parts[0]), parse_number(parts[1])};
}

std::vector<std::int64_t> parse_counts(const std::vector<std::string>& items) {
  std::vector<std::int64_t> out;
  for (const auto& item : items)
    for (const auto& part : split(item, ',')) out.push_back(parse_count(part));
  return out;
}

std::vector<double> parse_numbers(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items)
    for (const auto& part : split(item, ',')) out.push_back(parse_number(part));
  return out;
}

TailFamily parse_tail(const std::string& text) {
  if (text == "gumbel-exp") return TailFamily::gumbel_exponential();
  if (text == "gumbel-gauss") return TailFamily::gumbel_gaussian();
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const double shape = colon == std::string::npos ? 1.0 : parse_number(text.substr(colon + 1));
  if (kind == "frechet") {
    if (colon == std::string::npos) throw UsageError("frechet tail needs a shape, e.g. frechet:2");
    return TailFamily::frechet(shape);
  }
  if (kind == "weibull") return TailFamily::weibull(shape);
  throw UsageError("unknown tail '" + text + "' (frechet:B, weibull:D, gumbel-exp, gumbel-gauss)");
}

SceneryModel parse_scenery(const std::string& text, const TailFamily& tail) {
  if (text == "iid") return SceneryModel::iid(tail);
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (colon == std::string::npos) throw UsageError("scenery '" + text + "' needs a parameter");
  const std::string arg = text.substr(colon + 1);
  if (kind == "ar1") return SceneryModel::gaussian_ar1(parse_number(arg));
  if (kind == "moving-max") return SceneryModel::moving_max(static_cast<int>(parse_count(arg)), tail);
  throw UsageError("unknown scenery '" + text + "' (iid, ar1:RHO, moving-max:M)");
}

struct Options {
  std::string walk = "zeta";
  double alpha = 0.5;
  double p0 = 0.5;
  std::string tail = "frechet:2";
  std::string scenery = "iid";
  std::string n = "10000";
  std::string replicas;
  std::string calib_replicas;
  std::uint64_t seed = 1;
  std::vector<std::string> windows;
  std::vector<std::string> heights;
  double tau = 1.0;
  double sigma = 3.0;
  std::vector<std::string> ks;
  std::vector<std::string> horizons;
  std::vector<std::string> ts;
  double tolerance = 0.03;
  int discovery_k = 5;
  std::string cox_resolution = "0";
  std::string cox_replicas = "0";
  std::optional<double> q_hat;
  std::optional<double> h_hat;
  std::string which;
  std::size_t workers = 0;
  std::string out = "out";
  bool timing = false;
};

StepDistribution make_walk(const Options& o, const CLI::App& app) {
  if (o.walk == "zeta") return StepDistribution::symmetric_zeta(o.alpha);
  if (o.walk == "lazy") {
    if (app.count("--alpha") > 0 && o.alpha != 2.0) throw UsageError("the lazy walk has alpha = 2");
    return StepDistribution::simple_lazy(o.p0);
  }
  if (o.walk == "drift") return StepDistribution::drift();
  throw UsageError("unknown walk '" + o.walk + "' (zeta, lazy, drift)");
}

std::vector<QuerySet> make_queries(const Options& o) {
  const std::vector<std::string> windows = o.windows.empty() ? std::vector<std::string>{"0,1"} : o.windows;
  const std::vector<std::string> heights = o.heights.empty() ? std::vector<std::string>{"1,inf"} : o.heights;
  if (windows.size() != heights.size() && windows.size() != 1 && heights.size() != 1)
    throw UsageError("give one --height per --window, or a single one of either");
  const std::size_t count = std::max(windows.size(), heights.size());
  std::vector<QuerySet> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto [a, b] = parse_pair(windows[windows.size() == 1 ? 0 : i]);
    const auto [lo, hi] = parse_pair(heights[heights.size() == 1 ? 0 : i]);
    out.push_back({a, b, HeightSet(lo, hi)});
  }
  return out;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json effective_config(const CLI::App& app) {
  nlohmann::json cfg = nlohmann::json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_lnames().empty() ? std::string{} : opt->get_lnames().front();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (res.size() == 1)
        cfg[name] = res.front();
      else
        cfg[name] = res;
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

class Run {
 public:
  Run(const Options& o, const CLI::App& app, std::string command, std::ostream& out)
      : o_(o), app_(app), command_(std::move(command)), out_(out), started_(utc_now()) {
    std::filesystem::create_directories(o.out);
  }

  std::size_t replicas(std::size_t fallback) const {
    return o_.replicas.empty() ? fallback : static_cast<std::size_t>(parse_count(o_.replicas));
  }

  std::filesystem::path path(const std::string& file) {
    outputs_.push_back(file);
    return std::filesystem::path(o_.out) / file;
  }

  int finish_reports(const std::vector<TestReport>& reports) {
    std::ofstream csv(path("report.csv"), std::ios::binary);
    write_reports_csv(csv, reports, o_.timing ? Timing::include : Timing::omit);
    write_summary(out_, reports);
    bool failed = false;
    for (const auto& r : reports) failed |= r.verdict == Verdict::fail;
    write_manifest();
    return failed ? 1 : 0;
  }

  void write_manifest() {
    nlohmann::json m;
    m["tool"] = "rwrs";
    m["version"] = kVersion;
    m["command"] = command_;
    m["master_seed"] = o_.seed;
    m["config"] = effective_config(app_);
    m["started_at"] = started_;
    m["finished_at"] = utc_now();
    m["outputs"] = outputs_;
    std::ofstream f(std::filesystem::path(o_.out) / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
  }

 private:
  const Options& o_;
  const CLI::App& app_;
  std::string command_;
  std::ostream& out_;
  std::string started_;
  std::vector<std::string> outputs_;
};

RegimeRule rule_for(const Options& o, const StepDistribution& walk, std::int64_t n, std::size_t calib) {
  if (o.q_hat) return RegimeRule::transient(*o.q_hat);
  if (o.h_hat) return RegimeRule::boundary(*o.h_hat);
  return calibrate(walk, n, calib, stream_seed(o.seed, kCalibrationStream), o.workers);
}

int run(const Options& o, const CLI::App& app, const std::string& command, std::ostream& out) {
  const auto walk = make_walk(o, app);
  const auto tail = parse_tail(o.tail);
  const auto scenery = parse_scenery(o.scenery, tail);
  const std::int64_t n = parse_count(o.n);
  Run run(o, app, command, out);

  Study study;
  study.walk = walk;
  study.scenery = scenery;
  study.n = n;
  study.horizons = parse_counts(o.horizons);
  study.replicas = run.replicas(1000);
  study.calibration_replicas = o.calib_replicas.empty() ? 0 : static_cast<std::size_t>(parse_count(o.calib_replicas));
  study.tau = o.tau;
  study.sigma = o.sigma;
  study.seed = o.seed;
  study.workers = o.workers;
  const std::size_t calib = study.calibration_replicas > 0 ? study.calibration_replicas : study.replicas;

  ExperimentConfig config;
  config.walk = walk;
  config.scenery = scenery;
  config.n = n;
  config.master_seed = o.seed;
  config.sigma = o.sigma;
  config.workers = o.workers;

  if (command == "range-law") {
    const auto ts = o.ts.empty() ? std::vector<double>{0.25, 0.5, 1.0} : parse_numbers(o.ts);
    return run.finish_reports(range_law_study(study, ts, o.tolerance));
  }
  if (command == "calibrate") {
    const auto rule = rule_for(o, walk, n, run.replicas(1000));
    std::ofstream csv(run.path("calibration.csv"), std::ios::binary);
    csv << "regime,q_hat,q_se,h_hat,h_se,alpha,m\n"
        << to_string(rule.regime) << ',' << format_double(rule.q_hat) << ',' << format_double(rule.q_se) << ','
        << format_double(rule.h_hat) << ',' << format_double(rule.h_se) << ',' << format_double(rule.alpha) << ','
        << m_of_n(rule, n) << '\n';
    out << "regime " << to_string(rule.regime) << ", m(n) = " << m_of_n(rule, n) << '\n';
    run.write_manifest();
    return 0;
  }
  if (command == "simulate") {
    config.replicas = run.replicas(1);
    const auto rule = rule_for(o, walk, n, calib);
    const auto patterns = simulate_patterns(config, rule);
    std::ofstream csv(run.path("patterns.csv"), std::ios::binary);
    write_pattern_csv(csv, patterns);
    out << patterns.size() << " replicas written\n";
    run.write_manifest();
    return 0;
  }
  if (command == "verify-poisson" || command == "verify-cox") {
    config.replicas = study.replicas;
    config.queries = make_queries(o);
    if (command == "verify-cox") {
      if (o.heights.empty()) config.queries = {};
      if (config.queries.empty()) {
        const auto windows = o.windows.empty() ? std::vector<std::string>{"0,1"} : o.windows;
        for (const auto& w : windows) {
          const auto [a, b] = parse_pair(w);
          config.queries.push_back({a, b, HeightSet(0.0, std::numeric_limits<double>::infinity())});
        }
      }
      config.label = "cox";
      CoxSettings cox{parse_count(o.cox_resolution), static_cast<std::size_t>(parse_count(o.cox_replicas))};
      return run.finish_reports(verify_cox(config, cox));
    }
    const auto rule = rule_for(o, walk, n, calib);
    return run.finish_reports(verify_poisson(config, rule));
  }
  if (command == "extremal-index") return run.finish_reports(extremal_index_study(study));
  if (command == "obrien") return run.finish_reports(obrien_study(study));
  if (command == "theorem6") {
    if (study.horizons.empty()) study.horizons = {1000, 10000};
    return run.finish_reports(gap_study(study));
  }
  if (command == "mixing") {
    if (o.which == "dprime-scenery") {
      if (study.horizons.empty()) study.horizons = {1000, 10000, 100000};
      return run.finish_reports(dprime_scenery_study(study));
    }
    if (o.which == "dprime-rwrs") {
      if (study.horizons.empty()) study.horizons = {1000, 10000};
      return run.finish_reports(dprime_rwrs_study(study));
    }
    if (o.which == "dinfty") {
      const auto ks = o.ks.empty() ? std::vector<std::int64_t>{1, 2, 4, 8, 16} : parse_counts(o.ks);
      return run.finish_reports(dinfty_study(study, ks));
    }
    throw UsageError("mixing needs --which dprime-scenery|dprime-rwrs|dinfty");
  }
  if (command == "discovery-independence") return run.finish_reports(discovery_independence_study(study, o.discovery_k));
  throw UsageError("unknown subcommand " + command);
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random walks in random scenery: exceedance point processes and their limits", "rwrs"};
  app.set_config("--config", "", "INI file of option=value lines; flags win");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  Options o;
  app.add_option("--walk", o.walk, "zeta | lazy | drift")->capture_default_str();
  app.add_option("--alpha", o.alpha, "stability index of the zeta walk")->capture_default_str();
  app.add_option("--p0", o.p0, "holding probability of the lazy walk")->capture_default_str();
  app.add_option("--tail", o.tail, "frechet:B | weibull:D | gumbel-exp | gumbel-gauss")->capture_default_str();
  app.add_option("--scenery", o.scenery, "iid | ar1:RHO | moving-max:M")->capture_default_str();
  app.add_option("--n", o.n, "horizon")->capture_default_str();
  app.add_option("--replicas", o.replicas, "Monte Carlo replicas");
  app.add_option("--calib-replicas", o.calib_replicas, "replicas of the time-scale calibration");
  app.add_option("--seed", o.seed, "master seed")->capture_default_str();
  app.add_option("--window", o.windows, "time window a,b (repeatable)");
  app.add_option("--height", o.heights, "height interval lo,hi; inf allowed (repeatable)");
  app.add_option("--tau", o.tau, "n P(xi > u_n)")->capture_default_str();
  app.add_option("--sigma", o.sigma, "verdict band in standard errors")->capture_default_str();
  app.add_option("--k", o.ks, "D^k indices, comma separated");
  app.add_option("--horizons", o.horizons, "horizons of multi-n studies, comma separated");
  app.add_option("--t", o.ts, "range-law time points, comma separated");
  app.add_option("--tolerance", o.tolerance, "relative band of the range law")->capture_default_str();
  app.add_option("--discovery-k", o.discovery_k, "discovery index of the independence check")->capture_default_str();
  app.add_option("--cox-resolution", o.cox_resolution, "steps of the Cox reference walk (0: 10 n)")
      ->capture_default_str();
  app.add_option("--cox-replicas", o.cox_replicas, "replicas of the Cox reference (0: --replicas)")
      ->capture_default_str();
  app.add_option("--q-hat", o.q_hat, "use this q instead of calibrating");
  app.add_option("--h-hat", o.h_hat, "use this h(n) instead of calibrating");
  app.add_option("--which", o.which, "mixing sum: dprime-scenery | dprime-rwrs | dinfty");
  app.add_option("--workers", o.workers, "worker threads (0: RWRS_WORKERS or all cores)")
      ->envname("RWRS_WORKERS")
      ->capture_default_str();
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_flag("--timing", o.timing, "write runtimes into report.csv");

  const char* commands[][2] = {
      {"range-law", "range growth R_[nt]/(n q) against t"},
      {"calibrate", "estimate q or h(n) for the time scale m(n)"},
      {"simulate", "write exceedance point patterns"},
      {"verify-poisson", "void, mean, fit and independence checks against the Poisson limit"},
      {"verify-cox", "void and mean checks against the Cox limit"},
      {"extremal-index", "mu'(u_n) against q"},
      {"obrien", "O'Brien's theta for a plain scenery"},
      {"theorem6", "gap between P(M <= u) and exp(-block leader sum)"},
      {"mixing", "local dependence sums (--which)"},
      {"discovery-independence", "independence of discovery times and the scenery"},
  };
  for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "rwrs: " << e.what() << '\n';
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(o, app, command, out);
  } catch (const UsageError& e) {
    err << "rwrs: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "rwrs " << command << ": " << e.what() << '\n';
    return 2;
  }
}

}  // namespace rwrs
