#pragma once

// Monte Carlo experiments: repeated generate -> learn -> compare runs over a
// grid of sample sizes and regularization schedules.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clthres/forest.hpp"
#include "clthres/learn.hpp"

namespace clthres::harness {

struct TopologySpec {
  enum class Kind { kStar, kRandom };
  Kind kind = Kind::kStar;
  int d = 21;
  int k = 10;
  /// Star only.
  double crossover = 0.3;
  /// Random only.
  int r = 2;
  std::uint64_t model_seed = 1;
  double min_entry = 0.01;
  double min_edge_mi = 0.0;
};

/// Throws std::invalid_argument for an invalid topology.
ForestModel build_truth(const TopologySpec& t);

struct ExperimentConfig {
  TopologySpec topology;
  std::vector<int> n_grid;
  /// Power-schedule exponents, each in (0, 1).
  std::vector<double> beta_grid;
  /// Adds a fixed-threshold schedule column. `oracle_half_imin` uses half of
  /// the truth's smallest edge MI; otherwise `oracle_eps` is used as given.
  bool oracle_half_imin = false;
  std::optional<double> oracle_eps;
  int trials = 100;
  std::uint64_t master_seed = 1;
  /// 0 means one worker per hardware thread.
  int threads = 0;
  std::string records_path;
  std::string summary_path;
  std::string manifest_path;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ExperimentConfig& cfg);

/// d = 21, k = 10, crossover 0.3, 400 trials: minutes on a laptop.
ExperimentConfig desk_profile();
/// d = 101, k = 50, crossover 0.3, 30000 trials.
ExperimentConfig paper_profile();

/// One schedule column of a sweep. `beta` is NaN for fixed thresholds.
struct ScheduleSpec {
  std::string label;
  double beta;
  RegSchedule schedule;
};

/// The schedules a config expands to, power schedules first in grid order.
std::vector<ScheduleSpec> expand_schedules(const ExperimentConfig& cfg, const ForestModel& truth);

struct ExperimentRecord {
  int trial = 0;
  int n = 0;
  std::string schedule;
  double beta = 0.0;
  double eps = 0.0;
  int k = 0;
  int k_hat = 0;
  /// Learned edge set differs from the truth.
  bool err_structure = false;
  bool over = false;
  bool under = false;
  /// The top-k edges of the Chow-Liu ranking differ from the truth.
  bool err_top_k = false;
  /// D(P || P*), nats.
  double kl = 0.0;
  /// D(P || P*) - D(P || P~), nats.
  double risk = 0.0;
};

/// Seed of a single trial; any cell can be replayed from it alone.
std::uint64_t trial_seed(std::uint64_t master, int n, double beta, int trial);

/// Runs one trial against a fixed truth. `forest_gap` is D(P || P~), zero for
/// forest-structured truths.
ExperimentRecord run_trial(const ForestModel& truth, int n, const ScheduleSpec& sched, int trial,
                           std::uint64_t seed, double forest_gap = 0.0);

struct ProportionEstimate {
  long successes = 0;
  long trials = 0;
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval; z defaults to the two-sided 95% quantile.
ProportionEstimate wilson_interval(long successes, long trials, double z = 1.959963984540054);
bool intervals_overlap(const ProportionEstimate& a, const ProportionEstimate& b);

struct CellSummary {
  int n = 0;
  std::string schedule;
  double beta = 0.0;
  double eps = 0.0;
  ProportionEstimate err_structure;
  ProportionEstimate over;
  ProportionEstimate under;
  ProportionEstimate err_top_k;
  double mean_k_hat = 0.0;
  double mean_kl = 0.0;
  double min_kl = 0.0;
  double max_kl = 0.0;
  double mean_risk = 0.0;
};

struct SweepResult {
  /// Sorted by (n, schedule column, trial).
  std::vector<ExperimentRecord> records;
  /// One row per (n, schedule), same order.
  std::vector<CellSummary> cells;
};

SweepResult mc_error_sweep(const ExperimentConfig& cfg);

/// Aggregates consecutive records sharing (n, schedule).
std::vector<CellSummary> summarize(const std::vector<ExperimentRecord>& records);

struct KlDecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// log(mean KL) minus the fitted line, in grid order.
  std::vector<double> residuals;
};

/// OLS of log(mean KL) on log n over the given cells. Throws
/// std::invalid_argument with fewer than two distinct n or a nonpositive
/// mean (e.g. when every learned model equals the truth).
KlDecayFit fit_kl_decay(const std::vector<CellSummary>& cells);

struct KlDecayResult {
  SweepResult sweep;
  KlDecayFit fit;
};

/// Sweep with a single schedule followed by the log-log fit. Requires exactly
/// one schedule in the config.
KlDecayResult kl_decay(const ExperimentConfig& cfg);

}  // namespace clthres::harness
