#include "clthres/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "clthres/rng.hpp"
#include "clthres/synth.hpp"

namespace clthres::harness {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

EdgeList sorted_copy(std::span<const Edge> edges) {
  return canonical(EdgeList(edges.begin(), edges.end()));
}

int worker_count(int requested, std::size_t tasks) {
  int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  w = std::max(1, w);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(w), std::max<std::size_t>(1, tasks)));
}

}  // namespace

ForestModel build_truth(const TopologySpec& t) {
  if (t.kind == TopologySpec::Kind::kStar) {
    return build_star_forest({t.d, t.k, t.crossover});
  }
  SeededRng rng(t.model_seed, 0);
  RandomForestPolicy policy;
  policy.min_entry = t.min_entry;
  policy.min_edge_mi = t.min_edge_mi;
  return build_random_forest(t.d, t.k, t.r, rng, policy);
}

void validate(const ExperimentConfig& cfg) {
  const TopologySpec& t = cfg.topology;
  if (t.d < 2) throw std::invalid_argument("config: topology.d must be at least 2");
  if (t.k < 0 || t.k > t.d - 1) throw std::invalid_argument("config: topology.k must lie in [0, d-1]");
  if (cfg.n_grid.empty()) throw std::invalid_argument("config: n grid is empty");
  for (int n : cfg.n_grid) {
    if (n < 1) throw std::invalid_argument("config: every n must be positive");
  }
  for (double b : cfg.beta_grid) {
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("config: every beta must lie in (0, 1)");
  }
  if (cfg.oracle_eps && !(*cfg.oracle_eps > 0.0)) {
    throw std::invalid_argument("config: oracle_eps must be positive");
  }
  if (cfg.beta_grid.empty() && !cfg.oracle_eps && !cfg.oracle_half_imin) {
    throw std::invalid_argument("config: no schedule (beta grid empty and no oracle)");
  }
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be at least 1");
  if (cfg.threads < 0) throw std::invalid_argument("config: threads must be nonnegative");
}

ExperimentConfig desk_profile() {
  ExperimentConfig cfg;
  cfg.topology = {TopologySpec::Kind::kStar, 21, 10, 0.3};
  cfg.n_grid = {500, 1000, 2000, 4000, 8000};
  cfg.beta_grid = {0.2, 0.35, 0.5, 0.625, 0.8};
  cfg.trials = 400;
  return cfg;
}

ExperimentConfig paper_profile() {
  ExperimentConfig cfg;
  cfg.topology = {TopologySpec::Kind::kStar, 101, 50, 0.3};
  cfg.n_grid = {1000, 2000, 4000, 8000, 16000, 32000};
  cfg.beta_grid = {0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
  cfg.trials = 30000;
  return cfg;
}

std::vector<ScheduleSpec> expand_schedules(const ExperimentConfig& cfg, const ForestModel& truth) {
  std::vector<ScheduleSpec> out;
  for (double b : cfg.beta_grid) out.push_back({"power", b, RegSchedule::power(b)});
  if (cfg.oracle_half_imin) {
    const double imin = truth.min_edge_mi();
    if (!std::isfinite(imin) || !(imin > 0.0)) {
      throw std::invalid_argument("config: oracle I_min/2 needs a truth with at least one dependent edge");
    }
    out.push_back({"oracle", kNaN, RegSchedule::oracle(imin / 2.0)});
  } else if (cfg.oracle_eps) {
    out.push_back({"oracle", kNaN, RegSchedule::oracle(*cfg.oracle_eps)});
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t master, int n, double beta, int trial) {
  return derive_seed({master, static_cast<std::uint64_t>(n), std::bit_cast<std::uint64_t>(beta),
                      static_cast<std::uint64_t>(trial)});
}

ExperimentRecord run_trial(const ForestModel& truth, int n, const ScheduleSpec& sched, int trial,
                           std::uint64_t seed, double forest_gap) {
  SeededRng rng(seed, 0);
  const SampleMatrix s = sample(truth, n, rng);
  const EdgeRanking ranking = chow_liu(s);
  const double eps = sched.schedule(n);
  const LearnedModel learned = prune_ranking(s, ranking, eps);

  const EdgeList truth_edges = sorted_copy(truth.edges());
  const int k = static_cast<int>(truth_edges.size());
  ExperimentRecord rec;
  rec.trial = trial;
  rec.n = n;
  rec.schedule = sched.label;
  rec.beta = sched.beta;
  rec.eps = eps;
  rec.k = k;
  rec.k_hat = learned.k_hat;
  rec.err_structure = sorted_copy(learned.edge_set) != truth_edges;
  rec.over = learned.k_hat > k;
  rec.under = learned.k_hat < k;
  rec.err_top_k = sorted_copy(std::span<const Edge>(ranking.edges).first(static_cast<std::size_t>(k))) != truth_edges;
  rec.kl = forest_kl(truth, learned.model);
  rec.risk = rec.kl - forest_gap;
  return rec;
}

ProportionEstimate wilson_interval(long successes, long trials, double z) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: need 0 <= successes <= trials and trials >= 1");
  }
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double centre = (p + z2 / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  ProportionEstimate e{successes, trials, p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
  // Exact endpoints at the boundary counts.
  if (successes == 0) e.lo = 0.0;
  if (successes == trials) e.hi = 1.0;
  return e;
}

bool intervals_overlap(const ProportionEstimate& a, const ProportionEstimate& b) {
  return a.lo <= b.hi && b.lo <= a.hi;
}

std::vector<CellSummary> summarize(const std::vector<ExperimentRecord>& records) {
  std::vector<CellSummary> cells;
  std::size_t i = 0;
  while (i < records.size()) {
    std::size_t j = i;
    const auto same = [&](const ExperimentRecord& r) {
      return r.n == records[i].n && r.schedule == records[i].schedule &&
             std::bit_cast<std::uint64_t>(r.beta) == std::bit_cast<std::uint64_t>(records[i].beta);
    };
    long a = 0, over = 0, under = 0, b = 0;
    double k_hat = 0.0, kl = 0.0, risk = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (; j < records.size() && same(records[j]); ++j) {
      const ExperimentRecord& r = records[j];
      a += r.err_structure;
      over += r.over;
      under += r.under;
      b += r.err_top_k;
      k_hat += r.k_hat;
      kl += r.kl;
      risk += r.risk;
      lo = std::min(lo, r.kl);
      hi = std::max(hi, r.kl);
    }
    const long t = static_cast<long>(j - i);
    CellSummary c;
    c.n = records[i].n;
    c.schedule = records[i].schedule;
    c.beta = records[i].beta;
    c.eps = records[i].eps;
    c.err_structure = wilson_interval(a, t);
    c.over = wilson_interval(over, t);
    c.under = wilson_interval(under, t);
    c.err_top_k = wilson_interval(b, t);
    c.mean_k_hat = k_hat / t;
    c.mean_kl = kl / t;
    c.min_kl = lo;
    c.max_kl = hi;
    c.mean_risk = risk / t;
    cells.push_back(std::move(c));
    i = j;
  }
  return cells;
}

SweepResult mc_error_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  const ForestModel truth = build_truth(cfg.topology);
  const std::vector<ScheduleSpec> schedules = expand_schedules(cfg, truth);

  const std::size_t per_cell = static_cast<std::size_t>(cfg.trials);
  const std::size_t cells = cfg.n_grid.size() * schedules.size();
  const std::size_t total = cells * per_cell;
  std::vector<ExperimentRecord> records(total);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto work = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      const std::size_t cell = idx / per_cell;
      const int trial = static_cast<int>(idx % per_cell);
      const int n = cfg.n_grid[cell / schedules.size()];
      const ScheduleSpec& sched = schedules[cell % schedules.size()];
      try {
        records[idx] = run_trial(truth, n, sched, trial, trial_seed(cfg.master_seed, n, sched.beta, trial));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int workers = worker_count(cfg.threads, total);
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult out;
  out.cells = summarize(records);
  out.records = std::move(records);
  return out;
}

KlDecayFit fit_kl_decay(const std::vector<CellSummary>& cells) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const CellSummary& c : cells) {
    if (!(c.mean_kl > 0.0) || !std::isfinite(c.mean_kl)) {
      throw std::invalid_argument("fit_kl_decay: mean KL at n = " + std::to_string(c.n) +
                                  " is not a positive finite number");
    }
    const double x = std::log(static_cast<double>(c.n));
    if (std::find(xs.begin(), xs.end(), x) != xs.end()) {
      throw std::invalid_argument("fit_kl_decay: repeated n = " + std::to_string(c.n));
    }
    xs.push_back(x);
    ys.push_back(std::log(c.mean_kl));
  }
  if (xs.size() < 2) throw std::invalid_argument("fit_kl_decay: need at least two sample sizes");

  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  KlDecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double res = ys[i] - (fit.intercept + fit.slope * xs[i]);
    fit.residuals.push_back(res);
    sse += res * res;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

KlDecayResult kl_decay(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t schedules = cfg.beta_grid.size() + ((cfg.oracle_half_imin || cfg.oracle_eps) ? 1 : 0);
  if (schedules != 1) throw std::invalid_argument("kl_decay: exactly one schedule is required");
  KlDecayResult out;
  out.sweep = mc_error_sweep(cfg);
  out.fit = fit_kl_decay(out.sweep.cells);
  return out;
}

}  // namespace clthres::harness
