// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Monte Carlo criteria use fixed master seeds and are reproducible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clthres/exponents.hpp"
#include "clthres/forest.hpp"
#include "clthres/harness/experiment.hpp"
#include "clthres/learn.hpp"
#include "clthres/synth.hpp"
#include "models.hpp"
#include "oracles.hpp"

using namespace clthres;
using namespace clthres::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const ProportionEstimate& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.4f [%.4f, %.4f]", p.estimate, p.lo, p.hi);
  return buf;
}

ExperimentConfig star_config(int d, int k, std::vector<int> ns, std::vector<double> betas, int trials,
                             std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.topology.kind = TopologySpec::Kind::kStar;
  cfg.topology.d = d;
  cfg.topology.k = k;
  cfg.topology.crossover = 0.3;
  cfg.n_grid = std::move(ns);
  cfg.beta_grid = std::move(betas);
  cfg.trials = trials;
  cfg.master_seed = seed;
  cfg.threads = 0;
  return cfg;
}

const CellSummary& cell(const SweepResult& r, int n, double beta) {
  for (const auto& c : r.cells) {
    if (c.n == n && (c.beta == beta || (std::isnan(c.beta) && std::isnan(beta)))) return c;
  }
  throw std::logic_error("missing cell");
}

NodeDist random_node(int r, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(r);
  for (double& v : w) v = u(g);
  return NodeDist::normalized(w);
}

Outcome mu_star_universality() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(20240601);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int r = 2 + k % 2;
    worst = std::max(worst, std::abs(mu_star(PairwiseDist::outer(random_node(r, g), random_node(r, g))) - 1.0));
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "max |mu* - 1| = " << worst << " over 50 products, " << secs << " s";
  return {worst <= 1e-6 && secs < 10.0, os.str()};
}

Outcome kl_decay_slope() {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = star_config(21, 10, {256, 512, 1024, 2048, 4096, 8192}, {0.625}, 50, 2002);
  const KlDecayResult res = kl_decay(cfg);
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "slope = " << res.fit.slope << " (R^2 " << res.fit.r_squared << "), " << secs << " s";
  return {res.fit.slope >= -1.25 && res.fit.slope <= -0.75 && secs < 300.0, os.str()};
}

Outcome over_under_ordering() {
  const auto t0 = Clock::now();
  const std::vector<double> betas{0.2, 0.5, 0.8};
  const SweepResult res = mc_error_sweep(star_config(21, 10, {4000}, betas, 400, 3003));
  const double secs = seconds_since(t0);
  bool ok = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const CellSummary& c = cell(res, 4000, betas[i]);
    os << "beta " << betas[i] << ": over " << fmt(c.over) << ", under " << fmt(c.under) << "; ";
    if (i == 0) continue;
    const CellSummary& p = cell(res, 4000, betas[i - 1]);
    if (c.over.estimate < p.over.estimate && !intervals_overlap(c.over, p.over)) ok = false;
    if (c.under.estimate > p.under.estimate && !intervals_overlap(c.under, p.under)) ok = false;
  }
  os << secs << " s";
  return {ok && secs < 300.0, os.str()};
}

Outcome consistency_direction() {
  const auto t0 = Clock::now();
  const SweepResult res = mc_error_sweep(star_config(21, 10, {1000, 8000}, {0.625}, 400, 4004));
  const double secs = seconds_since(t0);
  const ProportionEstimate small = cell(res, 1000, 0.625).err_structure;
  const ProportionEstimate large = cell(res, 8000, 0.625).err_structure;
  std::ostringstream os;
  os << "P(A) n=1000 " << fmt(small) << ", n=8000 " << fmt(large) << ", " << secs << " s";
  const bool ok = large.estimate < small.estimate && !intervals_overlap(small, large) && secs < 300.0;
  return {ok, os.str()};
}

Outcome oracle_dominance() {
  ExperimentConfig cfg = star_config(21, 10, {2000}, {0.2, 0.35, 0.5, 0.625, 0.8}, 400, 5005);
  cfg.oracle_half_imin = true;
  const SweepResult res = mc_error_sweep(cfg);
  const CellSummary* oracle_cell = nullptr;
  const CellSummary* best = nullptr;
  for (const auto& c : res.cells) {
    if (std::isnan(c.beta)) {
      oracle_cell = &c;
    } else if (!best || c.err_structure.estimate < best->err_structure.estimate) {
      best = &c;
    }
  }
  const ProportionEstimate ro = wilson_interval(oracle_cell->err_structure.trials - oracle_cell->err_structure.successes,
                                                oracle_cell->err_structure.trials);
  const ProportionEstimate rb =
      wilson_interval(best->err_structure.trials - best->err_structure.successes, best->err_structure.trials);
  std::ostringstream os;
  os << "recovery: oracle " << fmt(ro) << ", best power (beta " << best->beta << ") " << fmt(rb);
  return {ro.estimate >= rb.estimate || intervals_overlap(ro, rb), os.str()};
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(6006);
  double kl_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 7;
    const ForestModel p = testmodels::random_model(d, 2, g);
    const ForestModel q = testmodels::random_model(d, 2, g);
    kl_err = std::max(kl_err, std::abs(forest_kl(p, q) - oracle::kl(oracle::joint_of(p), oracle::joint_of(q))));
  }

  const auto trees = oracle::all_trees(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double mwst_err = 0.0;
  for (int k = 0; k < 10; ++k) {
    MiMatrix w = MiMatrix::Zero(7, 7);
    for (int i = 0; i < 7; ++i) {
      for (int j = i + 1; j < 7; ++j) w(i, j) = w(j, i) = u(g);
    }
    double best = 0.0;
    for (const auto& t : trees) {
      double s = 0.0;
      for (auto [a, b] : t) s += w(a, b);
      best = std::max(best, s);
    }
    double got = 0.0;
    for (double s : kruskal_mwst(w).scores) got += s;
    mwst_err = std::max(mwst_err, std::abs(got - best));
  }

  double pyth = 0.0;
  for (int k = 0; k < 20; ++k) {
    const ForestModel p = testmodels::random_model(7, 2, g);
    const EdgeList t = testmodels::random_edges(7, 6, g);
    const auto jp = oracle::joint_of(p);
    const auto jproj = oracle::joint_of(project_onto_structure(p, t));
    const auto jq = oracle::joint_of(testmodels::random_model_on(7, 2, t, g));
    pyth = std::max(pyth, std::abs(oracle::kl(jp, jq) - oracle::kl(jp, jproj) - oracle::kl(jproj, jq)));
  }

  const auto bin = [](const PairwiseDist& p) { return oracle::Binary{{p(0, 0), p(0, 1), p(1, 0), p(1, 1)}}; };
  const PairwiseDist b3 = bsc_pair(0.3);
  const PairwiseDist b2 = bsc_pair(0.2);
  const PairwiseDist uni = PairwiseDist::uniform(2);
  const PairwiseDist skew = PairwiseDist::outer(NodeDist({0.3, 0.7}), NodeDist({0.6, 0.4}));
  double rate = 0.0;
  rate = std::max(rate, std::abs(underestimation_rate(b3).value - oracle::grid_under_zero(bin(b3))));
  rate = std::max(rate, std::abs(underestimation_rate(b2, 0.05).value - oracle::grid_under(bin(b2), 0.05)));
  rate = std::max(rate, std::abs(overestimation_rate(uni, 0.01).value - oracle::grid_over(bin(uni), 0.01)));
  rate = std::max(rate, std::abs(overestimation_rate(skew, 0.02).value - oracle::grid_over(bin(skew), 0.02)));

  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "forest_kl " << kl_err << ", mwst " << mwst_err << ", pythagorean " << pyth << ", rates " << rate << ", "
     << secs << " s";
  return {kl_err < 1e-9 && mwst_err < 1e-12 && pyth < 1e-9 && rate < 1e-4 && secs < 120.0, os.str()};
}

Outcome mi_concentration() {
  const ForestModel ind = ForestModel::independent({NodeDist::uniform(2), NodeDist::uniform(2)});
  std::vector<double> lx, ly;
  std::ostringstream os;
  for (int n : {250, 500, 1000, 2000}) {
    std::vector<double> v;
    for (int seed = 0; seed < 200; ++seed) {
      SeededRng rng(derive_seed({7007, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(seed)}), 0);
      v.push_back(all_empirical_mi(sample(ind, n, rng))(0, 1));
    }
    double mean = 0.0;
    for (double x : v) mean += x / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (v.size() - 1));
    lx.push_back(std::log(n));
    ly.push_back(std::log(sd));
    os << "sd(" << n << ") = " << sd << "; ";
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) mx += lx[k] / lx.size(), my += ly[k] / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  const double slope = sxy / sxx;
  os << "slope = " << slope;
  return {slope >= -1.35 && slope <= -0.65, os.str()};
}

Outcome converse_and_counts() {
  const double c = converse_sample_bound(100, 50, 2, 1.0).fixed_k;
  bool counts_ok = true;
  for (int d = 1; d <= 7; ++d) {
    const auto exact = oracle::forest_counts_dfs(d);
    counts_ok &= enumerate_forest_counts(d) == exact;
    double total = 0.0;
    for (int k = 0; k < d; ++k) {
      total += static_cast<double>(exact[k]);
      counts_ok &= std::log(static_cast<double>(exact[k])) >= forest_count_bounds(d, k).log_fixed_k_lower - 1e-12;
    }
    const ForestCountBounds b = forest_count_bounds(d, 0);
    counts_ok &= std::log(total) >= b.log_all_lower - 1e-12 && std::log(total) <= b.log_all_upper + 1e-12;
  }
  std::ostringstream os;
  os.precision(8);
  os << "bound(100, 50, 2, 1) = " << c << ", counts and bounds " << (counts_ok ? "consistent" : "INCONSISTENT")
     << " for d <= 7";
  return {std::abs(c - 3.2555) <= 1e-3 && counts_ok, os.str()};
}

Outcome extremal_ordering() {
  const SweepResult empty = mc_error_sweep(star_config(12, 0, {2000}, {0.5}, 400, 9009));
  const SweepResult tree = mc_error_sweep(star_config(12, 11, {2000}, {0.5}, 400, 9009));
  const ProportionEstimate pe = cell(empty, 2000, 0.5).err_structure;
  const ProportionEstimate pt = cell(tree, 2000, 0.5).err_structure;
  std::ostringstream os;
  os << "P(A) empty " << fmt(pe) << ", tree " << fmt(pt);
  return {pe.estimate >= pt.estimate || intervals_overlap(pe, pt), os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"mu* universality", mu_star_universality},
      {"KL-decay slope", kl_decay_slope},
      {"over/under ordering in beta", over_under_ordering},
      {"consistency direction in n", consistency_direction},
      {"oracle threshold dominance", oracle_dominance},
      {"exact oracle equivalence", oracle_equivalence},
      {"empirical MI concentration", mi_concentration},
      {"converse bound and forest counts", converse_and_counts},
      {"extremal ordering", extremal_ordering},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
