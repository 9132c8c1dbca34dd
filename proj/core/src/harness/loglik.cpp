#include "clthres/harness/loglik.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "clthres/learn.hpp"
#include "clthres/rng.hpp"

namespace clthres::harness {

LikelihoodScore floored_log_likelihood(const ForestModel& m, const SampleMatrix& s, int n_train) {
  if (m.d() != s.d() || m.r() < s.r()) {
    throw std::invalid_argument("floored_log_likelihood: model and samples disagree on d or r");
  }
  if (n_train < 1) throw std::invalid_argument("floored_log_likelihood: n_train must be positive");
  const double floor = 1.0 / (2.0 * n_train);
  LikelihoodScore out;
  double total = 0.0;
  // Precompute log factors once per (node, symbol) and (edge, pair).
  std::vector<std::vector<double>> node_log(m.d());
  std::vector<std::vector<char>> node_floored(m.d());
  std::vector<std::vector<double>> node_val(m.d());
  for (int i = 0; i < m.d(); ++i) {
    for (int x = 0; x < m.r(); ++x) {
      const double p = m.node_marginal(i)[x];
      node_floored[i].push_back(p <= 0.0);
      node_val[i].push_back(p > 0.0 ? p : floor);
      node_log[i].push_back(std::log(node_val[i].back()));
    }
  }
  for (int row = 0; row < s.n(); ++row) {
    double ll = 0.0;
    for (int i = 0; i < m.d(); ++i) {
      const int x = s(row, i);
      ll += node_log[i][x];
      out.floored += node_floored[i][x];
    }
    for (const auto& [e, p] : m.edge_marginals()) {
      const int a = s(row, e.u);
      const int b = s(row, e.v);
      double joint = p(a, b);
      if (joint <= 0.0) {
        joint = floor;
        ++out.floored;
      }
      ll += std::log(joint) - node_log[e.u][a] - node_log[e.v][b];
    }
    total += ll;
  }
  out.mean = total / s.n();
  return out;
}

std::vector<BetaProfileRow> beta_profile(const SampleMatrix& train, const SampleMatrix& test,
                                         std::span<const double> betas) {
  if (train.d() != test.d() || train.r() != test.r()) {
    throw std::invalid_argument("beta_profile: train and test disagree on d or r");
  }
  const EdgeRanking ranking = chow_liu(train);
  std::vector<BetaProfileRow> rows;
  for (double beta : betas) {
    const double eps = RegSchedule::power(beta)(train.n());
    const LearnedModel learned = prune_ranking(train, ranking, eps);
    rows.push_back({beta, eps, learned.k_hat, floored_log_likelihood(learned.model, train, train.n()),
                    floored_log_likelihood(learned.model, test, train.n())});
  }
  return rows;
}

CvResult cross_validate_beta(const SampleMatrix& data, int folds, std::span<const double> betas,
                             std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cross_validate_beta: need at least two folds");
  if (betas.empty()) throw std::invalid_argument("cross_validate_beta: empty beta grid");
  const int n = data.n();
  if (n / folds < 1 || n - (n + folds - 1) / folds < 2) {
    throw std::invalid_argument("cross_validate_beta: " + std::to_string(n) + " rows are too few for " +
                                std::to_string(folds) + " folds");
  }
  for (double b : betas) RegSchedule::power(b);  // validates the grid up front

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  SeededRng rng(seed, 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1))]);
  }

  CvResult out;
  out.mean_heldout.assign(betas.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> fit_rows;
    std::vector<int> held_rows;
    for (int pos = 0; pos < n; ++pos) (pos % folds == f ? held_rows : fit_rows).push_back(order[pos]);
    std::sort(fit_rows.begin(), fit_rows.end());
    std::sort(held_rows.begin(), held_rows.end());
    const SampleMatrix fit = data.select_rows(fit_rows);
    const SampleMatrix held = data.select_rows(held_rows);
    const EdgeRanking ranking = chow_liu(fit);
    for (std::size_t b = 0; b < betas.size(); ++b) {
      const LearnedModel learned = prune_ranking(fit, ranking, RegSchedule::power(betas[b])(fit.n()));
      const LikelihoodScore score = floored_log_likelihood(learned.model, held, fit.n());
      out.folds.push_back({f, betas[b], learned.k_hat, score.mean, score.floored});
      out.mean_heldout[b] += score.mean / folds;
    }
  }
  std::size_t best = 0;
  for (std::size_t b = 1; b < betas.size(); ++b) {
    const double v = out.mean_heldout[b];
    const double w = out.mean_heldout[best];
    if (v > w || (v == w && betas[b] < betas[best])) best = b;
  }
  out.best_beta = betas[best];
  return out;
}

}  // namespace clthres::harness
