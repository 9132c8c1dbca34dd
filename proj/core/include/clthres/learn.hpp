#pragma once

// Chow-Liu tree learning followed by mutual-information thresholding.
//
// Pipeline: pairwise types -> empirical MI matrix -> maximum-weight spanning
// tree (Kruskal) -> keep the edges whose empirical MI strictly exceeds the
// regularization level eps_n -> maximum-likelihood parameters on the pruned
// forest (node types and pairwise types of the kept edges).

#include <span>
#include <utility>
#include <vector>

#include "clthres/estimation.hpp"
#include "clthres/forest.hpp"

namespace clthres {

/// Spanning-tree edges sorted by decreasing score.
struct EdgeRanking {
  EdgeList edges;
  std::vector<double> scores;
};

/// Maximum-weight spanning tree over a symmetric weight matrix. Candidate
/// edges are visited by (weight descending, then (u, v) ascending), so ties
/// always resolve the same way; with all weights equal the result is the star
/// centred at node 0. Throws std::invalid_argument if d < 2, the matrix is
/// not square and symmetric, or a weight is not finite.
EdgeRanking kruskal_mwst(const MiMatrix& weights);

/// Number of scores strictly greater than eps. Scores equal to eps are
/// excluded. Requires eps > 0 and nonincreasing scores.
int threshold_estimate(std::span<const double> scores, double eps);

/// Regularization sequence eps_n.
class RegSchedule {
 public:
  enum class Kind { kPower, kOracle, kExplicit };

  /// eps_n = n^(-beta), beta in (0, 1) exclusive.
  static RegSchedule power(double beta);
  /// eps_n = eps for every n, eps > 0 (e.g. I_min / 2 when I_min is known).
  static RegSchedule oracle(double eps);
  /// Step function through (n, eps) pairs: eps_n is the value attached to
  /// the largest listed n' <= n. Requires strictly increasing n' and eps > 0.
  static RegSchedule explicit_sequence(std::vector<std::pair<int, double>> steps);

  Kind kind() const noexcept { return kind_; }
  /// Exponent of a power schedule; throws for other kinds.
  double beta() const;
  double operator()(int n) const;

 private:
  RegSchedule() = default;
  Kind kind_ = Kind::kPower;
  double value_ = 0.5;
  std::vector<std::pair<int, double>> steps_;
};

struct LearnedModel {
  EdgeRanking ranking;
  double eps = 0.0;
  int k_hat = 0;
  /// The first k_hat edges of the ranking.
  EdgeList edge_set;
  /// Node types and pairwise types on edge_set.
  ForestModel model;
};

/// Steps 1-3 only: the full Chow-Liu tree.
EdgeRanking chow_liu(const SampleMatrix& s);

/// Full thresholded learner with eps_n = sched(s.n()).
LearnedModel clthres(const SampleMatrix& s, const RegSchedule& sched);

/// Thresholding and projection for a precomputed ranking. Lets callers
/// sweep several schedules over one Chow-Liu run.
LearnedModel prune_ranking(const SampleMatrix& s, const EdgeRanking& ranking, double eps);

/// Maximum-likelihood forest for a fixed structure: node types plus the
/// pairwise types of the given edges.
ForestModel fit_structure(const SampleMatrix& s, EdgeList structure);

}  // namespace clthres
