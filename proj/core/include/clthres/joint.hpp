#pragma once

// Exact joint distributions over X^d for small d, used for forest
// projections of arbitrary (non-forest) distributions and as a brute-force
// reference for the factorized routines.

#include <cstddef>
#include <vector>

#include "clthres/dist.hpp"
#include "clthres/forest.hpp"

namespace clthres {

/// Largest d accepted for exact enumeration.
inline constexpr int kMaxJointNodes = 12;
/// Largest r^d accepted for exact enumeration.
inline constexpr std::size_t kMaxJointStates = std::size_t{1} << 24;

/// Full probability table over X^d. State index = sum_i x_i * r^i, so x_0 is
/// the fastest-varying coordinate.
class JointDist {
 public:
  /// Throws std::invalid_argument if the table is not a distribution or the
  /// size exceeds kMaxJointNodes / kMaxJointStates.
  JointDist(int d, int r, std::vector<double> probs);

  /// Enumerates every state of m. Throws if m is too large.
  static JointDist from_forest(const ForestModel& m);

  int d() const noexcept { return d_; }
  int r() const noexcept { return r_; }
  std::size_t states() const noexcept { return probs_.size(); }
  double operator[](std::size_t state) const { return probs_[state]; }
  std::span<const double> probs() const noexcept { return probs_; }

  std::vector<Symbol> decode(std::size_t state) const;
  std::size_t encode(std::span<const Symbol> x) const;

  NodeDist node_marginal(int i) const;
  /// Rows index X_i.
  PairwiseDist pairwise_marginal(int i, int j) const;

 private:
  int d_;
  int r_;
  std::vector<double> probs_;
};

/// Number of states r^d, or throws std::invalid_argument past the limits.
std::size_t joint_state_count(int d, int r);

/// D(p || q) by summing over all states.
double kl_divergence(const JointDist& p, const JointDist& q);
/// D(p || q) by summing over all states, evaluating q through log_likelihood.
double kl_divergence(const JointDist& p, const ForestModel& q);

/// The distribution Markov on `structure` matching p's node and edge
/// marginals; minimizes D(p || Q) over Q Markov on `structure`.
ForestModel project_onto_structure(const JointDist& p, EdgeList structure);

/// Closest forest-structured distribution to `joint` in D(joint || .).
/// Runs a maximum-weight spanning tree on the exact pairwise MIs and keeps the
/// edges whose MI exceeds kMiClampTol, which yields the optimum with the
/// fewest edges. Exact MI ties resolve in Kruskal order (score descending,
/// then edge ascending).
ForestModel forest_projection(const JointDist& joint);

}  // namespace clthres
