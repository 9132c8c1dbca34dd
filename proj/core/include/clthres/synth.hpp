#pragma once

// Synthetic forest-structured models and exact ancestral sampling.

#include "clthres/estimation.hpp"
#include "clthres/forest.hpp"
#include "clthres/rng.hpp"

namespace clthres {

/// Binary star: node 0 is joined to nodes 1..k, nodes k+1..d-1 are isolated.
/// Every node is uniform and every edge is a binary symmetric channel.
struct StarForestSpec {
  int d = 0;
  int k = 0;
  double crossover = 0.3;
};

/// Throws std::invalid_argument unless d >= 2, 0 <= k <= d-1 and
/// crossover lies in (0, 0.5).
void validate(const StarForestSpec& spec);

/// Uniform-input binary symmetric channel as a joint table:
/// [[(1-c)/2, c/2], [c/2, (1-c)/2]].
PairwiseDist bsc_pair(double crossover);

ForestModel build_star_forest(const StarForestSpec& spec);

/// Controls the parameters drawn by build_random_forest.
struct RandomForestPolicy {
  /// Lower bound on every node and edge probability. Must lie in (0, 1/r^2].
  double min_entry = 0.01;
  /// Edges whose MI falls below this are redrawn.
  double min_edge_mi = 0.0;
  /// Redraws allowed per edge before giving up.
  int max_attempts = 1000;
};

/// Uniform spanning tree of the complete graph on d nodes (loop-erased random
/// walks).
EdgeList random_spanning_tree(int d, SeededRng& rng);

/// Random forest with exactly k edges: a uniform spanning tree with d-1-k
/// uniformly chosen edges removed. The skeleton is not exactly uniform over
/// k-edge forests. Parameters are drawn root-to-leaf with random conditionals
/// that respect the policy. Throws std::invalid_argument if k > d-1 or the
/// policy cannot be met.
ForestModel build_random_forest(int d, int k, int r, SeededRng& rng,
                                const RandomForestPolicy& policy = {});

/// n i.i.d. draws by ancestral sampling: roots from their marginals, then
/// every other node from its parent's conditional row. Requires m.d() >= 2.
SampleMatrix sample(const ForestModel& m, int n, SeededRng& rng);

}  // namespace clthres
