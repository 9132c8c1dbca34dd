#pragma once

// Forest-structured distributions: a node marginal per variable plus a
// pairwise marginal per edge of an acyclic graph. The joint factorizes as
//
//   P(x) = prod_i P_i(x_i) * prod_{(i,j) in E} P_ij(x_i, x_j) / (P_i(x_i) P_j(x_j)).
//
// Everything here is exact: pairwise marginals between non-adjacent nodes are
// obtained by chaining transition matrices along the unique connecting path.

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "clthres/dist.hpp"
#include "clthres/graph.hpp"

namespace clthres {

class ForestModel {
 public:
  /// Edge marginals are oriented with rows indexing edge.u and columns
  /// indexing edge.v. Throws std::invalid_argument if the edges contain a
  /// cycle, any alphabet differs from r, an edge lacks a marginal (or a
  /// marginal lacks an edge), or an edge marginal's row/column sums differ
  /// from the node marginals by more than kConsistencyTol.
  ForestModel(int d, int r, EdgeList edges, std::vector<NodeDist> node_marginals,
              std::map<Edge, PairwiseDist> edge_marginals);

  /// The empty forest with the given node marginals.
  static ForestModel independent(std::vector<NodeDist> node_marginals);

  int d() const noexcept { return d_; }
  int r() const noexcept { return r_; }
  const EdgeList& edges() const noexcept { return edges_; }
  const std::vector<NodeDist>& node_marginals() const noexcept { return nodes_; }
  const std::map<Edge, PairwiseDist>& edge_marginals() const noexcept { return pairs_; }
  const NodeDist& node_marginal(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  /// Throws std::out_of_range if e is not an edge.
  const PairwiseDist& edge_marginal(Edge e) const { return pairs_.at(e); }
  bool has_edge(Edge e) const { return pairs_.contains(e); }
  const std::vector<int>& neighbors(int i) const { return adj_.at(static_cast<std::size_t>(i)); }

  /// True when every stored node and edge probability is strictly positive.
  bool positive() const noexcept;
  /// Smallest edge mutual information; +inf for the empty forest.
  double min_edge_mi() const;

 private:
  int d_;
  int r_;
  EdgeList edges_;
  std::vector<NodeDist> nodes_;
  std::map<Edge, PairwiseDist> pairs_;
  std::vector<std::vector<int>> adj_;
};

/// Rooted orientation of a forest: one root per connected component, parent
/// pointers toward the root, and an order listing parents before children.
struct DirectedForest {
  std::vector<int> roots;
  std::vector<std::optional<int>> parent;
  std::vector<int> order;
};

/// Orients every component away from its root. Defaults to the lowest-index
/// node of each component. Throws std::invalid_argument if `roots` does not
/// contain exactly one node per component.
DirectedForest directed_decomposition(const ForestModel& m,
                                      std::optional<std::vector<int>> roots = std::nullopt);

/// Row-stochastic r x r matrix, row x holding P(X_to = . | X_from = x).
/// `from` and `to` must be adjacent. Rows with P(X_from = x) = 0 are filled
/// with the marginal of `to`.
std::vector<double> transition(const ForestModel& m, int from, int to);

/// Exact joint marginal of (X_i, X_j), rows indexing X_i.
PairwiseDist pairwise_marginal(const ForestModel& m, int i, int j);

/// log P(x) under the factorization; -inf when x has zero probability.
double log_likelihood(const ForestModel& m, std::span<const Symbol> x);

/// Exact D(p || q) for two forest models on the same (d, r). Expectations of
/// q's edge terms use p's exact pairwise marginals. Returns
/// kInfiniteDivergence on an absolute-continuity violation.
double forest_kl(const ForestModel& p, const ForestModel& q);

/// The distribution Markov on `structure` whose node and edge marginals match
/// p's. It minimizes D(p || Q) over all Q Markov on `structure`.
ForestModel project_onto_structure(const ForestModel& p, EdgeList structure);

}  // namespace clthres
