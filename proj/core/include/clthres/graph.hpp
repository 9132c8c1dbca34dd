#pragma once

#include <compare>
#include <span>
#include <vector>

namespace clthres {

/// Undirected edge between two distinct nodes, stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  Edge() = default;
  /// Orders the endpoints. Throws std::invalid_argument on a self-loop.
  Edge(int a, int b);

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

/// Union-find with path halving and union by size.
class DisjointSet {
 public:
  explicit DisjointSet(int n);

  int find(int x);
  /// Returns false if x and y were already connected.
  bool unite(int x, int y);
  bool connected(int x, int y) { return find(x) == find(y); }
  int components() const noexcept { return components_; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int components_;
};

/// True if every endpoint is in [0, d) and the edges contain no cycle
/// (including repeated edges).
bool is_forest(int d, std::span<const Edge> edges);

/// Sorted copy with endpoints normalized.
EdgeList canonical(EdgeList edges);

/// Adjacency lists for a graph on d nodes.
std::vector<std::vector<int>> adjacency(int d, std::span<const Edge> edges);

/// Component label per node, labels numbered by lowest member index.
std::vector<int> component_labels(int d, std::span<const Edge> edges);

}  // namespace clthres
