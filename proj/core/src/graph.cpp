#include "clthres/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace clthres {

Edge::Edge(int a, int b) : u(std::min(a, b)), v(std::max(a, b)) {
  if (a == b) throw std::invalid_argument("Edge: self-loop");
}

DisjointSet::DisjointSet(int n)
    : parent_(n), size_(n, 1), components_(n) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

int DisjointSet::find(int x) {
  auto& p = parent_;
  while (p[x] != x) {
    p[x] = p[p[x]];
    x = p[x];
  }
  return x;
}

bool DisjointSet::unite(int x, int y) {
  int a = find(x);
  int b = find(y);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  --components_;
  return true;
}

bool is_forest(int d, std::span<const Edge> edges) {
  if (d < 0) return false;
  DisjointSet ds(d);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v >= d || e.u >= e.v) return false;
    if (!ds.unite(e.u, e.v)) return false;
  }
  return true;
}

EdgeList canonical(EdgeList edges) {
  for (Edge& e : edges) e = Edge(e.u, e.v);
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<std::vector<int>> adjacency(int d, std::span<const Edge> edges) {
  std::vector<std::vector<int>> adj(d);
  for (const Edge& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

std::vector<int> component_labels(int d, std::span<const Edge> edges) {
  DisjointSet ds(d);
  for (const Edge& e : edges) ds.unite(e.u, e.v);
  std::vector<int> label(d, -1);
  std::vector<int> root_label(d, -1);
  int next = 0;
  for (int i = 0; i < d; ++i) {
    const int root = ds.find(i);
    if (root_label[root] < 0) root_label[root] = next++;
    label[i] = root_label[root];
  }
  return label;
}

}  // namespace clthres
