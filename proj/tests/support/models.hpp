#pragma once

// Random models for property tests, drawn with std::mt19937_64 so they do not
// depend on the library's own generators.

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <vector>

#include "clthres/forest.hpp"

namespace testmodels {

using namespace clthres;

inline std::vector<double> random_probs(int r, std::mt19937_64& g, double floor) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(r);
  double s = 0.0;
  for (double& v : w) s += (v = e(g) + floor);
  for (double& v : w) v /= s;
  return w;
}

// k edges of a random forest on d nodes: random edge order, keep acyclic ones.
inline EdgeList random_edges(int d, int k, std::mt19937_64& g) {
  std::vector<Edge> all;
  for (int u = 0; u < d; ++u) {
    for (int v = u + 1; v < d; ++v) all.emplace_back(u, v);
  }
  std::shuffle(all.begin(), all.end(), g);
  std::vector<int> comp(d);
  for (int i = 0; i < d; ++i) comp[i] = i;
  EdgeList out;
  for (const Edge& e : all) {
    if (static_cast<int>(out.size()) == k) break;
    const int a = comp[e.u], b = comp[e.v];
    if (a == b) continue;
    for (int& c : comp) {
      if (c == b) c = a;
    }
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// A model Markov on `edges` with random root marginals and conditionals.
inline ForestModel random_model_on(int d, int r, const EdgeList& edges, std::mt19937_64& g, double floor = 0.05) {
  std::vector<std::vector<int>> adj(d);
  for (const Edge& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<std::vector<double>> node(d);
  std::map<Edge, PairwiseDist> pairs;
  std::vector<char> seen(d, 0);
  for (int root = 0; root < d; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    node[root] = random_probs(r, g, floor);
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int a = q.front();
      q.pop();
      for (int b : adj[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        std::vector<double> joint(r * r);
        std::vector<double> child(r, 0.0);
        for (int x = 0; x < r; ++x) {
          const auto row = random_probs(r, g, floor);
          for (int y = 0; y < r; ++y) {
            joint[x * r + y] = node[a][x] * row[y];
            child[y] += joint[x * r + y];
          }
        }
        PairwiseDist t = PairwiseDist::normalized(r, joint);
        node[b] = child;
        pairs.emplace(Edge(a, b), a < b ? t : t.transposed());
        q.push(b);
      }
    }
  }
  std::vector<NodeDist> marg;
  for (auto& p : node) marg.push_back(NodeDist::normalized(p));
  return ForestModel(d, r, edges, std::move(marg), std::move(pairs));
}

inline ForestModel random_model(int d, int r, std::mt19937_64& g, double floor = 0.05) {
  std::uniform_int_distribution<int> kd(0, d - 1);
  return random_model_on(d, r, random_edges(d, kd(g), g), g, floor);
}

}  // namespace testmodels
