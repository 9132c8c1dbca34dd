#include "clthres/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace clthres {
namespace {

// Uniform point on the probability simplex.
std::vector<double> random_simplex(int r, SeededRng& rng) {
  std::vector<double> w(r);
  double sum = 0.0;
  for (double& v : w) {
    v = -std::log1p(-rng.uniform());
    sum += v;
  }
  for (double& v : w) v /= sum;
  return w;
}

// Conditional row mixing a preferred symbol with noise, floored at `floor`.
std::vector<double> random_row(int r, int preferred, double floor, SeededRng& rng) {
  const double noise = rng.uniform();
  std::vector<double> row = random_simplex(r, rng);
  for (int y = 0; y < r; ++y) row[y] = noise * row[y] + (y == preferred ? 1.0 - noise : 0.0);
  for (double& v : row) v = floor + (1.0 - r * floor) * v;
  return row;
}

int pick(std::span<const double> cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), std::ssize(cdf) - 1));
}

}  // namespace

void validate(const StarForestSpec& spec) {
  if (spec.d < 2) throw std::invalid_argument("star forest: d must be at least 2");
  if (spec.k < 0 || spec.k > spec.d - 1) {
    throw std::invalid_argument("star forest: k must lie in [0, d-1]");
  }
  if (!(spec.crossover > 0.0 && spec.crossover < 0.5)) {
    throw std::invalid_argument("star forest: crossover must lie in (0, 0.5)");
  }
}

PairwiseDist bsc_pair(double crossover) {
  if (!(crossover >= 0.0 && crossover <= 1.0)) {
    throw std::invalid_argument("bsc_pair: crossover must lie in [0, 1]");
  }
  const double same = (1.0 - crossover) / 2.0;
  const double diff = crossover / 2.0;
  return PairwiseDist(2, {same, diff, diff, same});
}

ForestModel build_star_forest(const StarForestSpec& spec) {
  validate(spec);
  EdgeList edges;
  std::map<Edge, PairwiseDist> pairs;
  const PairwiseDist channel = bsc_pair(spec.crossover);
  for (int j = 1; j <= spec.k; ++j) {
    edges.emplace_back(0, j);
    pairs.emplace(Edge(0, j), channel);
  }
  return ForestModel(spec.d, 2, std::move(edges),
                     std::vector<NodeDist>(spec.d, NodeDist::uniform(2)), std::move(pairs));
}

EdgeList random_spanning_tree(int d, SeededRng& rng) {
  if (d < 1) throw std::invalid_argument("random_spanning_tree: d must be positive");
  // Wilson's algorithm on the complete graph K_d.
  std::vector<char> in_tree(d, 0);
  std::vector<int> next(d, -1);
  in_tree[rng.uniform_index(d)] = 1;
  for (int start = 0; start < d; ++start) {
    int u = start;
    while (!in_tree[u]) {
      int v = static_cast<int>(rng.uniform_index(d - 1));
      if (v >= u) ++v;
      next[u] = v;
      u = v;
    }
    for (u = start; !in_tree[u]; u = next[u]) in_tree[u] = 1;
  }
  EdgeList edges;
  for (int u = 0; u < d; ++u) {
    if (next[u] >= 0) edges.emplace_back(u, next[u]);
  }
  return canonical(std::move(edges));
}

ForestModel build_random_forest(int d, int k, int r, SeededRng& rng, const RandomForestPolicy& policy) {
  if (d < 1) throw std::invalid_argument("build_random_forest: d must be positive");
  if (k < 0 || k > d - 1) {
    throw std::invalid_argument("build_random_forest: k = " + std::to_string(k) +
                                " is infeasible for d = " + std::to_string(d));
  }
  if (r < 2 || r > kMaxAlphabet) throw std::invalid_argument("build_random_forest: bad alphabet size");
  const double kappa = policy.min_entry;
  if (!(kappa > 0.0) || kappa * r * r > 1.0) {
    throw std::invalid_argument("build_random_forest: min_entry must lie in (0, 1/r^2]");
  }

  EdgeList tree = random_spanning_tree(d, rng);
  std::shuffle(tree.begin(), tree.end(), rng);
  tree.resize(k);
  EdgeList edges = canonical(std::move(tree));
  const auto adj = adjacency(d, edges);

  std::vector<std::vector<double>> nodes(d);
  std::map<Edge, PairwiseDist> pairs;
  std::vector<char> seen(d, 0);
  std::vector<int> perm(r);
  for (int root = 0; root < d; ++root) {
    if (seen[root]) continue;
    // Roots keep every entry >= r * kappa so that children can meet the floor.
    std::vector<double> p = random_simplex(r, rng);
    for (double& v : p) v = r * kappa + (1.0 - r * r * kappa) * v;
    nodes[root] = std::move(p);
    seen[root] = 1;
    std::queue<int> frontier;
    frontier.push(root);
    while (!frontier.empty()) {
      const int a = frontier.front();
      frontier.pop();
      for (int b : adj[a]) {
        if (seen[b]) continue;
        seen[b] = 1;
        std::vector<double> joint(r * r);
        bool accepted = false;
        for (int attempt = 0; attempt < policy.max_attempts && !accepted; ++attempt) {
          std::iota(perm.begin(), perm.end(), 0);
          std::shuffle(perm.begin(), perm.end(), rng);
          for (int x = 0; x < r; ++x) {
            const std::vector<double> row = random_row(r, perm[x], kappa / nodes[a][x], rng);
            for (int y = 0; y < r; ++y) joint[x * r + y] = nodes[a][x] * row[y];
          }
          accepted = mutual_information(PairwiseDist::normalized(r, joint)) >= policy.min_edge_mi;
        }
        if (!accepted) {
          throw std::invalid_argument("build_random_forest: could not reach min_edge_mi");
        }
        std::vector<double> child(r, 0.0);
        for (int x = 0; x < r; ++x) {
          for (int y = 0; y < r; ++y) child[y] += joint[x * r + y];
        }
        nodes[b] = std::move(child);
        PairwiseDist table = PairwiseDist::normalized(r, std::move(joint));
        pairs.emplace(Edge(a, b), a < b ? std::move(table) : table.transposed());
        frontier.push(b);
      }
    }
  }

  std::vector<NodeDist> marginals;
  marginals.reserve(d);
  for (auto& p : nodes) marginals.push_back(NodeDist::normalized(std::move(p)));
  return ForestModel(d, r, std::move(edges), std::move(marginals), std::move(pairs));
}

SampleMatrix sample(const ForestModel& m, int n, SeededRng& rng) {
  if (m.d() < 2) throw std::invalid_argument("sample: need at least two variables");
  if (n < 1) throw std::invalid_argument("sample: n must be positive");
  const int d = m.d();
  const int r = m.r();
  const DirectedForest dir = directed_decomposition(m);

  // cdf[i] holds r entries for a root, r*r (one row per parent symbol) otherwise.
  std::vector<std::vector<double>> cdf(d);
  for (int i = 0; i < d; ++i) {
    const auto& parent = dir.parent[i];
    std::vector<double> table = parent ? transition(m, *parent, i)
                                       : std::vector<double>(m.node_marginal(i).probs().begin(),
                                                             m.node_marginal(i).probs().end());
    for (std::size_t row = 0; row < table.size() / r; ++row) {
      double acc = 0.0;
      for (int y = 0; y < r; ++y) table[row * r + y] = (acc += table[row * r + y]);
      table[row * r + r - 1] = 1.0;
    }
    cdf[i] = std::move(table);
  }

  std::vector<Symbol> data(static_cast<std::size_t>(n) * d);
  for (int row = 0; row < n; ++row) {
    Symbol* x = data.data() + static_cast<std::size_t>(row) * d;
    for (int i : dir.order) {
      const auto& parent = dir.parent[i];
      const std::size_t offset = parent ? static_cast<std::size_t>(x[*parent]) * r : 0;
      x[i] = static_cast<Symbol>(pick(std::span<const double>(cdf[i]).subspan(offset, r), rng.uniform()));
    }
  }
  return SampleMatrix(n, d, r, data);
}

}  // namespace clthres
