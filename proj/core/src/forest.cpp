#include "clthres/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace clthres {
namespace {

std::string edge_name(Edge e) { return std::to_string(e.u) + "-" + std::to_string(e.v); }

// Node sequence from i to j, or empty if they are in different components.
std::vector<int> path_between(const ForestModel& m, int i, int j) {
  std::vector<int> prev(m.d(), -1);
  std::vector<char> seen(m.d(), 0);
  std::queue<int> frontier;
  frontier.push(i);
  seen[i] = 1;
  while (!frontier.empty()) {
    const int a = frontier.front();
    frontier.pop();
    if (a == j) break;
    for (int b : m.neighbors(a)) {
      if (seen[b]) continue;
      seen[b] = 1;
      prev[b] = a;
      frontier.push(b);
    }
  }
  if (!seen[j]) return {};
  std::vector<int> path;
  for (int v = j; v != -1; v = prev[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

void check_node(const ForestModel& m, int i, const char* what) {
  if (i < 0 || i >= m.d()) {
    throw std::invalid_argument(std::string(what) + ": node " + std::to_string(i) + " out of range");
  }
}

}  // namespace

ForestModel::ForestModel(int d, int r, EdgeList edges, std::vector<NodeDist> node_marginals,
                         std::map<Edge, PairwiseDist> edge_marginals)
    : d_(d), r_(r), edges_(canonical(std::move(edges))), nodes_(std::move(node_marginals)),
      pairs_(std::move(edge_marginals)) {
  if (d < 1) throw std::invalid_argument("ForestModel: need at least one node");
  if (static_cast<int>(nodes_.size()) != d) {
    throw std::invalid_argument("ForestModel: expected one node marginal per node");
  }
  if (!is_forest(d, edges_)) throw std::invalid_argument("ForestModel: edges do not form a forest");
  if (pairs_.size() != edges_.size()) {
    throw std::invalid_argument("ForestModel: edge marginals do not match the edge set");
  }
  for (const NodeDist& n : nodes_) {
    if (n.r() != r) throw std::invalid_argument("ForestModel: node marginal alphabet mismatch");
  }
  for (const Edge& e : edges_) {
    auto it = pairs_.find(e);
    if (it == pairs_.end()) {
      throw std::invalid_argument("ForestModel: missing marginal for edge " + edge_name(e));
    }
    const PairwiseDist& p = it->second;
    if (p.r() != r) throw std::invalid_argument("ForestModel: edge marginal alphabet mismatch");
    const NodeDist row = p.row_marginal();
    const NodeDist col = p.col_marginal();
    if (max_abs_diff(row.probs(), nodes_[e.u].probs()) > kConsistencyTol ||
        max_abs_diff(col.probs(), nodes_[e.v].probs()) > kConsistencyTol) {
      throw std::invalid_argument("ForestModel: edge " + edge_name(e) +
                                  " marginal is inconsistent with its node marginals");
    }
  }
  adj_ = adjacency(d, edges_);
}

ForestModel ForestModel::independent(std::vector<NodeDist> node_marginals) {
  if (node_marginals.empty()) throw std::invalid_argument("ForestModel: need at least one node");
  const int d = static_cast<int>(node_marginals.size());
  const int r = node_marginals.front().r();
  return ForestModel(d, r, {}, std::move(node_marginals), {});
}

bool ForestModel::positive() const noexcept {
  return std::all_of(nodes_.begin(), nodes_.end(), [](const NodeDist& n) { return n.positive(); }) &&
         std::all_of(pairs_.begin(), pairs_.end(), [](const auto& kv) { return kv.second.positive(); });
}

double ForestModel::min_edge_mi() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [e, p] : pairs_) m = std::min(m, mutual_information(p));
  return m;
}

DirectedForest directed_decomposition(const ForestModel& m, std::optional<std::vector<int>> roots) {
  const int d = m.d();
  const std::vector<int> label = component_labels(d, m.edges());
  const int ncomp = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;

  std::vector<int> chosen(ncomp, -1);
  if (roots) {
    for (int root : *roots) {
      check_node(m, root, "directed_decomposition");
      int& slot = chosen[label[root]];
      if (slot != -1) {
        throw std::invalid_argument("directed_decomposition: two roots in one component");
      }
      slot = root;
    }
    if (std::find(chosen.begin(), chosen.end(), -1) != chosen.end()) {
      throw std::invalid_argument("directed_decomposition: a component has no root");
    }
  } else {
    for (int i = d - 1; i >= 0; --i) chosen[label[i]] = i;
  }

  DirectedForest out;
  out.roots = chosen;
  std::sort(out.roots.begin(), out.roots.end());
  out.parent.assign(d, std::nullopt);
  out.order.reserve(d);
  std::vector<char> seen(d, 0);
  for (int root : out.roots) {
    std::queue<int> frontier;
    frontier.push(root);
    seen[root] = 1;
    while (!frontier.empty()) {
      const int a = frontier.front();
      frontier.pop();
      out.order.push_back(a);
      for (int b : m.neighbors(a)) {
        if (seen[b]) continue;
        seen[b] = 1;
        out.parent[b] = a;
        frontier.push(b);
      }
    }
  }
  return out;
}

std::vector<double> transition(const ForestModel& m, int from, int to) {
  check_node(m, from, "transition");
  check_node(m, to, "transition");
  const Edge e(from, to);
  if (!m.has_edge(e)) throw std::invalid_argument("transition: nodes are not adjacent");
  const PairwiseDist& joint = m.edge_marginal(e);
  const bool from_is_row = (e.u == from);
  const int r = m.r();
  const NodeDist& pf = m.node_marginal(from);
  const NodeDist& pt = m.node_marginal(to);

  std::vector<double> t(r * r);
  for (int x = 0; x < r; ++x) {
    double row_sum = 0.0;
    for (int y = 0; y < r; ++y) {
      const double v = from_is_row ? joint(x, y) : joint(y, x);
      t[x * r + y] = v;
      row_sum += v;
    }
    if (pf[x] <= 0.0 || row_sum <= 0.0) {
      for (int y = 0; y < r; ++y) t[x * r + y] = pt[y];
    } else {
      for (int y = 0; y < r; ++y) t[x * r + y] /= row_sum;
    }
  }
  return t;
}

PairwiseDist pairwise_marginal(const ForestModel& m, int i, int j) {
  check_node(m, i, "pairwise_marginal");
  check_node(m, j, "pairwise_marginal");
  if (i == j) throw std::invalid_argument("pairwise_marginal: nodes must differ");
  const Edge e(i, j);
  if (m.has_edge(e)) {
    const PairwiseDist& p = m.edge_marginal(e);
    return i < j ? p : p.transposed();
  }
  const std::vector<int> path = path_between(m, i, j);
  if (path.empty()) return PairwiseDist::outer(m.node_marginal(i), m.node_marginal(j));

  const int r = m.r();
  // joint(x, z) = P(X_i = x, X_a = z) for the current path node a.
  const PairwiseDist first = pairwise_marginal(m, path[0], path[1]);
  std::vector<double> joint(first.table().begin(), first.table().end());
  std::vector<double> next(r * r);
  for (std::size_t k = 1; k + 1 < path.size(); ++k) {
    const std::vector<double> t = transition(m, path[k], path[k + 1]);
    std::fill(next.begin(), next.end(), 0.0);
    for (int x = 0; x < r; ++x) {
      for (int z = 0; z < r; ++z) {
        const double a = joint[x * r + z];
        if (a == 0.0) continue;
        for (int y = 0; y < r; ++y) next[x * r + y] += a * t[z * r + y];
      }
    }
    joint.swap(next);
  }
  return PairwiseDist::normalized(r, std::move(joint));
}

double log_likelihood(const ForestModel& m, std::span<const Symbol> x) {
  if (static_cast<int>(x.size()) != m.d()) {
    throw std::invalid_argument("log_likelihood: state has wrong length");
  }
  for (Symbol s : x) {
    if (s >= m.r()) throw std::invalid_argument("log_likelihood: symbol outside alphabet");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double ll = 0.0;
  for (int i = 0; i < m.d(); ++i) {
    const double p = m.node_marginal(i)[x[i]];
    if (p <= 0.0) return kNegInf;
    ll += std::log(p);
  }
  for (const Edge& e : m.edges()) {
    const double pij = m.edge_marginal(e)(x[e.u], x[e.v]);
    if (pij <= 0.0) return kNegInf;
    ll += std::log(pij / (m.node_marginal(e.u)[x[e.u]] * m.node_marginal(e.v)[x[e.v]]));
  }
  return ll;
}

double forest_kl(const ForestModel& p, const ForestModel& q) {
  if (p.d() != q.d() || p.r() != q.r()) {
    throw std::invalid_argument("forest_kl: models differ in size or alphabet");
  }
  const int r = p.r();
  double d = 0.0;
  for (int i = 0; i < p.d(); ++i) {
    const double node = kl_divergence(p.node_marginal(i), q.node_marginal(i));
    if (std::isinf(node)) return kInfiniteDivergence;
    d += node;
  }
  for (const auto& [e, pe] : p.edge_marginals()) d += mutual_information(pe);
  for (const auto& [e, qe] : q.edge_marginals()) {
    const PairwiseDist pe = pairwise_marginal(p, e.u, e.v);
    const NodeDist& qu = q.node_marginal(e.u);
    const NodeDist& qv = q.node_marginal(e.v);
    for (int x = 0; x < r; ++x) {
      for (int y = 0; y < r; ++y) {
        const double w = pe(x, y);
        if (w <= 0.0) continue;
        if (qe(x, y) <= 0.0) return kInfiniteDivergence;
        d -= w * std::log(qe(x, y) / (qu[x] * qv[y]));
      }
    }
  }
  if (d < 0.0 && d >= -kMiClampTol) d = 0.0;
  return d;
}

ForestModel project_onto_structure(const ForestModel& p, EdgeList structure) {
  structure = canonical(std::move(structure));
  if (!is_forest(p.d(), structure)) {
    throw std::invalid_argument("project_onto_structure: structure is not a forest");
  }
  std::map<Edge, PairwiseDist> pairs;
  for (const Edge& e : structure) pairs.emplace(e, pairwise_marginal(p, e.u, e.v));
  return ForestModel(p.d(), p.r(), std::move(structure), p.node_marginals(), std::move(pairs));
}

}  // namespace clthres
