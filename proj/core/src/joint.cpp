#include "clthres/joint.hpp"

#include <cmath>
#include <stdexcept>

#include "clthres/learn.hpp"

namespace clthres {

std::size_t joint_state_count(int d, int r) {
  if (d < 1 || d > kMaxJointNodes) {
    throw std::invalid_argument("joint distribution: d must be in [1, 12] for exact enumeration");
  }
  if (r < 2) throw std::invalid_argument("joint distribution: alphabet size must be >= 2");
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) {
    n *= static_cast<std::size_t>(r);
    if (n > kMaxJointStates) {
      throw std::invalid_argument("joint distribution: r^d too large for exact enumeration");
    }
  }
  return n;
}

JointDist::JointDist(int d, int r, std::vector<double> probs)
    : d_(d), r_(r), probs_(std::move(probs)) {
  if (probs_.size() != joint_state_count(d, r)) {
    throw std::invalid_argument("JointDist: table must have r^d entries");
  }
  double sum = 0.0;
  for (double v : probs_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("JointDist: entries must be finite and nonnegative");
    }
    sum += v;
  }
  // Summation error grows with the number of states.
  if (std::abs(sum - 1.0) > kConstructionTol * std::max(1.0, std::sqrt(double(probs_.size())))) {
    throw std::invalid_argument("JointDist: probabilities do not sum to 1");
  }
}

JointDist JointDist::from_forest(const ForestModel& m) {
  const std::size_t n = joint_state_count(m.d(), m.r());
  std::vector<double> probs(n);
  std::vector<Symbol> x(m.d(), 0);
  for (std::size_t s = 0; s < n; ++s) {
    probs[s] = std::exp(log_likelihood(m, x));
    for (int i = 0; i < m.d(); ++i) {
      if (++x[i] < m.r()) break;
      x[i] = 0;
    }
  }
  double sum = 0.0;
  for (double v : probs) sum += v;
  for (double& v : probs) v /= sum;
  return JointDist(m.d(), m.r(), std::move(probs));
}

std::vector<Symbol> JointDist::decode(std::size_t state) const {
  std::vector<Symbol> x(d_);
  for (int i = 0; i < d_; ++i) {
    x[i] = static_cast<Symbol>(state % r_);
    state /= r_;
  }
  return x;
}

std::size_t JointDist::encode(std::span<const Symbol> x) const {
  std::size_t s = 0;
  for (int i = d_ - 1; i >= 0; --i) s = s * r_ + x[i];
  return s;
}

NodeDist JointDist::node_marginal(int i) const {
  if (i < 0 || i >= d_) throw std::invalid_argument("JointDist::node_marginal: bad node");
  std::vector<double> m(r_, 0.0);
  std::size_t stride = 1;
  for (int k = 0; k < i; ++k) stride *= r_;
  for (std::size_t s = 0; s < probs_.size(); ++s) m[(s / stride) % r_] += probs_[s];
  return NodeDist::normalized(std::move(m));
}

PairwiseDist JointDist::pairwise_marginal(int i, int j) const {
  if (i < 0 || i >= d_ || j < 0 || j >= d_ || i == j) {
    throw std::invalid_argument("JointDist::pairwise_marginal: bad node pair");
  }
  std::size_t si = 1, sj = 1;
  for (int k = 0; k < i; ++k) si *= r_;
  for (int k = 0; k < j; ++k) sj *= r_;
  std::vector<double> t(r_ * r_, 0.0);
  for (std::size_t s = 0; s < probs_.size(); ++s) {
    t[((s / si) % r_) * r_ + (s / sj) % r_] += probs_[s];
  }
  return PairwiseDist::normalized(r_, std::move(t));
}

double kl_divergence(const JointDist& p, const JointDist& q) {
  if (p.d() != q.d() || p.r() != q.r()) throw std::invalid_argument("kl_divergence: size mismatch");
  double d = 0.0;
  for (std::size_t s = 0; s < p.states(); ++s) {
    if (p[s] <= 0.0) continue;
    if (q[s] <= 0.0) return kInfiniteDivergence;
    d += p[s] * std::log(p[s] / q[s]);
  }
  return d;
}

double kl_divergence(const JointDist& p, const ForestModel& q) {
  if (p.d() != q.d() || p.r() != q.r()) throw std::invalid_argument("kl_divergence: size mismatch");
  double d = 0.0;
  for (std::size_t s = 0; s < p.states(); ++s) {
    if (p[s] <= 0.0) continue;
    const double lq = log_likelihood(q, p.decode(s));
    if (std::isinf(lq)) return kInfiniteDivergence;
    d += p[s] * (std::log(p[s]) - lq);
  }
  return d;
}

ForestModel project_onto_structure(const JointDist& p, EdgeList structure) {
  structure = canonical(std::move(structure));
  if (!is_forest(p.d(), structure)) {
    throw std::invalid_argument("project_onto_structure: structure is not a forest");
  }
  std::vector<NodeDist> nodes;
  nodes.reserve(p.d());
  for (int i = 0; i < p.d(); ++i) nodes.push_back(p.node_marginal(i));
  std::map<Edge, PairwiseDist> pairs;
  for (const Edge& e : structure) pairs.emplace(e, p.pairwise_marginal(e.u, e.v));
  return ForestModel(p.d(), p.r(), std::move(structure), std::move(nodes), std::move(pairs));
}

ForestModel forest_projection(const JointDist& joint) {
  const int d = joint.d();
  if (d < 2) return project_onto_structure(joint, {});
  MiMatrix mi = MiMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      mi(i, j) = mi(j, i) = mutual_information(joint.pairwise_marginal(i, j));
    }
  }
  const EdgeRanking ranking = kruskal_mwst(mi);
  EdgeList kept;
  for (std::size_t k = 0; k < ranking.edges.size(); ++k) {
    if (ranking.scores[k] > kMiClampTol) kept.push_back(ranking.edges[k]);
  }
  return project_onto_structure(joint, std::move(kept));
}

}  // namespace clthres
