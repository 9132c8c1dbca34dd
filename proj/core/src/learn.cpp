#include "clthres/learn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace clthres {

EdgeRanking kruskal_mwst(const MiMatrix& weights) {
  const Eigen::Index d = weights.rows();
  if (weights.cols() != d) throw std::invalid_argument("kruskal_mwst: weight matrix must be square");
  if (d < 2) throw std::invalid_argument("kruskal_mwst: need at least two nodes");

  struct Candidate {
    double w;
    Edge e;
  };
  std::vector<Candidate> cands;
  cands.reserve(static_cast<std::size_t>(d * (d - 1) / 2));
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double w = weights(i, j);
      if (!std::isfinite(w)) throw std::invalid_argument("kruskal_mwst: weights must be finite");
      if (w != weights(j, i)) throw std::invalid_argument("kruskal_mwst: weights must be symmetric");
      cands.push_back({w, Edge(i, j)});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.w != b.w) return a.w > b.w;
    return a.e < b.e;
  });

  EdgeRanking out;
  out.edges.reserve(static_cast<std::size_t>(d - 1));
  out.scores.reserve(static_cast<std::size_t>(d - 1));
  DisjointSet ds(static_cast<int>(d));
  for (const Candidate& c : cands) {
    if (!ds.unite(c.e.u, c.e.v)) continue;
    out.edges.push_back(c.e);
    out.scores.push_back(c.w);
    if (static_cast<Eigen::Index>(out.edges.size()) == d - 1) break;
  }
  return out;
}

int threshold_estimate(std::span<const double> scores, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("threshold_estimate: eps must be positive and finite");
  }
  if (!std::is_sorted(scores.begin(), scores.end(), std::greater<>())) {
    throw std::invalid_argument("threshold_estimate: scores must be nonincreasing");
  }
  // First score that is <= eps.
  auto cut = std::partition_point(scores.begin(), scores.end(), [eps](double s) { return s > eps; });
  return static_cast<int>(cut - scores.begin());
}

RegSchedule RegSchedule::power(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("RegSchedule::power: beta must lie in (0, 1), got " +
                                std::to_string(beta));
  }
  RegSchedule s;
  s.kind_ = Kind::kPower;
  s.value_ = beta;
  return s;
}

RegSchedule RegSchedule::oracle(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("RegSchedule::oracle: eps must be positive and finite");
  }
  RegSchedule s;
  s.kind_ = Kind::kOracle;
  s.value_ = eps;
  return s;
}

RegSchedule RegSchedule::explicit_sequence(std::vector<std::pair<int, double>> steps) {
  if (steps.empty()) throw std::invalid_argument("RegSchedule::explicit_sequence: no steps");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(steps[k].second > 0.0) || !std::isfinite(steps[k].second)) {
      throw std::invalid_argument("RegSchedule::explicit_sequence: eps must be positive");
    }
    if (k > 0 && steps[k].first <= steps[k - 1].first) {
      throw std::invalid_argument("RegSchedule::explicit_sequence: n must strictly increase");
    }
  }
  RegSchedule s;
  s.kind_ = Kind::kExplicit;
  s.steps_ = std::move(steps);
  return s;
}

double RegSchedule::beta() const {
  if (kind_ != Kind::kPower) throw std::logic_error("RegSchedule::beta: not a power schedule");
  return value_;
}

double RegSchedule::operator()(int n) const {
  if (n < 1) throw std::invalid_argument("RegSchedule: n must be positive");
  switch (kind_) {
    case Kind::kPower:
      return std::pow(static_cast<double>(n), -value_);
    case Kind::kOracle:
      return value_;
    case Kind::kExplicit: {
      auto it = std::upper_bound(steps_.begin(), steps_.end(), n,
                                 [](int v, const auto& step) { return v < step.first; });
      if (it == steps_.begin()) {
        throw std::invalid_argument("RegSchedule: n = " + std::to_string(n) +
                                    " precedes the first explicit step");
      }
      return std::prev(it)->second;
    }
  }
  return value_;
}

ForestModel fit_structure(const SampleMatrix& s, EdgeList structure) {
  std::vector<NodeDist> nodes;
  nodes.reserve(s.d());
  for (int i = 0; i < s.d(); ++i) nodes.push_back(node_type(s, i));
  structure = canonical(std::move(structure));
  std::map<Edge, PairwiseDist> pairs;
  for (const Edge& e : structure) pairs.emplace(e, empirical_pairwise(s, e.u, e.v).type);
  return ForestModel(s.d(), s.r(), std::move(structure), std::move(nodes), std::move(pairs));
}

EdgeRanking chow_liu(const SampleMatrix& s) { return kruskal_mwst(all_empirical_mi(s)); }

LearnedModel prune_ranking(const SampleMatrix& s, const EdgeRanking& ranking, double eps) {
  const int k_hat = threshold_estimate(ranking.scores, eps);
  EdgeList kept(ranking.edges.begin(), ranking.edges.begin() + k_hat);
  ForestModel model = fit_structure(s, kept);
  return LearnedModel{ranking, eps, k_hat, std::move(kept), std::move(model)};
}

LearnedModel clthres(const SampleMatrix& s, const RegSchedule& sched) {
  return prune_ranking(s, chow_liu(s), sched(s.n()));
}

}  // namespace clthres
