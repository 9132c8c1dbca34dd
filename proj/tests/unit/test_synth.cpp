#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "clthres/rng.hpp"
#include "clthres/synth.hpp"
#include "oracles.hpp"

using namespace clthres;

TEST_SUITE_BEGIN("synth");

namespace {

double bsc_mi(double c) { return std::log(2.0) + c * std::log(c) + (1 - c) * std::log(1 - c); }

}  // namespace

TEST_CASE("seeded random streams") {
  SeededRng a(42, 3), b(42, 3), c(42, 4), e(43, 3);
  bool differ_stream = false, differ_seed = false;
  for (int k = 0; k < 100; ++k) {
    const auto x = a();
    CHECK(x == b());
    differ_stream |= x != c();
    differ_seed |= x != e();
  }
  CHECK(differ_stream);
  CHECK(differ_seed);

  SeededRng u(1);
  for (int k = 0; k < 10000; ++k) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    CHECK(u.uniform_index(7) < 7);
  }
  CHECK(u.uniform_index(1) == 0);
  CHECK(derive_seed({1, 2}) != derive_seed({2, 1}));
  CHECK(derive_seed({1, 2}) == derive_seed({1, 2}));
  CHECK(splitmix64(0) != splitmix64(1));
}

TEST_CASE("star forests") {
  const ForestModel m = build_star_forest({3, 2, 0.3});
  CHECK(m.edges() == EdgeList{Edge(0, 1), Edge(0, 2)});
  for (const Edge& e : m.edges()) {
    CHECK(mutual_information(m.edge_marginal(e)) == doctest::Approx(bsc_mi(0.3)).epsilon(1e-13));
  }
  CHECK(bsc_mi(0.3) == doctest::Approx(0.082282).epsilon(1e-5));
  CHECK(m.min_edge_mi() == doctest::Approx(bsc_mi(0.3)).epsilon(1e-13));

  const ForestModel full = build_star_forest({6, 5, 0.2});
  CHECK(full.edges().size() == 5);
  for (int i = 1; i < 6; ++i) CHECK(full.neighbors(i) == std::vector<int>{0});

  const ForestModel partial = build_star_forest({21, 10, 0.3});
  for (int i = 11; i < 21; ++i) CHECK(partial.neighbors(i).empty());
  for (int i = 0; i < 21; ++i) CHECK(partial.node_marginal(i) == NodeDist::uniform(2));

  CHECK_THROWS_AS(build_star_forest({5, 2, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(build_star_forest({5, 2, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_star_forest({5, 5, 0.3}), std::invalid_argument);
  CHECK_THROWS_AS(build_star_forest({1, 0, 0.3}), std::invalid_argument);

  // Near the independence limit I(BSC(0.5 - c')) is close to 2 c'^2.
  const ForestModel weak = build_star_forest({3, 1, 0.49});
  const double w = mutual_information(weak.edge_marginal(Edge(0, 1)));
  CHECK(w > 0.0);
  CHECK(w == doctest::Approx(2 * 0.01 * 0.01).epsilon(1e-3));
  CHECK(build_star_forest({4, 0, 0.3}).edges().empty());
}

TEST_CASE("random spanning trees are uniform over labeled trees") {
  SeededRng rng(2718);
  std::map<EdgeList, int> counts;
  const int draws = 32000;
  for (int k = 0; k < draws; ++k) {
    EdgeList t = canonical(random_spanning_tree(4, rng));
    CHECK(t.size() == 3);
    CHECK(is_forest(4, t));
    ++counts[t];
  }
  CHECK(counts.size() == 16);
  const double expect = draws / 16.0;
  const double sd = std::sqrt(expect * (1 - 1.0 / 16));
  for (const auto& [t, c] : counts) CHECK(std::abs(c - expect) < 5 * sd);
}

TEST_CASE("random forests respect size and policy") {
  SeededRng rng(9);
  CHECK(build_random_forest(5, 0, 2, rng).edges().empty());
  const ForestModel tree = build_random_forest(8, 7, 3, rng);
  CHECK(tree.edges().size() == 7);
  const auto labels = component_labels(8, tree.edges());
  CHECK(std::set<int>(labels.begin(), labels.end()).size() == 1);
  CHECK_THROWS_AS(build_random_forest(5, 5, 2, rng), std::invalid_argument);

  RandomForestPolicy policy;
  policy.min_entry = 0.02;
  for (int k = 0; k < 10000; ++k) {
    const ForestModel m = build_random_forest(6, 3, 2, rng, policy);
    CHECK(m.edges().size() == 3);
    CHECK(is_forest(6, m.edges()));
    for (const auto& [e, t] : m.edge_marginals()) {
      for (double v : t.table()) CHECK(v >= 0.02 - 1e-15);
    }
  }

  policy.min_edge_mi = 0.05;
  for (int k = 0; k < 50; ++k) {
    const ForestModel m = build_random_forest(7, 4, 3, rng, policy);
    CHECK(m.min_edge_mi() >= 0.05);
    CHECK(m.positive());
  }
  policy.min_edge_mi = 10.0;
  policy.max_attempts = 5;
  CHECK_THROWS_AS(build_random_forest(4, 2, 2, rng, policy), std::invalid_argument);
}

TEST_CASE("ancestral sampling") {
  const ForestModel ind = ForestModel::independent(std::vector<NodeDist>(4, NodeDist::uniform(2)));
  SeededRng r1(5, 1);
  const SampleMatrix s = sample(ind, 100000, r1);
  for (int i = 0; i < 4; ++i) {
    double mean = 0.0;
    for (Symbol v : s.column(i)) mean += v;
    mean /= s.n();
    CHECK(mean >= 0.49);
    CHECK(mean <= 0.51);
  }

  const ForestModel copy(3, 2, {Edge(0, 2)}, std::vector<NodeDist>(3, NodeDist::uniform(2)),
                         {{Edge(0, 2), PairwiseDist(2, {0.5, 0.0, 0.0, 0.5})}});
  SeededRng r2(6);
  const SampleMatrix c = sample(copy, 1000, r2);
  for (int k = 0; k < 1000; ++k) CHECK(c(k, 0) == c(k, 2));

  SeededRng a(77, 2), b(77, 2);
  SeededRng tree_rng(3);
  const ForestModel m = build_random_forest(7, 5, 3, tree_rng);
  CHECK(sample(m, 500, a) == sample(m, 500, b));

  SeededRng r3(8);
  const SampleMatrix big = sample(m, 100000, r3);
  for (const Edge& e : m.edges()) {
    CHECK(max_abs_diff(empirical_pairwise(big, e.u, e.v).type.table(), m.edge_marginal(e).table()) < 0.03);
  }
}

TEST_CASE("sampled joint type matches the exact joint") {
  SeededRng g(100);
  for (int d : {3, 6}) {
    const ForestModel m = build_random_forest(d, d - 2, 2, g);
    const auto exact = oracle::joint_of(m);
    SeededRng rng(d, 0);
    const JointDist jt = joint_type(sample(m, 1000000, rng));
    double tv = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k) tv += std::abs(jt[k] - exact[k]);
    CHECK(0.5 * tv < 0.01);
  }
}

TEST_SUITE_END();
