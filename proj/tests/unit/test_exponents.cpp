#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "clthres/exponents.hpp"
#include "oracles.hpp"

using namespace clthres;

TEST_SUITE_BEGIN("exponents");

namespace {

PairwiseDist bsc(double c) { return PairwiseDist(2, {(1 - c) / 2, c / 2, c / 2, (1 - c) / 2}); }

oracle::Binary binary(const PairwiseDist& p) { return {{p(0, 0), p(0, 1), p(1, 0), p(1, 1)}}; }

NodeDist random_node(int r, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(r);
  for (double& v : w) v = u(g);
  return NodeDist::normalized(w);
}

PairwiseDist random_positive(int r, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(r * r);
  for (double& v : w) v = u(g);
  return PairwiseDist::normalized(r, w);
}

}  // namespace

TEST_CASE("column-major flattening") {
  const PairwiseDist p(2, {0.1, 0.2, 0.3, 0.4});
  const Eigen::VectorXd v = vec(p);
  CHECK(v(vec_index(2, 0, 1)) == 0.2);
  CHECK(v(1) == 0.3);
  CHECK(unvec(2, v) == p);
}

TEST_CASE("MI Hessian against finite differences") {
  std::mt19937_64 g(12);
  for (int trial = 0; trial < 30; ++trial) {
    const int r = 2 + trial % 3;
    const PairwiseDist p = trial % 2 ? random_positive(r, g) : PairwiseDist::outer(random_node(r, g), random_node(r, g));
    const LocalCurvature c = mi_hessian(p);
    const Eigen::VectorXd q = vec(p);
    const auto fd = oracle::fd_hessian(std::vector<double>(q.data(), q.data() + q.size()), r, 1e-2 * q.minCoeff());
    for (int i = 0; i < r * r; ++i) {
      CHECK(c.pi_e(i, i) == doctest::Approx(1.0 / q(i)));
      for (int j = 0; j < r * r; ++j) {
        CHECK(std::abs(c.h_e(i, j) - fd[i][j]) < 1e-5);
        CHECK(std::abs(c.h_e(i, j) - c.h_e(j, i)) < 1e-8);
        if (i != j) CHECK(c.pi_e(i, j) == 0.0);
      }
    }
  }
  CHECK_THROWS_AS(mi_hessian(PairwiseDist(2, {0.5, 0.0, 0.0, 0.5})), std::invalid_argument);
}

TEST_CASE("Hessian of the transposed table is the permuted Hessian") {
  std::mt19937_64 g(5);
  const int r = 3;
  const PairwiseDist p = random_positive(r, g);
  const Eigen::MatrixXd h = mi_hessian(p).h_e;
  const Eigen::MatrixXd ht = mi_hessian(p.transposed()).h_e;
  const auto sigma = [&](int i) { return (i / r) + r * (i % r); };
  for (int i = 0; i < r * r; ++i) {
    for (int j = 0; j < r * r; ++j) CHECK(ht(sigma(i), sigma(j)) == doctest::Approx(h(i, j)).epsilon(1e-12));
  }

  // Uniform binary product: 1/q = 4 and 1/a = 1/b = 2, so cells sharing a row or a
  // column couple with -2 and everything else cancels to 0.
  const Eigen::MatrixXd hu = mi_hessian(PairwiseDist::uniform(2)).h_e;
  const auto fd = oracle::fd_hessian({0.25, 0.25, 0.25, 0.25}, 2, 1e-3);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(std::abs(hu(i, j) - fd[i][j]) < 1e-5);
      const bool coupled = i != j && (i % 2 == j % 2 || i / 2 == j / 2);
      CHECK(std::abs(hu(i, j) - (coupled ? -2.0 : 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("curvature is positive semidefinite on the tangent space at a product") {
  std::mt19937_64 g(19);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 40; ++trial) {
    const int r = 2 + trial % 2;
    const PairwiseDist p = PairwiseDist::outer(random_node(r, g), random_node(r, g));
    const Eigen::MatrixXd h = mi_hessian(p).h_e;
    for (int k = 0; k < 50; ++k) {
      Eigen::VectorXd v(r * r);
      for (int i = 0; i < r * r; ++i) v(i) = n01(g);
      v.array() -= v.mean();
      CHECK(v.dot(h * v) >= -1e-10);
    }
  }
}

TEST_CASE("mu star equals one on product distributions") {
  CHECK(std::abs(mu_star(PairwiseDist::uniform(2)) - 1.0) < 1e-6);
  std::mt19937_64 g(50);
  for (int trial = 0; trial < 50; ++trial) {
    const int r = 2 + trial % 2;
    const PairwiseDist p = PairwiseDist::outer(random_node(r, g), random_node(r, g));
    CHECK(std::abs(mu_star(p) - 1.0) < 1e-6);
    const Eigen::MatrixXd n = normalized_curvature(mi_hessian(p));
    const Eigen::MatrixXd gap = Eigen::MatrixXd::Identity(r * r, r * r) - n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gap + gap.transpose()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
  CHECK_THROWS_AS(mu_star(bsc(0.3)), std::invalid_argument);
  CHECK_THROWS_AS(mu_star(PairwiseDist(2, {0.5, 0.5, 0.0, 0.0})), std::invalid_argument);
}

TEST_CASE("underestimation rate at zero") {
  const RateFunctionResult prod = underestimation_rate(PairwiseDist::outer(NodeDist({0.3, 0.7}), NodeDist({0.6, 0.4})));
  CHECK(std::abs(prod.value) < 1e-12);

  for (double c : {0.3, 0.1, 0.45, 0.49}) {
    const PairwiseDist p = bsc(c);
    const RateFunctionResult res = underestimation_rate(p);
    const double grid = oracle::grid_under_zero(binary(p));
    CHECK(std::abs(res.value - grid) < 1e-4);
    CHECK(mutual_information(res.argmin) < 1e-8);
    CHECK_FALSE(res.diagnostics.locally_optimal_only);
  }
  const double i3 = mutual_information(bsc(0.3));
  const double l3 = underestimation_rate(bsc(0.3)).value;
  CHECK(l3 > 0.0);
  CHECK(std::abs(l3 - i3) / i3 < 0.25);
  const double i49 = mutual_information(bsc(0.49));
  CHECK(std::abs(underestimation_rate(bsc(0.49)).value - i49) / i49 < 0.05);

  std::mt19937_64 g(3);
  for (int trial = 0; trial < 5; ++trial) {
    const PairwiseDist p = random_positive(2, g);
    CHECK(std::abs(underestimation_rate(p).value - oracle::grid_under_zero(binary(p))) < 1e-4);
  }

  const PairwiseDist p3 = random_positive(3, g);
  const RateFunctionResult r3 = underestimation_rate(p3);
  CHECK(r3.diagnostics.locally_optimal_only);
  CHECK(r3.value > 0.0);
  // The product of p's own marginals is feasible and costs D(p_X p_Y || p).
  const PairwiseDist split = PairwiseDist::outer(p3.row_marginal(), p3.col_marginal());
  CHECK(r3.value <= kl_divergence(split, p3) + 1e-12);
}

TEST_CASE("underestimation rate with a positive level") {
  const PairwiseDist p = bsc(0.2);
  double prev = std::numeric_limits<double>::infinity();
  for (double a : {0.0, 0.01, 0.05, 0.1, 0.15}) {
    const RateFunctionResult res = underestimation_rate(p, a);
    CHECK(res.value <= prev + 1e-10);
    prev = res.value;
    CHECK(mutual_information(res.argmin) <= a + 1e-8);
    if (a > 0.0) CHECK(std::abs(res.value - oracle::grid_under(binary(p), a)) < 1e-4);
  }
  CHECK(underestimation_rate(p, 1.0).value == 0.0);
}

TEST_CASE("overestimation rate on products") {
  const PairwiseDist u = PairwiseDist::uniform(2);
  CHECK(overestimation_rate(u, 1e-6).value < 1e-4);

  double prev = 0.0;
  for (double b : {0.001, 0.005, 0.01}) {
    const RateFunctionResult res = overestimation_rate(u, b);
    CHECK(res.value / b >= 0.9);
    CHECK(res.value / b <= 1.1);
    CHECK(res.value >= prev);
    prev = res.value;
    CHECK(mutual_information(res.argmin) >= b - 1e-8);
    CHECK(std::abs(res.value - oracle::grid_over(binary(u), b)) < 1e-4);
    REQUIRE(res.surrogate.has_value());
    CHECK(*res.surrogate >= mu_star(u) * b - 1e-6);
    CHECK_FALSE(res.diagnostics.locally_optimal_only);
  }

  const PairwiseDist skew = PairwiseDist::outer(NodeDist({0.3, 0.7}), NodeDist({0.6, 0.4}));
  for (double b : {0.002, 0.02, 0.05}) {
    const RateFunctionResult res = overestimation_rate(skew, b);
    CHECK(std::abs(res.value - oracle::grid_over(binary(skew), b)) < 1e-4);
    CHECK(*res.surrogate >= mu_star(skew) * b - 1e-6);
  }

  // D(Q||p) = I(Q) + D(Q_X||p_X) + D(Q_Y||p_Y) for product p, so the
  // minimum at a reachable level b is b itself.
  std::mt19937_64 g(4);
  const PairwiseDist p3 = PairwiseDist::outer(random_node(3, g), random_node(3, g));
  const RateFunctionResult r3 = overestimation_rate(p3, 0.01);
  CHECK(r3.diagnostics.locally_optimal_only);
  CHECK(std::abs(r3.value - 0.01) < 1e-6);
}

TEST_CASE("overestimation rate on a dependent pair") {
  const PairwiseDist p = bsc(0.3);
  const double ip = mutual_information(p);
  CHECK(std::abs(overestimation_rate(p, ip / 2).value) < 1e-12);
  const RateFunctionResult res = overestimation_rate(p, 0.15);
  CHECK(std::abs(res.value - oracle::grid_over(binary(p), 0.15)) < 1e-4);
  CHECK_FALSE(res.surrogate.has_value());
}

TEST_CASE("quadratic surrogate") {
  const PairwiseDist u = PairwiseDist::uniform(2);
  CHECK(quadratic_surrogate(u, 0.01) == doctest::Approx(0.01).epsilon(1e-10));
  std::mt19937_64 g(6);
  for (int k = 0; k < 10; ++k) {
    const PairwiseDist p = PairwiseDist::outer(random_node(3, g), random_node(3, g));
    CHECK(quadratic_surrogate(p, 0.02) >= mu_star(p) * 0.02 - 1e-6);
  }
}

TEST_CASE("Euclidean approximation of KL") {
  const PairwiseDist u = PairwiseDist::uniform(2);
  const EuclideanApprox same = euclidean_kl_approx(u, u);
  CHECK(same.exact == 0.0);
  CHECK(same.approx == 0.0);
  CHECK(same.gap == 0.0);

  double prev = std::numeric_limits<double>::infinity();
  for (double delta : {1e-1, 1e-2, 1e-3}) {
    const PairwiseDist q(2, {0.25 + delta, 0.25 - delta, 0.25, 0.25});
    const EuclideanApprox e = euclidean_kl_approx(u, q);
    double ref = 0.0;
    for (int k = 0; k < 4; ++k) ref += oracle::xlogy_ratio(0.25, q.table()[k]);
    CHECK(e.exact == doctest::Approx(ref).epsilon(1e-12));
    CHECK(e.approx == doctest::Approx(delta * delta * 4.0).epsilon(1e-12));
    const double ratio = std::abs(e.gap) / (delta * delta);
    CHECK(ratio < prev);
    prev = ratio;
    if (delta == 1e-3) CHECK(std::abs(e.gap) / e.approx < 0.01);
    if (delta == 1e-1) CHECK(std::abs(e.gap) / e.approx > 0.01);
  }
}

TEST_CASE("converse sample-size bounds") {
  const ConverseBounds c = converse_sample_bound(100, 50, 2, 1.0);
  CHECK(c.fixed_k == doctest::Approx(49 * std::log(100.0) / (100 * std::log(2.0))).epsilon(1e-14));
  CHECK(c.fixed_k == doctest::Approx(3.2555).epsilon(1e-4));
  CHECK(c.all_forests == doctest::Approx(std::log(100.0) / std::log(2.0)).epsilon(1e-14));
  CHECK(c.all_forests == doctest::Approx(6.6439).epsilon(1e-4));
  CHECK(converse_sample_bound(10, 1, 2, 0.5).fixed_k == 0.0);
  CHECK(converse_sample_bound(10, 0, 2, 0.5).fixed_k == 0.0);
  CHECK_THROWS_AS(converse_sample_bound(10, 3, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(converse_sample_bound(10, 3, 2, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(converse_sample_bound(10, 10, 2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(converse_sample_bound(10, 3, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(converse_sample_bound(1, 0, 2, 0.5), std::invalid_argument);
}

TEST_CASE("forest counts and their bounds") {
  for (int d = 1; d <= 7; ++d) {
    const auto lib = enumerate_forest_counts(d);
    const auto ref = oracle::forest_counts_dfs(d);
    CHECK(lib == ref);
    double total = 0.0;
    for (int k = 0; k < d; ++k) {
      total += static_cast<double>(lib[k]);
      const ForestCountBounds b = forest_count_bounds(d, k);
      CHECK(std::log(static_cast<double>(lib[k])) >= b.log_fixed_k_lower - 1e-12);
    }
    const ForestCountBounds b = forest_count_bounds(d, 0);
    CHECK(std::log(total) >= b.log_all_lower - 1e-12);
    CHECK(std::log(total) <= b.log_all_upper + 1e-12);
  }
  CHECK(enumerate_forest_counts(4)[3] == 16);
  CHECK(std::exp(forest_count_bounds(4, 3).log_fixed_k_lower) == doctest::Approx(16.0));
  CHECK(enumerate_forest_counts(3)[0] == 1);
  CHECK(std::exp(forest_count_bounds(3, 0).log_fixed_k_lower) == doctest::Approx(1.0));
  const ForestCountBounds b5 = forest_count_bounds(5, 2);
  CHECK(b5.log_all_lower == doctest::Approx(3 * std::log(5.0)));
  CHECK(b5.log_all_upper == doctest::Approx(4 * std::log(6.0)));
  CHECK_THROWS_AS(enumerate_forest_counts(8), std::invalid_argument);
}

TEST_SUITE_END();
