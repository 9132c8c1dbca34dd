#pragma once

// Local large-deviation quantities for pairwise distributions.
//
// A joint table Q on X^2 is flattened column-major (index x + r*y), and its
// mutual information is viewed as a function of that r^2-vector with the
// marginals induced by summation:
//
//   I(q) = sum q log q - sum_x a_x log a_x - sum_y b_y log b_y.
//
// Around a product distribution P the divergence and the MI both reduce to
// quadratic forms, D(Q||P) ~ z'Pi z / 2 and I(Q) ~ z'H z / 2 with z = q - p,
// where Pi = diag(1/p) and H is the Hessian of I at p. The overestimation
// exponent's semidefinite relaxation then has the closed form
//
//   mu* = 1 / max eig(Pi^{-1/2} H Pi^{-1/2}).

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "clthres/dist.hpp"

namespace clthres {

/// Column-major position of (x, y) in the flattened table.
inline int vec_index(int r, int x, int y) { return x + r * y; }
Eigen::VectorXd vec(const PairwiseDist& p);
PairwiseDist unvec(int r, const Eigen::VectorXd& v);

struct LocalCurvature {
  /// diag(1 / vec(p)).
  Eigen::MatrixXd pi_e;
  /// Hessian of I(vec(Q)) at Q = p.
  Eigen::MatrixXd h_e;
};

/// Analytic curvature at a strictly positive p:
///   H[(x,y),(x',y')] = [x=x'][y=y'] / p(x,y) - [x=x'] / a_x - [y=y'] / b_y.
/// Throws std::invalid_argument if p has a zero entry.
LocalCurvature mi_hessian(const PairwiseDist& p);

/// Pi^{-1/2} H Pi^{-1/2}.
Eigen::MatrixXd normalized_curvature(const LocalCurvature& c);

/// 1 / max eig(Pi^{-1/2} H Pi^{-1/2}). Requires a strictly positive product
/// distribution (I(p) < 1e-10); throws std::invalid_argument otherwise.
double mu_star(const PairwiseDist& p);

struct RateSolverOptions {
  int starts = 20;
  std::uint64_t seed = 0x5eed;
  int max_outer = 60;
  int max_inner = 500;
  /// Allowed constraint violation at the returned argmin.
  double feasibility_tol = 1e-10;
};

struct SolverDiagnostics {
  int starts = 0;
  int best_start = 0;
  int iterations = 0;
  double gradient_norm = 0.0;
  double constraint_violation = 0.0;
  /// Set when no brute-force certificate exists for the alphabet (r > 2),
  /// so the reported minimum is only known to be a local one.
  bool locally_optimal_only = false;
};

struct RateFunctionResult {
  double value = 0.0;
  PairwiseDist argmin;
  SolverDiagnostics diagnostics;
  /// Quadratic-surrogate value z'Pi z / 2 under z'H z / 2 >= b, z'1 = 0
  /// (overestimation only, product p only).
  std::optional<double> surrogate;
};

/// L(p; a) = min { D(Q || p) : I(Q) <= a }. At a = 0 the feasible set is the
/// product distributions and the minimum is found by alternating exact
/// updates of the two factors; for a > 0 an augmented-Lagrangian solver is
/// used. Multi-start, best value wins, ties go to the lowest start index.
RateFunctionResult underestimation_rate(const PairwiseDist& p, double a = 0.0,
                                        const RateSolverOptions& opts = {});

/// M(p; b) = min { D(Q || p) : I(Q) >= b } by augmented Lagrangian with
/// logits restricted to the (r^2 - 1)-dimensional complement of the ones
/// vector. For product p the quadratic surrogate is reported alongside.
RateFunctionResult overestimation_rate(const PairwiseDist& p, double b,
                                       const RateSolverOptions& opts = {});

/// min z'Pi z / 2 subject to z'H z / 2 >= b and z'1 = 0, solved exactly as a
/// generalized eigenproblem on the tangent space. +inf if H has no positive
/// direction there.
double quadratic_surrogate(const PairwiseDist& p, double b);

struct EuclideanApprox {
  double exact = 0.0;
  double approx = 0.0;
  double gap = 0.0;
};

/// exact = D(p || q); approx = sum (p - q)^2 / (2 p); gap = exact - approx.
/// Requires p strictly positive.
EuclideanApprox euclidean_kl_approx(const PairwiseDist& p, const PairwiseDist& q);

struct ConverseBounds {
  /// rho (k-1) log d / (d log r), clamped at 0: forests with k edges.
  double fixed_k = 0.0;
  /// rho log d / log r: all forests.
  double all_forests = 0.0;
};

/// Sample sizes below which every estimator fails with probability tending
/// to one under a uniform prior on the forest. Requires d >= 2,
/// 0 <= k <= d-1, r >= 2 and 0 < rho <= 1.
ConverseBounds converse_sample_bound(int d, int k, int r, double rho);

struct ForestCountBounds {
  /// log((d - k) d^(k-1)), a lower bound on log |forests with k edges|.
  double log_fixed_k_lower = 0.0;
  /// (d - 2) log d <= log |all forests on d nodes| <= (d - 1) log(d + 1).
  double log_all_lower = 0.0;
  double log_all_upper = 0.0;
};

ForestCountBounds forest_count_bounds(int d, int k);

/// Exact number of labeled forests on d nodes with k edges, k = 0..d-1, by
/// enumerating every edge subset of the complete graph. d must be in [1, 7].
std::vector<std::uint64_t> enumerate_forest_counts(int d);

}  // namespace clthres
