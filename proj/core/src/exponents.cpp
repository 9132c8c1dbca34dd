#include "clthres/exponents.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "clthres/graph.hpp"
#include "clthres/rng.hpp"

namespace clthres {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(const PairwiseDist& p, const char* who) {
  if (!p.positive()) {
    throw std::invalid_argument(std::string(who) + ": distribution must be strictly positive");
  }
}

// Orthonormal basis of { z : sum z = 0 } in R^m, as m x (m-1).
MatrixXd tangent_basis(int m) {
  const MatrixXd ones = MatrixXd::Ones(m, 1);
  Eigen::HouseholderQR<MatrixXd> qr(ones);
  const MatrixXd q = qr.householderQ();
  return q.rightCols(m - 1);
}

VectorXd softmax(const VectorXd& theta) {
  const double top = theta.maxCoeff();
  VectorXd e = (theta.array() - top).exp();
  return e / e.sum();
}

// Mutual information of a flattened table and its gradient (up to an additive
// constant, which the tangent-space projection discards).
double mi_of(int r, const VectorXd& q, VectorXd* grad) {
  VectorXd a = VectorXd::Zero(r);
  VectorXd b = VectorXd::Zero(r);
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) {
      a[x] += q[vec_index(r, x, y)];
      b[y] += q[vec_index(r, x, y)];
    }
  }
  double mi = 0.0;
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) {
      const double v = q[vec_index(r, x, y)];
      const double lr = std::log(v / (a[x] * b[y]));
      if (v > 0.0) mi += v * lr;
      if (grad) (*grad)[vec_index(r, x, y)] = lr;
    }
  }
  return mi;
}

double kl_of(const VectorXd& q, const VectorXd& logp, VectorXd* grad) {
  double f = 0.0;
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    const double lr = std::log(q[k]) - logp[k];
    if (q[k] > 0.0) f += q[k] * lr;
    if (grad) (*grad)[k] = lr;
  }
  return f;
}

// Chain rule through q = softmax(theta0 + B w): d/dw = B' (q .* (g - <q, g>)).
VectorXd pull_back(const MatrixXd& basis, const VectorXd& q, const VectorXd& g) {
  const double mean = q.dot(g);
  return basis.transpose() * (q.array() * (g.array() - mean)).matrix();
}

using Objective = std::function<double(const VectorXd&, VectorXd*)>;

struct BfgsOutcome {
  VectorXd x;
  double f = 0.0;
  double gnorm = 0.0;
  int iterations = 0;
};

BfgsOutcome minimize_bfgs(const Objective& fg, VectorXd x, int max_iter) {
  const Eigen::Index n = x.size();
  VectorXd g(n);
  double f = fg(x, &g);
  MatrixXd hinv = MatrixXd::Identity(n, n);
  int it = 0;
  int stalls = 0;
  for (; it < max_iter && g.norm() > 1e-13; ++it) {
    VectorXd dir = -hinv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    const double len = dir.norm();
    if (len > 2.0) {
      dir *= 2.0 / len;
      slope *= 2.0 / len;
    }
    double t = 1.0;
    VectorXd x_new(n);
    VectorXd g_new(n);
    double f_new = kInf;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      x_new = x + t * dir;
      f_new = fg(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * t * slope) {
        moved = true;
        break;
      }
    }
    if (!moved) break;
    const VectorXd s = x_new - x;
    const VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const VectorXd hy = hinv * y;
      const double rho = 1.0 / sy;
      hinv += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) -
              rho * (hy * s.transpose() + s * hy.transpose());
    }
    stalls = (f - f_new <= 1e-16 * std::max(1.0, std::abs(f))) ? stalls + 1 : 0;
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
    if (stalls >= 5) break;
  }
  return {std::move(x), f, g.norm(), it};
}

struct Candidate {
  VectorXd q;
  double value = kInf;
  double violation = kInf;
  double gnorm = 0.0;
  int iterations = 0;
};

// min D(q || p) subject to sign * (I(q) - level) >= 0, starting from w0.
// sign = +1 for I >= level, -1 for I <= level.
Candidate augmented_lagrangian(int r, const VectorXd& logp, const MatrixXd& basis, double level,
                               double sign, VectorXd w, const RateSolverOptions& opts) {
  double lambda = 0.0;
  double rho = 10.0;
  double prev_violation = kInf;
  Candidate out;
  int total_iterations = 0;
  const int m = r * r;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    const Objective phi = [&](const VectorXd& wv, VectorXd* grad) {
      const VectorXd q = softmax(logp + basis * wv);
      VectorXd gf(m);
      VectorXd gi(m);
      const double f = kl_of(q, logp, &gf);
      const double c = sign * (level - mi_of(r, q, &gi));  // feasible when c <= 0
      const double mult = std::max(0.0, lambda + rho * c);
      if (grad) *grad = pull_back(basis, q, gf - sign * mult * gi);
      return f + (mult * mult - lambda * lambda) / (2.0 * rho);
    };
    const BfgsOutcome inner = minimize_bfgs(phi, w, opts.max_inner);
    total_iterations += inner.iterations;
    w = inner.x;
    const VectorXd q = softmax(logp + basis * w);
    const double c = sign * (level - mi_of(r, q, nullptr));
    const double violation = std::max(0.0, c);
    lambda = std::max(0.0, lambda + rho * c);
    out.q = q;
    out.value = kl_of(q, logp, nullptr);
    out.violation = violation;
    out.gnorm = inner.gnorm;
    if (violation <= opts.feasibility_tol && std::abs(lambda * c) <= 1e-14 && outer > 0) break;
    if (violation > 0.25 * prev_violation) rho = std::min(rho * 10.0, 1e12);
    prev_violation = violation;
  }
  out.iterations = total_iterations;
  return out;
}

VectorXd random_table(int m, SeededRng& rng) {
  VectorXd v(m);
  for (int k = 0; k < m; ++k) v[k] = -std::log1p(-rng.uniform()) + 1e-3;
  return v / v.sum();
}

RateFunctionResult finish(int r, const std::vector<Candidate>& cands, double tol) {
  int best = -1;
  for (int s = 0; s < static_cast<int>(cands.size()); ++s) {
    const Candidate& c = cands[s];
    if (c.violation > tol) continue;
    if (best < 0 || c.value < cands[best].value) best = s;
  }
  if (best < 0) {
    // Nothing met the tolerance; report the least infeasible run.
    best = 0;
    for (int s = 1; s < static_cast<int>(cands.size()); ++s) {
      if (cands[s].violation < cands[best].violation) best = s;
    }
  }
  const Candidate& c = cands[best];
  RateFunctionResult res{std::max(0.0, c.value), unvec(r, c.q), {}, std::nullopt};
  res.diagnostics.starts = static_cast<int>(cands.size());
  res.diagnostics.best_start = best;
  res.diagnostics.iterations = c.iterations;
  res.diagnostics.gradient_norm = c.gnorm;
  res.diagnostics.constraint_violation = c.violation;
  res.diagnostics.locally_optimal_only = r > 2;
  return res;
}

// Alternating exact minimization of D(qx (x) qy || p) over the two factors.
Candidate product_projection(int r, const PairwiseDist& p, VectorXd qx, VectorXd qy) {
  MatrixXd logp(r, r);
  for (int x = 0; x < r; ++x) {
    for (int y = 0; y < r; ++y) logp(x, y) = std::log(p(x, y));
  }
  auto normalize_exp = [](VectorXd v) {
    v = (v.array() - v.maxCoeff()).exp();
    return VectorXd(v / v.sum());
  };
  int it = 0;
  for (; it < 20000; ++it) {
    const VectorXd nx = normalize_exp(logp * qy);
    const VectorXd ny = normalize_exp(logp.transpose() * nx);
    const double change = std::max((nx - qx).cwiseAbs().maxCoeff(), (ny - qy).cwiseAbs().maxCoeff());
    qx = nx;
    qy = ny;
    if (change < 1e-15) break;
  }
  Candidate out;
  out.q = VectorXd(r * r);
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) out.q[vec_index(r, x, y)] = qx[x] * qy[y];
  }
  VectorXd lp(r * r);
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) lp[vec_index(r, x, y)] = logp(x, y);
  }
  out.value = kl_of(out.q, lp, nullptr);
  out.violation = 0.0;
  out.iterations = it;
  // Stationarity residual: each block's partial gradient minus its q-mean.
  const VectorXd gx = qx.array().log().matrix() - logp * qy;
  const VectorXd gy = qy.array().log().matrix() - logp.transpose() * qx;
  out.gnorm = std::hypot((gx.array() - qx.dot(gx)).matrix().norm(),
                         (gy.array() - qy.dot(gy)).matrix().norm());
  return out;
}

}  // namespace

VectorXd vec(const PairwiseDist& p) {
  const int r = p.r();
  VectorXd v(r * r);
  for (int x = 0; x < r; ++x) {
    for (int y = 0; y < r; ++y) v[vec_index(r, x, y)] = p(x, y);
  }
  return v;
}

PairwiseDist unvec(int r, const VectorXd& v) {
  if (v.size() != static_cast<Eigen::Index>(r) * r) throw std::invalid_argument("unvec: size mismatch");
  std::vector<double> t(static_cast<std::size_t>(r) * r);
  for (int x = 0; x < r; ++x) {
    for (int y = 0; y < r; ++y) t[static_cast<std::size_t>(x * r + y)] = std::max(0.0, v[vec_index(r, x, y)]);
  }
  return PairwiseDist::normalized(r, std::move(t));
}

LocalCurvature mi_hessian(const PairwiseDist& p) {
  require_positive(p, "mi_hessian");
  const int r = p.r();
  const int m = r * r;
  const NodeDist a = p.row_marginal();
  const NodeDist b = p.col_marginal();
  LocalCurvature c{MatrixXd::Zero(m, m), MatrixXd::Zero(m, m)};
  for (int y = 0; y < r; ++y) {
    for (int x = 0; x < r; ++x) {
      const int k = vec_index(r, x, y);
      c.pi_e(k, k) = 1.0 / p(x, y);
      for (int y2 = 0; y2 < r; ++y2) {
        for (int x2 = 0; x2 < r; ++x2) {
          const int l = vec_index(r, x2, y2);
          double h = 0.0;
          if (k == l) h += 1.0 / p(x, y);
          if (x == x2) h -= 1.0 / a[x];
          if (y == y2) h -= 1.0 / b[y];
          c.h_e(k, l) = h;
        }
      }
    }
  }
  return c;
}

MatrixXd normalized_curvature(const LocalCurvature& c) {
  const VectorXd s = c.pi_e.diagonal().cwiseInverse().cwiseSqrt();
  return s.asDiagonal() * c.h_e * s.asDiagonal();
}

double mu_star(const PairwiseDist& p) {
  require_positive(p, "mu_star");
  if (mutual_information(p) >= 1e-10) {
    throw std::invalid_argument("mu_star: distribution is not a product (I >= 1e-10)");
  }
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(normalized_curvature(mi_hessian(p)),
                                                   Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  return top > 0.0 ? 1.0 / top : kInf;
}

double quadratic_surrogate(const PairwiseDist& p, double b) {
  if (!(b >= 0.0)) throw std::invalid_argument("quadratic_surrogate: b must be nonnegative");
  const LocalCurvature c = mi_hessian(p);
  const MatrixXd basis = tangent_basis(p.r() * p.r());
  const MatrixXd a = basis.transpose() * c.pi_e * basis;
  const MatrixXd h = basis.transpose() * c.h_e * basis;
  const Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(h, a, Eigen::EigenvaluesOnly);
  const double top = ges.eigenvalues().maxCoeff();
  if (b == 0.0) return 0.0;
  return top > 0.0 ? b / top : kInf;
}

RateFunctionResult underestimation_rate(const PairwiseDist& p, double a, const RateSolverOptions& opts) {
  require_positive(p, "underestimation_rate");
  if (!(a >= 0.0)) throw std::invalid_argument("underestimation_rate: a must be nonnegative");
  if (opts.starts < 1) throw std::invalid_argument("underestimation_rate: need at least one start");
  const int r = p.r();
  const int m = r * r;
  if (mutual_information(p) <= a) {
    RateFunctionResult res{0.0, p, {}, std::nullopt};
    res.diagnostics.starts = 0;
    return res;
  }
  std::vector<Candidate> cands;
  SeededRng rng(opts.seed, 0x0dd);
  const NodeDist px = p.row_marginal();
  const NodeDist py = p.col_marginal();
  if (a == 0.0) {
    for (int s = 0; s < opts.starts; ++s) {
      VectorXd qx(r);
      VectorXd qy(r);
      if (s == 0) {
        for (int x = 0; x < r; ++x) {
          qx[x] = px[x];
          qy[x] = py[x];
        }
      } else {
        for (int x = 0; x < r; ++x) {
          qx[x] = -std::log1p(-rng.uniform()) + 1e-3;
          qy[x] = -std::log1p(-rng.uniform()) + 1e-3;
        }
        qx /= qx.sum();
        qy /= qy.sum();
      }
      cands.push_back(product_projection(r, p, qx, qy));
    }
    return finish(r, cands, opts.feasibility_tol);
  }
  const VectorXd logp = vec(p).array().log();
  const MatrixXd basis = tangent_basis(m);
  for (int s = 0; s < opts.starts; ++s) {
    VectorXd start(m);
    if (s == 0) {
      start = vec(PairwiseDist::outer(px, py));
    } else {
      start = random_table(m, rng);
    }
    const VectorXd w0 = basis.transpose() * (start.array().log().matrix() - logp);
    cands.push_back(augmented_lagrangian(r, logp, basis, a, -1.0, w0, opts));
  }
  return finish(r, cands, opts.feasibility_tol);
}

RateFunctionResult overestimation_rate(const PairwiseDist& p, double b, const RateSolverOptions& opts) {
  require_positive(p, "overestimation_rate");
  if (!(b >= 0.0)) throw std::invalid_argument("overestimation_rate: b must be nonnegative");
  if (opts.starts < 1) throw std::invalid_argument("overestimation_rate: need at least one start");
  const int r = p.r();
  const int m = r * r;
  const bool product = mutual_information(p) < 1e-10;
  std::optional<double> surrogate;
  if (product) surrogate = quadratic_surrogate(p, b);
  if (mutual_information(p) >= b) {
    RateFunctionResult res{0.0, p, {}, surrogate};
    return res;
  }
  const VectorXd logp = vec(p).array().log();
  const MatrixXd basis = tangent_basis(m);
  const LocalCurvature curv = mi_hessian(p);

  // Seed the first two starts along the top generalized eigenvector of the
  // local quadratic model, one per sign, scaled to meet the constraint.
  std::vector<VectorXd> seeds;
  {
    const MatrixXd am = basis.transpose() * curv.pi_e * basis;
    const MatrixXd hm = basis.transpose() * curv.h_e * basis;
    const Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(hm, am);
    const Eigen::Index top = m - 2;
    const double lam = ges.eigenvalues()[top];
    if (lam > 0.0) {
      VectorXd u = ges.eigenvectors().col(top);
      const double scale = std::sqrt(2.0 * b / (lam * u.dot(am * u)));
      const VectorXd z = basis * (scale * u);
      // First-order logits for q = p + z.
      const VectorXd w = basis.transpose() * (z.array() / vec(p).array()).matrix();
      seeds.push_back(w);
      seeds.push_back(-w);
    }
  }
  std::vector<Candidate> cands;
  SeededRng rng(opts.seed, 0x0e5);
  for (int s = 0; s < opts.starts; ++s) {
    VectorXd w0;
    if (s < static_cast<int>(seeds.size())) {
      w0 = seeds[s];
    } else {
      const VectorXd start = random_table(m, rng);
      w0 = basis.transpose() * (start.array().log().matrix() - logp);
    }
    cands.push_back(augmented_lagrangian(r, logp, basis, b, 1.0, w0, opts));
  }
  RateFunctionResult res = finish(r, cands, opts.feasibility_tol);
  res.surrogate = surrogate;
  return res;
}

EuclideanApprox euclidean_kl_approx(const PairwiseDist& p, const PairwiseDist& q) {
  if (p.r() != q.r()) throw std::invalid_argument("euclidean_kl_approx: alphabet mismatch");
  require_positive(p, "euclidean_kl_approx");
  EuclideanApprox out;
  out.exact = kl_divergence(p, q);
  const auto pt = p.table();
  const auto qt = q.table();
  for (std::size_t k = 0; k < pt.size(); ++k) {
    const double diff = pt[k] - qt[k];
    out.approx += diff * diff / (2.0 * pt[k]);
  }
  out.gap = out.exact - out.approx;
  return out;
}

ConverseBounds converse_sample_bound(int d, int k, int r, double rho) {
  if (d < 2) throw std::invalid_argument("converse_sample_bound: d must be at least 2");
  if (k < 0 || k > d - 1) throw std::invalid_argument("converse_sample_bound: k must lie in [0, d-1]");
  if (r < 2) throw std::invalid_argument("converse_sample_bound: r must be at least 2");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("converse_sample_bound: rho must lie in (0, 1]");
  const double ld = std::log(static_cast<double>(d));
  const double lr = std::log(static_cast<double>(r));
  return {std::max(0.0, rho * (k - 1) * ld / (d * lr)), rho * ld / lr};
}

ForestCountBounds forest_count_bounds(int d, int k) {
  if (d < 1) throw std::invalid_argument("forest_count_bounds: d must be positive");
  if (k < 0 || k > d - 1) throw std::invalid_argument("forest_count_bounds: k must lie in [0, d-1]");
  const double ld = std::log(static_cast<double>(d));
  return {std::log(static_cast<double>(d - k)) + (k - 1) * ld, (d - 2) * ld,
          (d - 1) * std::log(static_cast<double>(d + 1))};
}

std::vector<std::uint64_t> enumerate_forest_counts(int d) {
  if (d < 1 || d > 7) throw std::invalid_argument("enumerate_forest_counts: d must lie in [1, 7]");
  EdgeList all;
  for (int u = 0; u < d; ++u) {
    for (int v = u + 1; v < d; ++v) all.emplace_back(u, v);
  }
  const int m = static_cast<int>(all.size());
  std::vector<std::uint64_t> counts(d, 0);
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    const int k = std::popcount(mask);
    if (k > d - 1) continue;
    DisjointSet ds(d);
    bool acyclic = true;
    for (int e = 0; e < m && acyclic; ++e) {
      if (mask & (1u << e)) acyclic = ds.unite(all[e].u, all[e].v);
    }
    if (acyclic) ++counts[k];
  }
  return counts;
}

}  // namespace clthres
