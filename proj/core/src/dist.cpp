#include "clthres/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace clthres {
namespace {

void validate_probs(std::span<const double> probs, const char* what) {
  double sum = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string(what) + ": entries must be finite and nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kConstructionTol) {
    throw std::invalid_argument(std::string(what) + ": probabilities sum to " +
                                std::to_string(sum) + ", not 1");
  }
}

std::vector<double> divide_by_sum(std::vector<double> w, const char* what) {
  double sum = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument(std::string(what) + ": weights must be finite and nonnegative");
    }
    sum += v;
  }
  if (!(sum > 0.0)) throw std::invalid_argument(std::string(what) + ": weights sum to zero");
  for (double& v : w) v /= sum;
  return w;
}

// Sum of p log(p / q) over matching entries.
double kl_terms(std::span<const double> p, std::span<const double> q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInfiniteDivergence;
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

}  // namespace

NodeDist::NodeDist(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2 || probs_.size() > static_cast<std::size_t>(kMaxAlphabet)) {
    throw std::invalid_argument("NodeDist: alphabet size must be in [2, 255]");
  }
  validate_probs(probs_, "NodeDist");
}

NodeDist NodeDist::uniform(int r) {
  return NodeDist(std::vector<double>(std::max(r, 0), 1.0 / r));
}

NodeDist NodeDist::normalized(std::vector<double> weights) {
  return NodeDist(divide_by_sum(std::move(weights), "NodeDist"));
}

bool NodeDist::positive() const noexcept {
  return std::all_of(probs_.begin(), probs_.end(), [](double v) { return v > 0.0; });
}

PairwiseDist::PairwiseDist(int r, std::vector<double> table) : r_(r), table_(std::move(table)) {
  if (r < 2 || r > kMaxAlphabet) {
    throw std::invalid_argument("PairwiseDist: alphabet size must be in [2, 255]");
  }
  if (table_.size() != static_cast<std::size_t>(r * r)) {
    throw std::invalid_argument("PairwiseDist: table must have r*r entries");
  }
  validate_probs(table_, "PairwiseDist");
}

PairwiseDist PairwiseDist::uniform(int r) {
  return PairwiseDist(r, std::vector<double>(r * r, 1.0 / (r * r)));
}

PairwiseDist PairwiseDist::outer(const NodeDist& x, const NodeDist& y) {
  if (x.r() != y.r()) throw std::invalid_argument("PairwiseDist::outer: alphabet mismatch");
  const int r = x.r();
  std::vector<double> t(r * r);
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) t[a * r + b] = x[a] * y[b];
  }
  return normalized(r, std::move(t));
}

PairwiseDist PairwiseDist::normalized(int r, std::vector<double> weights) {
  return PairwiseDist(r, divide_by_sum(std::move(weights), "PairwiseDist"));
}

NodeDist PairwiseDist::row_marginal() const {
  std::vector<double> m(r_, 0.0);
  for (int x = 0; x < r_; ++x) {
    for (int y = 0; y < r_; ++y) m[x] += (*this)(x, y);
  }
  return NodeDist::normalized(std::move(m));
}

NodeDist PairwiseDist::col_marginal() const {
  std::vector<double> m(r_, 0.0);
  for (int x = 0; x < r_; ++x) {
    for (int y = 0; y < r_; ++y) m[y] += (*this)(x, y);
  }
  return NodeDist::normalized(std::move(m));
}

PairwiseDist PairwiseDist::transposed() const {
  std::vector<double> t(table_.size());
  for (int x = 0; x < r_; ++x) {
    for (int y = 0; y < r_; ++y) t[y * r_ + x] = (*this)(x, y);
  }
  return PairwiseDist(r_, std::move(t));
}

bool PairwiseDist::positive() const noexcept {
  return std::all_of(table_.begin(), table_.end(), [](double v) { return v > 0.0; });
}

double entropy(const NodeDist& p) {
  double h = 0.0;
  for (double v : p.probs()) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double mutual_information(const PairwiseDist& p) {
  const int r = p.r();
  std::vector<double> px(r, 0.0), py(r, 0.0);
  for (int x = 0; x < r; ++x) {
    for (int y = 0; y < r; ++y) {
      px[x] += p(x, y);
      py[y] += p(x, y);
    }
  }
  const auto term = [&](int x, int y) {
    const double v = p(x, y);
    return v > 0.0 ? v * std::log(v / (px[x] * py[y])) : 0.0;
  };
  // Mirrored cells are added pairwise so the result is bit-identical under
  // transposition.
  double mi = 0.0;
  for (int x = 0; x < r; ++x) {
    mi += term(x, x);
    for (int y = x + 1; y < r; ++y) mi += term(x, y) + term(y, x);
  }
  // Exact independence can land a hair below zero; anything further is kept
  // so that genuine bugs stay visible.
  if (mi < 0.0 && mi >= -kMiClampTol) mi = 0.0;
  return mi;
}

double kl_divergence(const NodeDist& p, const NodeDist& q) {
  if (p.r() != q.r()) throw std::invalid_argument("kl_divergence: alphabet mismatch");
  return kl_terms(p.probs(), q.probs());
}

double kl_divergence(const PairwiseDist& p, const PairwiseDist& q) {
  if (p.r() != q.r()) throw std::invalid_argument("kl_divergence: alphabet mismatch");
  return kl_terms(p.table(), q.table());
}

double conditional_kl(const PairwiseDist& p, const PairwiseDist& q) {
  if (p.r() != q.r()) throw std::invalid_argument("conditional_kl: alphabet mismatch");
  const int r = p.r();
  const NodeDist py = p.col_marginal();
  const NodeDist qy = q.col_marginal();
  double d = 0.0;
  for (int y = 0; y < r; ++y) {
    if (py[y] <= 0.0) continue;
    if (qy[y] <= 0.0) return kInfiniteDivergence;
    for (int x = 0; x < r; ++x) {
      const double pc = p(x, y) / py[y];
      if (pc <= 0.0) continue;
      const double qc = q(x, y) / qy[y];
      if (qc <= 0.0) return kInfiniteDivergence;
      d += py[y] * pc * std::log(pc / qc);
    }
  }
  return d;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace clthres
