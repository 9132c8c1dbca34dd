#pragma once

// Discrete distributions over a single finite alphabet {0, ..., r-1} and the
// information measures computed on them. All logarithms are natural (nats).

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace clthres {

/// Probabilities must sum to one within this tolerance at construction.
inline constexpr double kConstructionTol = 1e-12;
/// Agreement required between stored node marginals and edge-marginal sums.
inline constexpr double kConsistencyTol = 1e-10;
/// Agreement expected between exact routines and brute-force enumeration.
inline constexpr double kOracleTol = 1e-9;
/// MI values this far below zero are rounding noise and are clamped to 0.
inline constexpr double kMiClampTol = 1e-12;

/// Returned by divergences when the first argument puts mass where the
/// second has none.
inline constexpr double kInfiniteDivergence = std::numeric_limits<double>::infinity();

using Symbol = std::uint8_t;
inline constexpr int kMaxAlphabet = 255;

/// A distribution on {0, ..., r-1}.
class NodeDist {
 public:
  /// Throws std::invalid_argument unless r >= 2, all entries are finite and
  /// nonnegative, and they sum to one within kConstructionTol.
  explicit NodeDist(std::vector<double> probs);

  static NodeDist uniform(int r);
  /// Divides by the sum. Weights must be nonnegative with a positive sum.
  static NodeDist normalized(std::vector<double> weights);

  int r() const noexcept { return static_cast<int>(probs_.size()); }
  double operator[](int x) const { return probs_[static_cast<std::size_t>(x)]; }
  std::span<const double> probs() const noexcept { return probs_; }
  bool positive() const noexcept;

  friend bool operator==(const NodeDist&, const NodeDist&) = default;

 private:
  std::vector<double> probs_;
};

/// Joint distribution of an ordered variable pair (X, Y), stored row-major:
/// rows index X, columns index Y.
class PairwiseDist {
 public:
  /// Same validation as NodeDist; table.size() must equal r * r.
  PairwiseDist(int r, std::vector<double> table);

  static PairwiseDist uniform(int r);
  static PairwiseDist outer(const NodeDist& x, const NodeDist& y);
  static PairwiseDist normalized(int r, std::vector<double> weights);

  int r() const noexcept { return r_; }
  double operator()(int x, int y) const {
    return table_[static_cast<std::size_t>(x * r_ + y)];
  }
  std::span<const double> table() const noexcept { return table_; }

  NodeDist row_marginal() const;
  NodeDist col_marginal() const;
  PairwiseDist transposed() const;
  bool positive() const noexcept;

  friend bool operator==(const PairwiseDist&, const PairwiseDist&) = default;

 private:
  int r_;
  std::vector<double> table_;
};

double entropy(const NodeDist& p);

/// Sum of p(x,y) log(p(x,y) / (p(x) p(y))) with 0 log 0 = 0. Never negative.
double mutual_information(const PairwiseDist& p);

/// D(p || q). Returns kInfiniteDivergence on an absolute-continuity violation.
double kl_divergence(const NodeDist& p, const NodeDist& q);
double kl_divergence(const PairwiseDist& p, const PairwiseDist& q);

/// D(p_{X|Y} || q_{X|Y}) averaged over p's Y-marginal, so that
/// kl_divergence(p, q) == conditional_kl(p, q) + kl_divergence(p_Y, q_Y).
double conditional_kl(const PairwiseDist& p, const PairwiseDist& q);

/// Largest absolute entrywise difference. Alphabets must match.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace clthres
