#pragma once

// Empirical distributions (types) of categorical samples.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "clthres/dist.hpp"
#include "clthres/graph.hpp"
#include "clthres/joint.hpp"

namespace clthres {

/// Symmetric d x d matrix of pairwise mutual informations (nats). The
/// diagonal is unused and left at zero.
using MiMatrix = Eigen::MatrixXd;

/// n samples of d categorical variables over {0, ..., r-1}. Stored
/// column-major so each variable's samples are contiguous.
class SampleMatrix {
 public:
  /// `row_major` holds n rows of d symbols. Throws std::invalid_argument
  /// unless n >= 1, d >= 2, 2 <= r <= 255, and every symbol is below r.
  SampleMatrix(int n, int d, int r, std::span<const Symbol> row_major);

  int n() const noexcept { return n_; }
  int d() const noexcept { return d_; }
  int r() const noexcept { return r_; }

  Symbol operator()(int row, int col) const { return data_[static_cast<std::size_t>(col) * n_ + row]; }
  std::span<const Symbol> column(int col) const {
    return {data_.data() + static_cast<std::size_t>(col) * n_, static_cast<std::size_t>(n_)};
  }
  std::vector<Symbol> row(int i) const;

  /// Rows in the given order (repeats allowed).
  SampleMatrix select_rows(std::span<const int> rows) const;
  /// Column j of the result is column perm[j] of this matrix.
  SampleMatrix permute_columns(std::span<const int> perm) const;

  friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;

 private:
  SampleMatrix() = default;
  int n_ = 0;
  int d_ = 0;
  int r_ = 0;
  std::vector<Symbol> data_;
};

/// Pairwise type of (X_i, X_j): co-occurrence counts divided by n.
struct EmpiricalPair {
  int i = 0;
  int j = 0;
  PairwiseDist type;
  std::vector<long> counts;
};

NodeDist node_type(const SampleMatrix& s, int i);

/// Rows of the returned table index X_i.
EmpiricalPair empirical_pairwise(const SampleMatrix& s, int i, int j);

/// Entry (i, j) equals mutual_information(empirical_pairwise(s, i, j).type).
/// Binary data takes a bit-packed popcount path.
MiMatrix all_empirical_mi(const SampleMatrix& s);

/// The generic counting path, kept callable so the packed path can be
/// checked against it.
MiMatrix all_empirical_mi_generic(const SampleMatrix& s);

/// Joint type over all r^d states. Throws if d or r^d is too large.
JointDist joint_type(const SampleMatrix& s);

}  // namespace clthres
