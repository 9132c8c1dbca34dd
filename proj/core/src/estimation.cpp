#include "clthres/estimation.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace clthres {
namespace {

PairwiseDist type_from_counts(std::span<const long> counts, int n, int r) {
  std::vector<double> t(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) t[k] = static_cast<double>(counts[k]) / n;
  return PairwiseDist(r, std::move(t));
}

std::vector<long> pair_counts(const SampleMatrix& s, int i, int j) {
  const int r = s.r();
  std::vector<long> counts(r * r, 0);
  const auto ci = s.column(i);
  const auto cj = s.column(j);
  for (int k = 0; k < s.n(); ++k) ++counts[ci[k] * r + cj[k]];
  return counts;
}

}  // namespace

SampleMatrix::SampleMatrix(int n, int d, int r, std::span<const Symbol> row_major)
    : n_(n), d_(d), r_(r) {
  if (n < 1) throw std::invalid_argument("SampleMatrix: need at least one sample");
  if (d < 2) throw std::invalid_argument("SampleMatrix: need at least two variables");
  if (r < 2 || r > kMaxAlphabet) throw std::invalid_argument("SampleMatrix: alphabet size must be in [2, 255]");
  if (row_major.size() != static_cast<std::size_t>(n) * d) {
    throw std::invalid_argument("SampleMatrix: data size does not equal n*d");
  }
  data_.resize(row_major.size());
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < d; ++col) {
      const Symbol v = row_major[static_cast<std::size_t>(row) * d + col];
      if (v >= r) {
        throw std::invalid_argument("SampleMatrix: symbol " + std::to_string(v) + " at row " +
                                    std::to_string(row) + ", column " + std::to_string(col) +
                                    " is outside the alphabet");
      }
      data_[static_cast<std::size_t>(col) * n + row] = v;
    }
  }
}

std::vector<Symbol> SampleMatrix::row(int i) const {
  std::vector<Symbol> x(d_);
  for (int c = 0; c < d_; ++c) x[c] = (*this)(i, c);
  return x;
}

SampleMatrix SampleMatrix::select_rows(std::span<const int> rows) const {
  if (rows.empty()) throw std::invalid_argument("SampleMatrix::select_rows: empty selection");
  SampleMatrix out;
  out.n_ = static_cast<int>(rows.size());
  out.d_ = d_;
  out.r_ = r_;
  out.data_.resize(static_cast<std::size_t>(out.n_) * d_);
  for (int c = 0; c < d_; ++c) {
    for (int k = 0; k < out.n_; ++k) {
      const int src = rows[k];
      if (src < 0 || src >= n_) throw std::out_of_range("SampleMatrix::select_rows: bad row");
      out.data_[static_cast<std::size_t>(c) * out.n_ + k] = (*this)(src, c);
    }
  }
  return out;
}

SampleMatrix SampleMatrix::permute_columns(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != d_) {
    throw std::invalid_argument("SampleMatrix::permute_columns: permutation has wrong length");
  }
  SampleMatrix out = *this;
  for (int c = 0; c < d_; ++c) {
    const auto src = column(perm[c]);
    std::copy(src.begin(), src.end(), out.data_.begin() + static_cast<std::ptrdiff_t>(c) * n_);
  }
  return out;
}

NodeDist node_type(const SampleMatrix& s, int i) {
  std::vector<double> m(s.r(), 0.0);
  for (Symbol v : s.column(i)) m[v] += 1.0;
  for (double& v : m) v /= s.n();
  return NodeDist(std::move(m));
}

EmpiricalPair empirical_pairwise(const SampleMatrix& s, int i, int j) {
  if (i == j) throw std::invalid_argument("empirical_pairwise: nodes must differ");
  if (i < 0 || j < 0 || i >= s.d() || j >= s.d()) {
    throw std::invalid_argument("empirical_pairwise: node out of range");
  }
  std::vector<long> counts = pair_counts(s, i, j);
  PairwiseDist type = type_from_counts(counts, s.n(), s.r());
  return EmpiricalPair{i, j, std::move(type), std::move(counts)};
}

MiMatrix all_empirical_mi_generic(const SampleMatrix& s) {
  const int d = s.d();
  MiMatrix mi = MiMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      mi(i, j) = mi(j, i) = mutual_information(type_from_counts(pair_counts(s, i, j), s.n(), s.r()));
    }
  }
  return mi;
}

MiMatrix all_empirical_mi(const SampleMatrix& s) {
  if (s.r() != 2) return all_empirical_mi_generic(s);

  const int n = s.n();
  const int d = s.d();
  const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
  std::vector<std::uint64_t> bits(words * d, 0);
  std::vector<long> ones(d, 0);
  for (int c = 0; c < d; ++c) {
    std::uint64_t* col = bits.data() + words * c;
    const auto src = s.column(c);
    for (int k = 0; k < n; ++k) {
      if (src[k]) col[k >> 6] |= std::uint64_t{1} << (k & 63);
    }
    for (std::size_t w = 0; w < words; ++w) ones[c] += std::popcount(col[w]);
  }

  MiMatrix mi = MiMatrix::Zero(d, d);
  long counts[4];
  for (int i = 0; i < d; ++i) {
    const std::uint64_t* a = bits.data() + words * i;
    for (int j = i + 1; j < d; ++j) {
      const std::uint64_t* b = bits.data() + words * j;
      long both = 0;
      for (std::size_t w = 0; w < words; ++w) both += std::popcount(a[w] & b[w]);
      counts[3] = both;
      counts[2] = ones[i] - both;
      counts[1] = ones[j] - both;
      counts[0] = n - ones[i] - ones[j] + both;
      mi(i, j) = mi(j, i) = mutual_information(type_from_counts(counts, n, 2));
    }
  }
  return mi;
}

JointDist joint_type(const SampleMatrix& s) {
  const std::size_t states = joint_state_count(s.d(), s.r());
  std::vector<double> p(states, 0.0);
  for (int k = 0; k < s.n(); ++k) {
    std::size_t idx = 0;
    for (int c = s.d() - 1; c >= 0; --c) idx = idx * s.r() + s(k, c);
    p[idx] += 1.0;
  }
  for (double& v : p) v /= s.n();
  return JointDist(s.d(), s.r(), std::move(p));
}

}  // namespace clthres
