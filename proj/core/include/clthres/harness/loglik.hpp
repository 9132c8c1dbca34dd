#pragma once

// Held-out likelihood of learned forests and the beta workflows built on it.

#include <cstdint>
#include <span>
#include <vector>

#include "clthres/estimation.hpp"
#include "clthres/forest.hpp"

namespace clthres::harness {

struct LikelihoodScore {
  /// Mean log-likelihood per sample, nats.
  double mean = 0.0;
  /// Number of zero-probability node or edge factors replaced by the floor.
  long floored = 0;
};

/// Average log-likelihood of s under m. A node factor P_i(x_i) = 0 or an edge
/// factor P_ij(x_i, x_j) = 0 is replaced by 1 / (2 n_train) so that states the
/// training data never showed keep a finite score; each replacement is
/// counted. Requires matching d and r and n_train >= 1.
LikelihoodScore floored_log_likelihood(const ForestModel& m, const SampleMatrix& s, int n_train);

struct BetaProfileRow {
  double beta = 0.0;
  double eps = 0.0;
  int k_hat = 0;
  LikelihoodScore train;
  LikelihoodScore test;
};

/// Learns on `train` for every beta (one Chow-Liu run shared by all) and
/// scores both splits. Throws std::invalid_argument on mismatched d or r.
std::vector<BetaProfileRow> beta_profile(const SampleMatrix& train, const SampleMatrix& test,
                                         std::span<const double> betas);

struct CvFoldRow {
  int fold = 0;
  double beta = 0.0;
  int k_hat = 0;
  double heldout = 0.0;
  long floored = 0;
};

struct CvResult {
  double best_beta = 0.0;
  /// Mean held-out log-likelihood per candidate, in grid order.
  std::vector<double> mean_heldout;
  std::vector<CvFoldRow> folds;
};

/// K-fold cross-validation of the power-schedule exponent. Rows are assigned
/// to folds by a seeded shuffle. The winner maximizes the mean held-out
/// log-likelihood; exact ties go to the smaller beta. Throws
/// std::invalid_argument if folds < 2, the grid is empty, or some fold would
/// leave fewer than one held-out row or two training rows.
CvResult cross_validate_beta(const SampleMatrix& data, int folds, std::span<const double> betas,
                             std::uint64_t seed);

}  // namespace clthres::harness
