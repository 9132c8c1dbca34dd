#pragma once

// Tabular datasets with mixed categorical and continuous columns, encoded to
// a common symbol alphabet for structure learning.
//
// Continuous columns become binary: a value strictly above the training-split
// mean maps to 1, everything else to 0. Categorical columns map their distinct
// values to 0, 1, ... in sorted order (numeric order when every value parses
// as a number, byte order otherwise).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clthres/estimation.hpp"

namespace clthres::harness {

enum class ColumnType { kCategorical, kContinuous };

struct SplitRule {
  enum class Kind {
    /// Seeded shuffle; the first round(ratio * rows) go to training.
    kRatio,
    /// The first train_count rows train; the next test_count (all remaining
    /// when absent) test.
    kCount,
    /// Every row of the main file trains; test rows come from test_path.
    kFile,
  };
  Kind kind = Kind::kRatio;
  double train_ratio = 0.8;
  std::uint64_t seed = 1;
  int train_count = 0;
  std::optional<int> test_count;
  std::string test_path;
};

struct DatasetSpec {
  std::string path;
  bool header = true;
  char delimiter = ',';
  /// One tag per column; empty means all categorical.
  std::vector<ColumnType> types;
  SplitRule split;
};

struct ColumnEncoding {
  std::string name;
  ColumnType type = ColumnType::kCategorical;
  /// Continuous only: the training mean used as the cut.
  double threshold = 0.0;
  /// Categorical: the raw value behind each symbol. Continuous: {"<=t", ">t"}.
  std::vector<std::string> categories;
};

struct EncodingReport {
  std::vector<ColumnEncoding> columns;
  int r = 2;
  /// 0-based data-row indices (header excluded) of each split in the main
  /// file. Test rows from a separate file are not listed.
  std::vector<int> train_rows;
  std::vector<int> test_rows;
};

struct Dataset {
  SampleMatrix train;
  SampleMatrix test;
  EncodingReport report;
};

/// Deterministic for a given DatasetSpec. Throws IoError with line and column for an
/// unparseable or empty cell, and std::invalid_argument for a bad split or
/// fewer than two columns.
Dataset load_dataset(const DatasetSpec& spec);

/// Parses "categorical"/"c" and "continuous"/"n" tags.
ColumnType parse_column_type(const std::string& tag);

}  // namespace clthres::harness
