#pragma once

// Serialization of models, pairwise tables, sample matrices and rankings.
//
// Model JSON:
//   {"d": 3, "r": 2, "edges": [[0, 1]],
//    "node_marginals": [[0.5, 0.5], ...],
//    "edge_marginals": {"0-1": [[0.35, 0.15], [0.15, 0.35]]}}
// Doubles are written in shortest round-trip form, so a write/read cycle
// reproduces every probability bit for bit.
//
// Samples CSV: one sample per line, comma-separated integer symbols, optional
// header line. Errors name the source and the 1-based line (and column).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "clthres/estimation.hpp"
#include "clthres/forest.hpp"
#include "clthres/learn.hpp"

namespace clthres {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string model_to_json(const ForestModel& m);
/// Throws IoError on malformed JSON or a schema violation, and
/// std::invalid_argument if the decoded model breaks a ForestModel invariant.
ForestModel model_from_json(std::string_view text);

void write_model(const std::filesystem::path& path, const ForestModel& m);
ForestModel read_model(const std::filesystem::path& path);

/// {"r": 2, "table": [[...], ...]}, rows indexing X. A bare nested array is
/// also accepted on input.
std::string pairwise_to_json(const PairwiseDist& p);
PairwiseDist pairwise_from_json(std::string_view text);
PairwiseDist read_pairwise(const std::filesystem::path& path);

struct SamplesCsvOptions {
  bool header = false;
  /// Alphabet size; inferred as max(2, largest symbol + 1) when absent.
  std::optional<int> r;
};

SampleMatrix read_samples_csv(std::istream& in, const SamplesCsvOptions& opts,
                              std::string_view source = "<stream>");
SampleMatrix read_samples(const std::filesystem::path& path, const SamplesCsvOptions& opts = {});

/// The header, when requested, is x0,x1,...
void write_samples_csv(std::ostream& out, const SampleMatrix& s, bool header = false);
void write_samples(const std::filesystem::path& path, const SampleMatrix& s, bool header = false);

/// Columns rank,i,j,mi_nats,kept; rank is 1-based and kept marks the first
/// k_hat rows.
void write_ranking_csv(std::ostream& out, const LearnedModel& learned);

/// Reads a whole file, throwing IoError with the path on failure.
std::string read_text(const std::filesystem::path& path);
/// Writes (truncating), creating parent directories as needed.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace clthres
