#pragma once

// Persistence for experiment output and the JSON experiment config.
//
// Config keys (all optional; defaults come from desk_profile(), or from
// paper_profile() when "profile": "paper"):
//
//   profile        "desk" | "paper"
//   topology       {"kind": "star"|"random", "d", "k", "crossover", "r",
//                   "model_seed", "min_entry", "min_edge_mi"}
//   n              [int, ...]
//   beta           [real, ...]
//   oracle         false | true (I_min / 2 of the truth) | real (fixed eps)
//   trials         int
//   seed           int (master seed)
//   threads        int (0 = hardware concurrency)
//   output         {"records": path, "summary": path, "manifest": path}

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "clthres/harness/dataset.hpp"
#include "clthres/harness/experiment.hpp"
#include "clthres/harness/loglik.hpp"

namespace clthres::harness {

/// Library version, e.g. "0.1.0".
std::string version();

/// Throws IoError on malformed JSON or an unknown key.
ExperimentConfig config_from_json(std::string_view text);
std::string config_to_json(const ExperimentConfig& cfg);

/// Header: trial,n,schedule,beta,eps,k,k_hat,err_structure,over,under,err_top_k,kl,risk
void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records);

/// One row per cell with each event's estimate and Wilson bounds.
void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells);

void write_kl_decay_csv(std::ostream& out, const KlDecayResult& result);
void write_beta_profile_csv(std::ostream& out, std::span<const BetaProfileRow> rows);
void write_cv_csv(std::ostream& out, const CvResult& result);

/// {"tool", "version", "command", "config", "outputs", ...extra}.
/// `extra_json` must be a JSON object (or empty) and is merged in.
std::string manifest_json(std::string_view command, const ExperimentConfig& cfg,
                          std::string_view extra_json = {});

/// Encoding details of a loaded dataset as JSON.
std::string encoding_json(const EncodingReport& report);

}  // namespace clthres::harness
