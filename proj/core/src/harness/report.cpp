#include "clthres/harness/report.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clthres/io.hpp"

namespace clthres::harness {
namespace {

using nlohmann::json;

// Full round-trip precision for doubles in CSV output.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(std::ostream& os) : os_(os), old_(os.precision(std::numeric_limits<double>::max_digits10)) {}
  ~PrecisionGuard() { os_.precision(old_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  std::ostream& os_;
  std::streamsize old_;
};

// NaN betas (fixed-threshold schedules) are written as empty fields.
std::string beta_field(double beta) {
  if (std::isnan(beta)) return "";
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << beta;
  return os.str();
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.contains(key)) throw IoError("config: unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read_into(const json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string version() { return CLTHRES_VERSION_STRING; }

ExperimentConfig config_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw IoError("config: top level must be an object");
  check_keys(doc, {"profile", "topology", "n", "beta", "oracle", "trials", "seed", "threads", "output"},
             "config");

  std::string profile = "desk";
  read_into(doc, "profile", profile);
  ExperimentConfig cfg;
  if (profile == "desk") {
    cfg = desk_profile();
  } else if (profile == "paper") {
    cfg = paper_profile();
  } else {
    throw IoError("config: unknown profile '" + profile + "'");
  }

  if (doc.contains("topology")) {
    const json& t = doc["topology"];
    if (!t.is_object()) throw IoError("config: 'topology' must be an object");
    check_keys(t, {"kind", "d", "k", "crossover", "r", "model_seed", "min_entry", "min_edge_mi"}, "topology");
    std::string kind = cfg.topology.kind == TopologySpec::Kind::kStar ? "star" : "random";
    read_into(t, "kind", kind);
    if (kind == "star") {
      cfg.topology.kind = TopologySpec::Kind::kStar;
    } else if (kind == "random") {
      cfg.topology.kind = TopologySpec::Kind::kRandom;
    } else {
      throw IoError("config: topology.kind must be 'star' or 'random'");
    }
    read_into(t, "d", cfg.topology.d);
    read_into(t, "k", cfg.topology.k);
    read_into(t, "crossover", cfg.topology.crossover);
    read_into(t, "r", cfg.topology.r);
    read_into(t, "model_seed", cfg.topology.model_seed);
    read_into(t, "min_entry", cfg.topology.min_entry);
    read_into(t, "min_edge_mi", cfg.topology.min_edge_mi);
  }
  read_into(doc, "n", cfg.n_grid);
  read_into(doc, "beta", cfg.beta_grid);
  if (doc.contains("oracle")) {
    const json& o = doc["oracle"];
    cfg.oracle_half_imin = false;
    cfg.oracle_eps.reset();
    if (o.is_boolean()) {
      cfg.oracle_half_imin = o.get<bool>();
    } else if (o.is_number()) {
      cfg.oracle_eps = o.get<double>();
    } else {
      throw IoError("config: 'oracle' must be a boolean or a number");
    }
  }
  read_into(doc, "trials", cfg.trials);
  read_into(doc, "seed", cfg.master_seed);
  read_into(doc, "threads", cfg.threads);
  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (!o.is_object()) throw IoError("config: 'output' must be an object");
    check_keys(o, {"records", "summary", "manifest"}, "output");
    read_into(o, "records", cfg.records_path);
    read_into(o, "summary", cfg.summary_path);
    read_into(o, "manifest", cfg.manifest_path);
  }
  return cfg;
}

namespace {

json config_json(const ExperimentConfig& cfg) {
  json j;
  const TopologySpec& t = cfg.topology;
  j["topology"] = {{"kind", t.kind == TopologySpec::Kind::kStar ? "star" : "random"},
                   {"d", t.d},
                   {"k", t.k},
                   {"crossover", t.crossover},
                   {"r", t.r},
                   {"model_seed", t.model_seed},
                   {"min_entry", t.min_entry},
                   {"min_edge_mi", t.min_edge_mi}};
  j["n"] = cfg.n_grid;
  j["beta"] = cfg.beta_grid;
  if (cfg.oracle_half_imin) {
    j["oracle"] = true;
  } else if (cfg.oracle_eps) {
    j["oracle"] = *cfg.oracle_eps;
  } else {
    j["oracle"] = false;
  }
  j["trials"] = cfg.trials;
  j["seed"] = cfg.master_seed;
  j["threads"] = cfg.threads;
  j["output"] = {{"records", cfg.records_path}, {"summary", cfg.summary_path}, {"manifest", cfg.manifest_path}};
  return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
  PrecisionGuard guard(out);
  out << "trial,n,schedule,beta,eps,k,k_hat,err_structure,over,under,err_top_k,kl,risk\n";
  for (const ExperimentRecord& r : records) {
    out << r.trial << ',' << r.n << ',' << r.schedule << ',' << beta_field(r.beta) << ',' << r.eps << ','
        << r.k << ',' << r.k_hat << ',' << int{r.err_structure} << ',' << int{r.over} << ','
        << int{r.under} << ',' << int{r.err_top_k} << ',' << r.kl << ',' << r.risk << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells) {
  PrecisionGuard guard(out);
  out << "n,schedule,beta,eps,trials";
  for (const char* ev : {"err_structure", "over", "under", "err_top_k"}) {
    out << ',' << ev << ',' << ev << "_lo," << ev << "_hi";
  }
  out << ",mean_k_hat,mean_kl,min_kl,max_kl,mean_risk\n";
  for (const CellSummary& c : cells) {
    out << c.n << ',' << c.schedule << ',' << beta_field(c.beta) << ',' << c.eps << ','
        << c.err_structure.trials;
    for (const ProportionEstimate* p : {&c.err_structure, &c.over, &c.under, &c.err_top_k}) {
      out << ',' << p->estimate << ',' << p->lo << ',' << p->hi;
    }
    out << ',' << c.mean_k_hat << ',' << c.mean_kl << ',' << c.min_kl << ',' << c.max_kl << ','
        << c.mean_risk << '\n';
  }
}

void write_kl_decay_csv(std::ostream& out, const KlDecayResult& result) {
  PrecisionGuard guard(out);
  out << "n,mean_kl,min_kl,max_kl,log_n,log_mean_kl,residual\n";
  for (std::size_t i = 0; i < result.sweep.cells.size(); ++i) {
    const CellSummary& c = result.sweep.cells[i];
    out << c.n << ',' << c.mean_kl << ',' << c.min_kl << ',' << c.max_kl << ','
        << std::log(static_cast<double>(c.n)) << ',' << std::log(c.mean_kl) << ','
        << result.fit.residuals.at(i) << '\n';
  }
}

void write_beta_profile_csv(std::ostream& out, std::span<const BetaProfileRow> rows) {
  PrecisionGuard guard(out);
  out << "beta,eps,k_hat,train_loglik,test_loglik,train_floored,test_floored\n";
  for (const BetaProfileRow& r : rows) {
    out << r.beta << ',' << r.eps << ',' << r.k_hat << ',' << r.train.mean << ',' << r.test.mean << ','
        << r.train.floored << ',' << r.test.floored << '\n';
  }
}

void write_cv_csv(std::ostream& out, const CvResult& result) {
  PrecisionGuard guard(out);
  out << "fold,beta,k_hat,heldout_loglik,floored\n";
  for (const CvFoldRow& r : result.folds) {
    out << r.fold << ',' << r.beta << ',' << r.k_hat << ',' << r.heldout << ',' << r.floored << '\n';
  }
}

std::string manifest_json(std::string_view command, const ExperimentConfig& cfg, std::string_view extra_json) {
  json doc;
  doc["tool"] = "clthres";
  doc["version"] = version();
  doc["command"] = std::string(command);
  doc["config"] = config_json(cfg);
  doc["outputs"] = {{"records", cfg.records_path}, {"summary", cfg.summary_path}};
  if (!extra_json.empty()) {
    json extra;
    try {
      extra = json::parse(extra_json);
    } catch (const json::parse_error& e) {
      throw IoError(std::string("manifest: extra fields are not valid JSON: ") + e.what());
    }
    if (!extra.is_object()) throw IoError("manifest: extra fields must be a JSON object");
    doc.update(extra);
  }
  return doc.dump(2) + "\n";
}

std::string encoding_json(const EncodingReport& report) {
  json cols = json::array();
  for (const ColumnEncoding& c : report.columns) {
    json j = {{"name", c.name},
              {"type", c.type == ColumnType::kContinuous ? "continuous" : "categorical"},
              {"categories", c.categories}};
    if (c.type == ColumnType::kContinuous) j["threshold"] = c.threshold;
    cols.push_back(std::move(j));
  }
  json doc = {{"r", report.r},
              {"columns", std::move(cols)},
              {"train_rows", report.train_rows},
              {"test_rows", report.test_rows}};
  return doc.dump(2) + "\n";
}

}  // namespace clthres::harness
