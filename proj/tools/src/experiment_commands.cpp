#include <cmath>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "clthres/harness/dataset.hpp"
#include "clthres/harness/experiment.hpp"
#include "clthres/harness/loglik.hpp"
#include "clthres/harness/report.hpp"
#include "clthres/io.hpp"
#include "commands.hpp"

namespace clthres::cli {
namespace {

using namespace clthres::harness;

// Experiment options: a JSON config file, then any flag given explicitly.
struct SweepOpts {
  std::string config;
  std::string profile;
  std::string topology;
  std::optional<int> d, k, r, trials, threads;
  std::optional<double> crossover, oracle_eps;
  std::optional<std::uint64_t> seed, model_seed;
  std::vector<int> n;
  std::vector<double> beta;
  bool oracle = false;
  std::string records, summary, manifest;
};

void add_sweep_options(CLI::App* cmd, SweepOpts& o) {
  cmd->add_option("--config", o.config, "JSON experiment config");
  cmd->add_option("--profile", o.profile, "desk | paper")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--topology", o.topology, "star | random")->check(CLI::IsMember({"star", "random"}));
  cmd->add_option("--d", o.d, "Number of variables");
  cmd->add_option("--k", o.k, "Number of true edges");
  cmd->add_option("--r", o.r, "Alphabet size (random topology)");
  cmd->add_option("--crossover", o.crossover, "Star channel crossover");
  cmd->add_option("--model-seed", o.model_seed, "Seed for random topologies");
  cmd->add_option("--n", o.n, "Sample sizes, comma separated")->delimiter(',');
  cmd->add_option("--beta", o.beta, "Exponents, comma separated")->delimiter(',');
  cmd->add_flag("--oracle", o.oracle, "Add the fixed threshold I_min / 2");
  cmd->add_option("--oracle-eps", o.oracle_eps, "Add a fixed threshold");
  cmd->add_option("--trials", o.trials, "Trials per cell");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--records", o.records, "Per-trial CSV");
  cmd->add_option("--summary", o.summary, "Per-cell CSV");
  cmd->add_option("--manifest", o.manifest, "JSON manifest");
}

ExperimentConfig resolve(const SweepOpts& o) {
  ExperimentConfig cfg = desk_profile();
  if (!o.config.empty()) cfg = config_from_json(read_text(o.config));
  if (o.profile == "paper") {
    cfg = paper_profile();
  } else if (o.profile == "desk") {
    cfg = desk_profile();
  }
  if (o.topology == "star") cfg.topology.kind = TopologySpec::Kind::kStar;
  if (o.topology == "random") cfg.topology.kind = TopologySpec::Kind::kRandom;
  if (o.d) cfg.topology.d = *o.d;
  if (o.k) cfg.topology.k = *o.k;
  if (o.r) cfg.topology.r = *o.r;
  if (o.crossover) cfg.topology.crossover = *o.crossover;
  if (o.model_seed) cfg.topology.model_seed = *o.model_seed;
  if (!o.n.empty()) cfg.n_grid = o.n;
  if (!o.beta.empty()) cfg.beta_grid = o.beta;
  if (o.oracle) cfg.oracle_half_imin = true;
  if (o.oracle_eps) cfg.oracle_eps = o.oracle_eps;
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.records.empty()) cfg.records_path = o.records;
  if (!o.summary.empty()) cfg.summary_path = o.summary;
  if (!o.manifest.empty()) cfg.manifest_path = o.manifest;
  validate(cfg);
  return cfg;
}

template <class Fn>
void write_csv(const std::string& path, Fn&& fn) {
  if (path.empty()) return;
  std::ostringstream os;
  fn(os);
  write_text(path, os.str());
}

std::string fmt_p(const ProportionEstimate& p) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << p.estimate << " [" << p.lo << ", " << p.hi << "]";
  return os.str();
}

struct DataOpts {
  std::string data;
  bool no_header = false;
  std::string types;
  char delimiter = ',';
  std::string split = "ratio";
  double train_ratio = 0.8;
  int train_count = 0;
  std::optional<int> test_count;
  std::string test_file;
  std::uint64_t split_seed = 1;
  std::string encoding;
};

void add_data_options(CLI::App* cmd, DataOpts& o) {
  cmd->add_option("--data", o.data, "Dataset CSV")->required();
  cmd->add_flag("--no-header", o.no_header, "The CSV has no header line");
  cmd->add_option("--types", o.types, "Column tags, comma separated: categorical|continuous (c|n)");
  cmd->add_option("--delimiter", o.delimiter, "Field separator")->capture_default_str();
  cmd->add_option("--split", o.split, "ratio | count | file")
      ->check(CLI::IsMember({"ratio", "count", "file"}))
      ->capture_default_str();
  cmd->add_option("--train-ratio", o.train_ratio, "ratio split: training fraction")->capture_default_str();
  cmd->add_option("--train-count", o.train_count, "count split: leading rows used for training");
  cmd->add_option("--test-count", o.test_count, "count split: rows after those used for testing");
  cmd->add_option("--test-file", o.test_file, "file split: separate test CSV");
  cmd->add_option("--split-seed", o.split_seed, "ratio split: shuffle seed")->capture_default_str();
  cmd->add_option("--encoding", o.encoding, "Write the encoding report as JSON");
}

Dataset load(const DataOpts& o) {
  DatasetSpec spec;
  spec.path = o.data;
  spec.header = !o.no_header;
  spec.delimiter = o.delimiter;
  if (!o.types.empty()) {
    std::stringstream ss(o.types);
    std::string tag;
    while (std::getline(ss, tag, ',')) spec.types.push_back(parse_column_type(tag));
  }
  if (o.split == "ratio") {
    spec.split.kind = SplitRule::Kind::kRatio;
  } else if (o.split == "count") {
    spec.split.kind = SplitRule::Kind::kCount;
  } else {
    spec.split.kind = SplitRule::Kind::kFile;
  }
  spec.split.train_ratio = o.train_ratio;
  spec.split.seed = o.split_seed;
  spec.split.train_count = o.train_count;
  spec.split.test_count = o.test_count;
  spec.split.test_path = o.test_file;
  Dataset ds = load_dataset(spec);
  if (!o.encoding.empty()) write_text(o.encoding, encoding_json(ds.report));
  return ds;
}

}  // namespace

void add_mc_error(CLI::App& app) {
  auto o = std::make_shared<SweepOpts>();
  CLI::App* cmd = app.add_subcommand("mc-error", "Monte Carlo error probabilities over (n, beta)");
  add_sweep_options(cmd, *o);
  cmd->callback([o] {
    const ExperimentConfig cfg = resolve(*o);
    const SweepResult res = mc_error_sweep(cfg);
    write_csv(cfg.records_path, [&](std::ostream& os) { write_records_csv(os, res.records); });
    write_csv(cfg.summary_path, [&](std::ostream& os) { write_summary_csv(os, res.cells); });
    if (!cfg.manifest_path.empty()) write_text(cfg.manifest_path, manifest_json("mc-error", cfg));
    std::cout << "n\tschedule\tbeta\tP(A)\tP(over)\tP(under)\tP(B)\n";
    for (const CellSummary& c : res.cells) {
      std::cout << c.n << '\t' << c.schedule << '\t' << (std::isnan(c.beta) ? std::string("-") : std::to_string(c.beta))
                << '\t' << fmt_p(c.err_structure) << '\t' << fmt_p(c.over) << '\t' << fmt_p(c.under) << '\t'
                << fmt_p(c.err_top_k) << '\n';
    }
  });
}

void add_kl_decay(CLI::App& app) {
  auto o = std::make_shared<SweepOpts>();
  CLI::App* cmd = app.add_subcommand("kl-decay", "Mean D(P||P*) against n with a log-log fit");
  add_sweep_options(cmd, *o);
  cmd->callback([o] {
    SweepOpts opts = *o;
    if (opts.beta.empty() && opts.config.empty() && !opts.oracle && !opts.oracle_eps) opts.beta = {0.625};
    const ExperimentConfig cfg = resolve(opts);
    const KlDecayResult res = kl_decay(cfg);
    write_csv(cfg.records_path, [&](std::ostream& os) { write_records_csv(os, res.sweep.records); });
    write_csv(cfg.summary_path, [&](std::ostream& os) { write_kl_decay_csv(os, res); });
    if (!cfg.manifest_path.empty()) {
      std::ostringstream extra;
      extra.precision(17);
      extra << "{\"fit\": {\"slope\": " << res.fit.slope << ", \"intercept\": " << res.fit.intercept
            << ", \"r_squared\": " << res.fit.r_squared << "}}";
      write_text(cfg.manifest_path, manifest_json("kl-decay", cfg, extra.str()));
    }
    std::cout << "n\tmean_kl\tmin_kl\tmax_kl\n";
    for (const CellSummary& c : res.sweep.cells) {
      std::cout << c.n << '\t' << c.mean_kl << '\t' << c.min_kl << '\t' << c.max_kl << '\n';
    }
    std::cout << "slope=" << res.fit.slope << " intercept=" << res.fit.intercept << " r2=" << res.fit.r_squared
              << '\n';
  });
}

void add_loglik(CLI::App& app) {
  auto o = std::make_shared<DataOpts>();
  auto betas = std::make_shared<std::vector<double>>(std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  auto output = std::make_shared<std::string>();
  CLI::App* cmd = app.add_subcommand("loglik", "Train/test log-likelihood per sample across beta");
  add_data_options(cmd, *o);
  cmd->add_option("--beta", *betas, "Exponents, comma separated")->delimiter(',');
  cmd->add_option("--output", *output, "Profile CSV");
  cmd->callback([o, betas, output] {
    const Dataset ds = load(*o);
    const auto rows = beta_profile(ds.train, ds.test, *betas);
    write_csv(*output, [&](std::ostream& os) { write_beta_profile_csv(os, rows); });
    std::cout << "train n=" << ds.train.n() << " test n=" << ds.test.n() << " d=" << ds.train.d()
              << " r=" << ds.train.r() << '\n';
    std::cout << "beta\tk_hat\ttrain_ll\ttest_ll\ttest_floored\n";
    for (const auto& r : rows) {
      std::cout << r.beta << '\t' << r.k_hat << '\t' << r.train.mean << '\t' << r.test.mean << '\t' << r.test.floored
                << '\n';
    }
  });
}

void add_cv_beta(CLI::App& app) {
  auto o = std::make_shared<DataOpts>();
  auto betas = std::make_shared<std::vector<double>>(std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  auto folds = std::make_shared<int>(5);
  auto seed = std::make_shared<std::uint64_t>(1);
  auto output = std::make_shared<std::string>();
  CLI::App* cmd = app.add_subcommand("cv-beta", "Choose beta by K-fold cross-validation on the training split");
  add_data_options(cmd, *o);
  cmd->add_option("--beta", *betas, "Candidate exponents, comma separated")->delimiter(',');
  cmd->add_option("--folds", *folds, "Number of folds")->capture_default_str();
  cmd->add_option("--seed", *seed, "Fold assignment seed")->capture_default_str();
  cmd->add_option("--output", *output, "Per-fold CSV");
  cmd->callback([o, betas, folds, seed, output] {
    const Dataset ds = load(*o);
    const CvResult res = cross_validate_beta(ds.train, *folds, *betas, *seed);
    write_csv(*output, [&](std::ostream& os) { write_cv_csv(os, res); });
    std::cout << "beta\tmean_heldout_ll\n";
    for (std::size_t b = 0; b < betas->size(); ++b) std::cout << (*betas)[b] << '\t' << res.mean_heldout[b] << '\n';
    std::cout << "best_beta=" << res.best_beta << '\n';
  });
}

}  // namespace clthres::cli
