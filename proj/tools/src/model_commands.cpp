#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "clthres/io.hpp"
#include "clthres/learn.hpp"
#include "clthres/rng.hpp"
#include "clthres/synth.hpp"
#include "commands.hpp"

namespace clthres::cli {

void add_learn(CLI::App& app) {
  struct Opts {
    std::string input;
    bool header = false;
    std::optional<int> r;
    double beta = 0.625;
    std::optional<double> oracle_eps;
    std::string output;
    std::string ranking;
    bool bits = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand("learn", "Learn a forest from a samples CSV");
  cmd->add_option("--input", o->input, "Samples CSV (integer symbols)")->required();
  cmd->add_flag("--header", o->header, "First line of the CSV is a header");
  cmd->add_option("--r", o->r, "Alphabet size (default: inferred)");
  auto* beta = cmd->add_option("--beta", o->beta, "Exponent of eps_n = n^-beta")->capture_default_str();
  cmd->add_option("--oracle-eps", o->oracle_eps, "Fixed threshold instead of n^-beta")->excludes(beta);
  cmd->add_option("--output", o->output, "Write the learned model as JSON");
  cmd->add_option("--ranking", o->ranking, "Write the Chow-Liu ranking as CSV");
  cmd->add_flag("--bits", o->bits, "Report mutual information in bits on stdout");
  cmd->callback([o] {
    SamplesCsvOptions csv;
    csv.header = o->header;
    csv.r = o->r;
    const SampleMatrix s = read_samples(o->input, csv);
    const RegSchedule sched = o->oracle_eps ? RegSchedule::oracle(*o->oracle_eps) : RegSchedule::power(o->beta);
    const LearnedModel learned = clthres(s, sched);
    if (!o->output.empty()) write_model(o->output, learned.model);
    if (!o->ranking.empty()) {
      std::ostringstream os;
      write_ranking_csv(os, learned);
      write_text(o->ranking, os.str());
    }
    const double unit = o->bits ? std::log(2.0) : 1.0;
    const char* name = o->bits ? "bits" : "nats";
    std::cout << "n=" << s.n() << " d=" << s.d() << " r=" << s.r() << " eps=" << learned.eps / unit << ' '
              << name << " k_hat=" << learned.k_hat << '\n';
    for (int k = 0; k < learned.k_hat; ++k) {
      const Edge& e = learned.edge_set[k];
      std::cout << "  " << e.u << " - " << e.v << "  " << learned.ranking.scores[k] / unit << '\n';
    }
  });
}

void add_generate(CLI::App& app) {
  struct Opts {
    std::string topology = "star";
    int d = 21;
    int k = 10;
    double crossover = 0.3;
    int r = 2;
    double min_entry = 0.01;
    double min_edge_mi = 0.0;
    int n = 1000;
    std::uint64_t seed = 1;
    std::string out;
    std::string model_out;
    bool header = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand("generate", "Build a forest model and sample from it");
  cmd->add_option("--topology", o->topology, "star or random")
      ->check(CLI::IsMember({"star", "random"}))
      ->capture_default_str();
  cmd->add_option("--d", o->d, "Number of variables")->capture_default_str();
  cmd->add_option("--k", o->k, "Number of edges")->capture_default_str();
  cmd->add_option("--crossover", o->crossover, "Star: channel crossover probability")->capture_default_str();
  cmd->add_option("--r", o->r, "Random: alphabet size")->capture_default_str();
  cmd->add_option("--min-entry", o->min_entry, "Random: smallest probability")->capture_default_str();
  cmd->add_option("--min-edge-mi", o->min_edge_mi, "Random: smallest edge MI (nats)")->capture_default_str();
  cmd->add_option("--n", o->n, "Number of samples")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Seed (model draws use stream 0, samples stream 1)")->capture_default_str();
  cmd->add_option("--out", o->out, "Samples CSV")->required();
  cmd->add_option("--model-out", o->model_out, "Model JSON");
  cmd->add_flag("--header", o->header, "Write a header line");
  cmd->callback([o] {
    std::optional<ForestModel> m;
    if (o->topology == "star") {
      m.emplace(build_star_forest({o->d, o->k, o->crossover}));
    } else {
      SeededRng model_rng(o->seed, 0);
      RandomForestPolicy policy;
      policy.min_entry = o->min_entry;
      policy.min_edge_mi = o->min_edge_mi;
      m.emplace(build_random_forest(o->d, o->k, o->r, model_rng, policy));
    }
    SeededRng rng(o->seed, 1);
    write_samples(o->out, sample(*m, o->n, rng), o->header);
    if (!o->model_out.empty()) write_model(o->model_out, *m);
    std::cout << "wrote " << o->n << " samples of d=" << m->d() << " (k=" << m->edges().size() << ") to "
              << o->out << '\n';
  });
}

}  // namespace clthres::cli
