#include <iostream>
#include <memory>
#include <optional>

#include <nlohmann/json.hpp>

#include "clthres/exponents.hpp"
#include "clthres/io.hpp"
#include "commands.hpp"

namespace clthres::cli {
namespace {

using nlohmann::json;

json table(const PairwiseDist& p) {
  json rows = json::array();
  for (int x = 0; x < p.r(); ++x) {
    json row = json::array();
    for (int y = 0; y < p.r(); ++y) row.push_back(p(x, y));
    rows.push_back(row);
  }
  return rows;
}

json rate_json(const char* which, const RateFunctionResult& res, double level) {
  json j = {{"which", which},
            {"level", level},
            {"value", res.value},
            {"argmin", table(res.argmin)},
            {"argmin_mi", mutual_information(res.argmin)},
            {"diagnostics",
             {{"starts", res.diagnostics.starts},
              {"best_start", res.diagnostics.best_start},
              {"iterations", res.diagnostics.iterations},
              {"gradient_norm", res.diagnostics.gradient_norm},
              {"constraint_violation", res.diagnostics.constraint_violation},
              {"locally_optimal_only", res.diagnostics.locally_optimal_only}}}};
  if (res.surrogate) j["surrogate"] = *res.surrogate;
  return j;
}

}  // namespace

void add_exponents(CLI::App& app) {
  struct Opts {
    std::string dist;
    std::string which;
    double a = 0.0;
    std::optional<double> b;
    std::string q;
    int d = 0;
    int k = 0;
    int r = 2;
    double rho = 1.0;
    int starts = 20;
    std::uint64_t seed = 0x5eed;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* cmd = app.add_subcommand("exponents", "Error-exponent quantities as JSON on stdout");
  cmd->add_option("--which", o->which, "mu-star | under | over | euclid | converse | counts")
      ->required()
      ->check(CLI::IsMember({"mu-star", "under", "over", "euclid", "converse", "counts"}));
  cmd->add_option("--dist", o->dist, "Pairwise distribution JSON ({\"r\", \"table\"})");
  cmd->add_option("--a", o->a, "under: MI budget a (default 0)");
  cmd->add_option("--b", o->b, "over: MI level b");
  cmd->add_option("--q", o->q, "euclid: second pairwise distribution JSON");
  cmd->add_option("--d", o->d, "converse/counts: number of nodes");
  cmd->add_option("--k", o->k, "converse/counts: number of edges");
  cmd->add_option("--r", o->r, "converse: alphabet size")->capture_default_str();
  cmd->add_option("--rho", o->rho, "converse: fraction in (0, 1]")->capture_default_str();
  cmd->add_option("--starts", o->starts, "Solver starts")->capture_default_str();
  cmd->add_option("--seed", o->seed, "Solver seed");
  cmd->callback([o] {
    const auto need_dist = [&]() {
      if (o->dist.empty()) throw std::invalid_argument("--which " + o->which + " needs --dist");
      return read_pairwise(o->dist);
    };
    RateSolverOptions solver;
    solver.starts = o->starts;
    solver.seed = o->seed;
    json out;
    if (o->which == "mu-star") {
      const PairwiseDist p = need_dist();
      out = {{"which", "mu-star"}, {"value", mu_star(p)}};
    } else if (o->which == "under") {
      out = rate_json("under", underestimation_rate(need_dist(), o->a, solver), o->a);
    } else if (o->which == "over") {
      if (!o->b) throw std::invalid_argument("--which over needs --b");
      out = rate_json("over", overestimation_rate(need_dist(), *o->b, solver), *o->b);
    } else if (o->which == "euclid") {
      if (o->q.empty()) throw std::invalid_argument("--which euclid needs --q");
      const EuclideanApprox e = euclidean_kl_approx(need_dist(), read_pairwise(o->q));
      out = {{"which", "euclid"}, {"exact", e.exact}, {"approx", e.approx}, {"gap", e.gap}};
    } else if (o->which == "converse") {
      const ConverseBounds c = converse_sample_bound(o->d, o->k, o->r, o->rho);
      out = {{"which", "converse"}, {"fixed_k", c.fixed_k}, {"all_forests", c.all_forests}};
    } else {
      const ForestCountBounds f = forest_count_bounds(o->d, o->k);
      out = {{"which", "counts"},
             {"log_fixed_k_lower", f.log_fixed_k_lower},
             {"log_all_lower", f.log_all_lower},
             {"log_all_upper", f.log_all_upper}};
      if (o->d <= 7) out["exact_counts_by_k"] = enumerate_forest_counts(o->d);
    }
    std::cout << out.dump(2) << '\n';
  });
}

}  // namespace clthres::cli
