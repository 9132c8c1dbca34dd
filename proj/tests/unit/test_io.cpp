#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include "clthres/io.hpp"
#include "clthres/learn.hpp"
#include "clthres/synth.hpp"
#include "models.hpp"

using namespace clthres;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("io");

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "clthres_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string csv_error(const std::string& text, SamplesCsvOptions opts = {}) {
  std::istringstream in(text);
  try {
    read_samples_csv(in, opts, "data.csv");
  } catch (const IoError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("model JSON round-trips bit for bit") {
  std::mt19937_64 g(10);
  for (int trial = 0; trial < 20; ++trial) {
    const ForestModel m = testmodels::random_model(2 + trial % 6, 2 + trial % 4, g);
    const fs::path p = scratch("model_" + std::to_string(trial) + ".json");
    write_model(p, m);
    const ForestModel back = read_model(p);
    CHECK(back.d() == m.d());
    CHECK(back.r() == m.r());
    CHECK(back.edges() == m.edges());
    CHECK(back.node_marginals() == m.node_marginals());
    CHECK(back.edge_marginals() == m.edge_marginals());
    CHECK(model_to_json(back) == model_to_json(m));
  }
}

TEST_CASE("model JSON rejects bad documents") {
  CHECK_THROWS_AS(model_from_json("{"), IoError);
  CHECK_THROWS_AS(model_from_json("[1, 2]"), IoError);
  CHECK_THROWS_AS(model_from_json(R"({"d": 2, "r": 2})"), IoError);
  CHECK_THROWS_AS(model_from_json(R"({"d": 2, "r": 2, "edges": [[0, 1]],
      "node_marginals": [[0.5, 0.5], [0.5, 0.5]], "edge_marginals": {}})"),
                  IoError);
  CHECK_THROWS_AS(model_from_json(R"({"d": 2, "r": 2, "edges": [[0, 3]],
      "node_marginals": [[0.5, 0.5], [0.5, 0.5]], "edge_marginals": {"0-3": [[0.25, 0.25], [0.25, 0.25]]}})"),
                  IoError);
  // Valid schema, inconsistent marginals.
  CHECK_THROWS_AS(model_from_json(R"({"d": 2, "r": 2, "edges": [[0, 1]],
      "node_marginals": [[0.5, 0.5], [0.5, 0.5]], "edge_marginals": {"0-1": [[0.4, 0.2], [0.2, 0.2]]}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(read_model(scratch("missing.json")), IoError);
}

TEST_CASE("pairwise JSON") {
  const PairwiseDist p(2, {0.1, 0.2, 0.3, 0.4});
  CHECK(pairwise_from_json(pairwise_to_json(p)) == p);
  CHECK(pairwise_from_json("[[0.1, 0.2], [0.3, 0.4]]") == p);
  CHECK_THROWS_AS(pairwise_from_json(R"({"r": 3, "table": [[0.1, 0.2], [0.3, 0.4]]})"), IoError);
  CHECK_THROWS_AS(pairwise_from_json("[[0.1, 0.2], [0.3]]"), IoError);
  CHECK_THROWS_AS(pairwise_from_json("[[0.5, 0.5], [0.5, 0.5]]"), std::invalid_argument);
}

TEST_CASE("samples CSV parsing") {
  std::istringstream in("x0,x1,x2\n0,1,2\n 2 ,0,1\n\n");
  const SampleMatrix s = read_samples_csv(in, {true, std::nullopt});
  CHECK(s.n() == 2);
  CHECK(s.d() == 3);
  CHECK(s.r() == 3);
  CHECK(s(1, 0) == 2);

  std::istringstream bin("0,0\n0,0\n");
  CHECK(read_samples_csv(bin, {}).r() == 2);
  std::istringstream wide("0,1\n1,0\n");
  CHECK(read_samples_csv(wide, {false, 5}).r() == 5);

  CHECK(csv_error("0,1\n1,x\n").starts_with("data.csv:2:2:"));
  CHECK(csv_error("0,1\n1,0\n1\n").starts_with("data.csv:3:"));
  CHECK(csv_error("0,1\n\n1,0\n").starts_with("data.csv:2:"));
  CHECK(csv_error("0,1\n1,-1\n").starts_with("data.csv:2:2:"));
  CHECK(csv_error("0,1\n1,,0\n").starts_with("data.csv:2:2:"));
  CHECK(csv_error("0,3\n", {false, 3}).starts_with("data.csv:1:2:"));
  CHECK(csv_error("0,1.5\n").starts_with("data.csv:1:2:"));
  CHECK(csv_error("").starts_with("data.csv:"));
  CHECK(csv_error("0\n1\n").starts_with("data.csv:"));
  CHECK_THROWS_AS(read_samples(scratch("absent.csv")), IoError);
}

TEST_CASE("samples CSV round trip") {
  std::mt19937_64 g(2);
  const ForestModel m = testmodels::random_model(5, 4, g);
  SeededRng rng(1);
  const SampleMatrix s = sample(m, 300, rng);
  for (bool header : {false, true}) {
    const fs::path p = scratch(header ? "with_header.csv" : "plain.csv");
    write_samples(p, s, header);
    CHECK(read_samples(p, {header, s.r()}) == s);
  }
  std::ostringstream os;
  write_samples_csv(os, SampleMatrix(1, 3, 2, std::vector<Symbol>{1, 0, 1}), true);
  CHECK(os.str() == "x0,x1,x2\n1,0,1\n");
}

TEST_CASE("ranking CSV") {
  const std::vector<Symbol> rows{0, 0, 1, 1, 1, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1};
  const SampleMatrix s(4, 4, 2, rows);
  const LearnedModel lm = prune_ranking(s, chow_liu(s), 0.2);
  std::ostringstream os;
  write_ranking_csv(os, lm);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "rank,i,j,mi_nats,kept");
  int rows_seen = 0, kept = 0;
  while (std::getline(in, line)) {
    ++rows_seen;
    kept += line.back() == '1';
    CHECK(line.starts_with(std::to_string(rows_seen) + ","));
  }
  CHECK(rows_seen == 3);
  CHECK(kept == lm.k_hat);
}

TEST_CASE("text helpers create directories") {
  const fs::path p = scratch("nested/a/b/file.txt");
  fs::remove_all(scratch("nested"));
  write_text(p, "hello");
  CHECK(read_text(p) == "hello");
  CHECK_THROWS_AS(read_text(scratch("nested/none.txt")), IoError);
}

TEST_SUITE_END();
