#include "clthres/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace clthres {
namespace {

using nlohmann::json;

json table_json(const PairwiseDist& p) {
  json rows = json::array();
  for (int x = 0; x < p.r(); ++x) {
    json row = json::array();
    for (int y = 0; y < p.r(); ++y) row.push_back(p(x, y));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> flat_table(const json& rows, int r, const std::string& what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != r) {
    throw IoError(what + ": expected " + std::to_string(r) + " rows");
  }
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(r) * r);
  for (const json& row : rows) {
    if (!row.is_array() || static_cast<int>(row.size()) != r) {
      throw IoError(what + ": expected " + std::to_string(r) + " entries per row");
    }
    for (const json& v : row) {
      if (!v.is_number()) throw IoError(what + ": non-numeric entry");
      t.push_back(v.get<double>());
    }
  }
  return t;
}

json parse(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string(what) + ": " + e.what());
  }
}

int get_int(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw IoError(std::string("model json: missing integer field '") + key + "'");
  }
  return doc[key].get<int>();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string model_to_json(const ForestModel& m) {
  json doc;
  doc["d"] = m.d();
  doc["r"] = m.r();
  json edges = json::array();
  for (const Edge& e : m.edges()) edges.push_back({e.u, e.v});
  doc["edges"] = std::move(edges);
  json nodes = json::array();
  for (const NodeDist& p : m.node_marginals()) {
    nodes.push_back(std::vector<double>(p.probs().begin(), p.probs().end()));
  }
  doc["node_marginals"] = std::move(nodes);
  json pairs = json::object();
  for (const auto& [e, p] : m.edge_marginals()) {
    pairs[std::to_string(e.u) + "-" + std::to_string(e.v)] = table_json(p);
  }
  doc["edge_marginals"] = std::move(pairs);
  return doc.dump(2) + "\n";
}

ForestModel model_from_json(std::string_view text) {
  const json doc = parse(text, "model json");
  if (!doc.is_object()) throw IoError("model json: top level must be an object");
  const int d = get_int(doc, "d");
  const int r = get_int(doc, "r");
  if (d < 1 || r < 2 || r > kMaxAlphabet) throw IoError("model json: d or r out of range");

  EdgeList edges;
  const json& je = doc.value("edges", json::array());
  if (!je.is_array()) throw IoError("model json: 'edges' must be an array");
  for (const json& e : je) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw IoError("model json: every edge must be a pair of integers");
    }
    const int a = e[0].get<int>();
    const int b = e[1].get<int>();
    if (a < 0 || b < 0 || a >= d || b >= d) throw IoError("model json: edge endpoint out of range");
    edges.emplace_back(a, b);
  }

  const json& jn = doc.value("node_marginals", json());
  if (!jn.is_array() || static_cast<int>(jn.size()) != d) {
    throw IoError("model json: 'node_marginals' must hold d arrays");
  }
  std::vector<NodeDist> nodes;
  nodes.reserve(d);
  for (const json& p : jn) {
    if (!p.is_array()) throw IoError("model json: node marginal must be an array");
    std::vector<double> v;
    for (const json& x : p) {
      if (!x.is_number()) throw IoError("model json: non-numeric node probability");
      v.push_back(x.get<double>());
    }
    nodes.emplace_back(std::move(v));
  }

  std::map<Edge, PairwiseDist> pairs;
  const json& jp = doc.value("edge_marginals", json::object());
  if (!jp.is_object()) throw IoError("model json: 'edge_marginals' must be an object");
  for (const Edge& e : edges) {
    const std::string key = std::to_string(e.u) + "-" + std::to_string(e.v);
    if (!jp.contains(key)) throw IoError("model json: missing edge marginal '" + key + "'");
    pairs.emplace(e, PairwiseDist(r, flat_table(jp[key], r, "model json: edge " + key)));
  }
  if (jp.size() != edges.size()) throw IoError("model json: edge_marginals has entries without edges");
  return ForestModel(d, r, std::move(edges), std::move(nodes), std::move(pairs));
}

void write_model(const std::filesystem::path& path, const ForestModel& m) {
  write_text(path, model_to_json(m));
}

ForestModel read_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_text(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string pairwise_to_json(const PairwiseDist& p) {
  json doc;
  doc["r"] = p.r();
  doc["table"] = table_json(p);
  return doc.dump(2) + "\n";
}

PairwiseDist pairwise_from_json(std::string_view text) {
  const json doc = parse(text, "pairwise json");
  const json& rows = doc.is_object() ? doc.value("table", json()) : doc;
  if (!rows.is_array() || rows.empty()) throw IoError("pairwise json: expected a square table");
  const int r = static_cast<int>(rows.size());
  if (doc.is_object() && doc.contains("r") && doc["r"] != r) {
    throw IoError("pairwise json: 'r' disagrees with the table size");
  }
  return PairwiseDist(r, flat_table(rows, r, "pairwise json"));
}

PairwiseDist read_pairwise(const std::filesystem::path& path) {
  try {
    return pairwise_from_json(read_text(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

SampleMatrix read_samples_csv(std::istream& in, const SamplesCsvOptions& opts, std::string_view source) {
  const std::string src(source);
  std::vector<Symbol> data;
  int d = -1;
  int n = 0;
  int max_symbol = 0;
  int line_no = 0;
  int blank_line = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (opts.header && line_no == 1) continue;
    if (body.empty()) {
      if (blank_line == 0) blank_line = line_no;
      continue;
    }
    if (blank_line != 0) throw IoError(src + ":" + std::to_string(blank_line) + ": empty line inside data");
    int col = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = body.find(',', start);
      const std::string_view cell =
          trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      ++col;
      int value = -1;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || value < 0 ||
          value >= kMaxAlphabet) {
        throw IoError(src + ":" + std::to_string(line_no) + ":" + std::to_string(col) +
                      ": expected a symbol in [0, " + std::to_string(kMaxAlphabet - 1) + "], got '" +
                      std::string(cell) + "'");
      }
      if (opts.r && value >= *opts.r) {
        throw IoError(src + ":" + std::to_string(line_no) + ":" + std::to_string(col) + ": symbol " +
                      std::to_string(value) + " is not below r = " + std::to_string(*opts.r));
      }
      max_symbol = std::max(max_symbol, value);
      data.push_back(static_cast<Symbol>(value));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (d < 0) d = col;
    if (col != d) {
      throw IoError(src + ":" + std::to_string(line_no) + ": expected " + std::to_string(d) +
                    " columns, found " + std::to_string(col));
    }
    ++n;
  }
  if (n == 0) throw IoError(src + ": no samples");
  if (d < 2) throw IoError(src + ": need at least two columns");
  const int r = opts.r.value_or(std::max(2, max_symbol + 1));
  return SampleMatrix(n, d, r, data);
}

SampleMatrix read_samples(const std::filesystem::path& path, const SamplesCsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  return read_samples_csv(in, opts, path.string());
}

void write_samples_csv(std::ostream& out, const SampleMatrix& s, bool header) {
  if (header) {
    for (int j = 0; j < s.d(); ++j) out << (j ? ",x" : "x") << j;
    out << '\n';
  }
  std::string line;
  for (int i = 0; i < s.n(); ++i) {
    line.clear();
    for (int j = 0; j < s.d(); ++j) {
      if (j) line += ',';
      line += std::to_string(s(i, j));
    }
    line += '\n';
    out << line;
  }
}

void write_samples(const std::filesystem::path& path, const SampleMatrix& s, bool header) {
  std::ostringstream os;
  write_samples_csv(os, s, header);
  write_text(path, os.str());
}

void write_ranking_csv(std::ostream& out, const LearnedModel& learned) {
  out << "rank,i,j,mi_nats,kept\n";
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < learned.ranking.edges.size(); ++k) {
    const Edge& e = learned.ranking.edges[k];
    out << k + 1 << ',' << e.u << ',' << e.v << ',' << learned.ranking.scores[k] << ','
        << (static_cast<int>(k) < learned.k_hat ? 1 : 0) << '\n';
  }
  out.precision(old);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError(path.string() + ": read failed");
  return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace clthres
