#include "clthres/harness/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "clthres/io.hpp"
#include "clthres/rng.hpp"

namespace clthres::harness {
namespace {

struct RawTable {
  std::string source;
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> rows;
  /// 1-based file line of each row, for error messages.
  std::vector<int> lines;
};

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && ws(s[b])) ++b;
  s.erase(0, b);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

RawTable read_table(const std::string& path, bool header, char delim) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  RawTable t;
  t.source = path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, delim);
    if (header && t.names.empty()) {
      t.names = std::move(cells);
      continue;
    }
    const std::size_t width = t.names.empty() ? (t.rows.empty() ? cells.size() : t.rows.front().size())
                                              : t.names.size();
    if (cells.size() != width) {
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                    " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) {
        throw IoError(path + ":" + std::to_string(line_no) + ":" + std::to_string(c + 1) + ": empty cell");
      }
    }
    t.rows.push_back(std::move(cells));
    t.lines.push_back(line_no);
  }
  if (t.rows.empty()) throw IoError(path + ": no data rows");
  if (t.names.empty()) {
    for (std::size_t c = 0; c < t.rows.front().size(); ++c) t.names.push_back("x" + std::to_string(c));
  }
  return t;
}

std::optional<double> to_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

double cell_number(const RawTable& t, std::size_t row, std::size_t col) {
  const auto v = to_number(t.rows[row][col]);
  if (!v) {
    throw IoError(t.source + ":" + std::to_string(t.lines[row]) + ":" + std::to_string(col + 1) +
                  ": cannot parse '" + t.rows[row][col] + "' as a number");
  }
  return *v;
}

SampleMatrix encode(const std::vector<std::vector<Symbol>>& rows, int r) {
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.front().size());
  std::vector<Symbol> flat;
  flat.reserve(static_cast<std::size_t>(n) * d);
  for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
  return SampleMatrix(n, d, r, flat);
}

}  // namespace

ColumnType parse_column_type(const std::string& tag) {
  if (tag == "categorical" || tag == "c") return ColumnType::kCategorical;
  if (tag == "continuous" || tag == "n") return ColumnType::kContinuous;
  throw std::invalid_argument("unknown column type '" + tag + "' (use categorical or continuous)");
}

Dataset load_dataset(const DatasetSpec& spec) {
  const RawTable main = read_table(spec.path, spec.header, spec.delimiter);
  const std::size_t d = main.names.size();
  if (d < 2) throw std::invalid_argument(spec.path + ": need at least two columns");
  std::vector<ColumnType> types = spec.types;
  if (types.empty()) types.assign(d, ColumnType::kCategorical);
  if (types.size() != d) {
    throw std::invalid_argument(spec.path + ": " + std::to_string(types.size()) + " column types for " +
                                std::to_string(d) + " columns");
  }

  // Row assignment.
  const int total = static_cast<int>(main.rows.size());
  std::vector<int> train_rows;
  std::vector<int> test_rows;
  const SplitRule& sp = spec.split;
  switch (sp.kind) {
    case SplitRule::Kind::kRatio: {
      if (!(sp.train_ratio > 0.0 && sp.train_ratio < 1.0)) {
        throw std::invalid_argument("split: train_ratio must lie in (0, 1)");
      }
      std::vector<int> order(total);
      std::iota(order.begin(), order.end(), 0);
      SeededRng rng(sp.seed, 0);
      for (int i = total - 1; i > 0; --i) {
        std::swap(order[i], order[static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(i) + 1))]);
      }
      const int cut = static_cast<int>(std::lround(sp.train_ratio * total));
      train_rows.assign(order.begin(), order.begin() + cut);
      test_rows.assign(order.begin() + cut, order.end());
      std::sort(train_rows.begin(), train_rows.end());
      std::sort(test_rows.begin(), test_rows.end());
      break;
    }
    case SplitRule::Kind::kCount: {
      const int tc = sp.test_count.value_or(total - sp.train_count);
      if (sp.train_count < 1 || tc < 0 || sp.train_count + tc > total) {
        throw std::invalid_argument("split: counts " + std::to_string(sp.train_count) + "+" +
                                    std::to_string(tc) + " do not fit " + std::to_string(total) + " rows");
      }
      for (int i = 0; i < sp.train_count; ++i) train_rows.push_back(i);
      for (int i = sp.train_count; i < sp.train_count + tc; ++i) test_rows.push_back(i);
      break;
    }
    case SplitRule::Kind::kFile:
      train_rows.resize(total);
      std::iota(train_rows.begin(), train_rows.end(), 0);
      break;
  }
  if (train_rows.empty()) throw std::invalid_argument("split: training split is empty");

  std::optional<RawTable> extra;
  if (sp.kind == SplitRule::Kind::kFile) {
    extra = read_table(sp.test_path, spec.header, spec.delimiter);
    if (extra->names.size() != d) {
      throw std::invalid_argument(sp.test_path + ": column count differs from " + spec.path);
    }
  }
  const std::size_t test_n = extra ? extra->rows.size() : test_rows.size();
  if (test_n == 0) throw std::invalid_argument("split: test split is empty");

  EncodingReport report;
  report.train_rows = train_rows;
  report.test_rows = test_rows;
  std::vector<std::vector<Symbol>> train(train_rows.size(), std::vector<Symbol>(d));
  std::vector<std::vector<Symbol>> test(test_n, std::vector<Symbol>(d));
  const auto test_cell = [&](std::size_t i) -> std::pair<const RawTable*, std::size_t> {
    return extra ? std::pair{&*extra, i} : std::pair{&main, static_cast<std::size_t>(test_rows[i])};
  };

  int r = 2;
  for (std::size_t c = 0; c < d; ++c) {
    ColumnEncoding enc;
    enc.name = main.names[c];
    enc.type = types[c];
    if (types[c] == ColumnType::kContinuous) {
      double sum = 0.0;
      for (int row : train_rows) sum += cell_number(main, row, c);
      enc.threshold = sum / static_cast<double>(train_rows.size());
      enc.categories = {"<=" + std::to_string(enc.threshold), ">" + std::to_string(enc.threshold)};
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        train[i][c] = cell_number(main, train_rows[i], c) > enc.threshold ? 1 : 0;
      }
      for (std::size_t i = 0; i < test_n; ++i) {
        const auto [t, row] = test_cell(i);
        test[i][c] = cell_number(*t, row, c) > enc.threshold ? 1 : 0;
      }
    } else {
      std::vector<std::string> values;
      for (int row : train_rows) values.push_back(main.rows[row][c]);
      for (std::size_t i = 0; i < test_n; ++i) {
        const auto [t, row] = test_cell(i);
        values.push_back(t->rows[row][c]);
      }
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      const bool numeric = std::all_of(values.begin(), values.end(),
                                       [](const std::string& v) { return to_number(v).has_value(); });
      if (numeric) {
        std::stable_sort(values.begin(), values.end(), [](const std::string& a, const std::string& b) {
          return *to_number(a) < *to_number(b);
        });
      }
      if (static_cast<int>(values.size()) > kMaxAlphabet) {
        throw std::invalid_argument(spec.path + ": column '" + enc.name + "' has more than " +
                                    std::to_string(kMaxAlphabet) + " categories");
      }
      const auto symbol = [&](const std::string& v) {
        return static_cast<Symbol>(std::lower_bound(values.begin(), values.end(), v,
                                                    [&](const std::string& a, const std::string& b) {
                                                      return numeric ? *to_number(a) < *to_number(b) : a < b;
                                                    }) -
                                   values.begin());
      };
      for (std::size_t i = 0; i < train_rows.size(); ++i) train[i][c] = symbol(main.rows[train_rows[i]][c]);
      for (std::size_t i = 0; i < test_n; ++i) {
        const auto [t, row] = test_cell(i);
        test[i][c] = symbol(t->rows[row][c]);
      }
      r = std::max(r, static_cast<int>(values.size()));
      enc.categories = std::move(values);
    }
    report.columns.push_back(std::move(enc));
  }
  report.r = r;
  return Dataset{encode(train, r), encode(test, r), std::move(report)};
}

}  // namespace clthres::harness
