#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "missem/error.hpp"
#include "missem/impute.hpp"
#include "missem/model_spec.hpp"
#include "missem/pattern.hpp"

namespace missem {

struct IngestOptions {
  std::string missing_marker = "NA";
  bool empty_is_missing = true;
};

// Everything observed about one realized missingness pattern: how often it
// occurred and the frequencies of its observed value tuples.
struct PatternStats {
  MissingnessPattern pattern;
  std::size_t count = 0;
  double frequency = 0.0;  // empirical p(r)
  // observed value tuples (labels of observed coordinates, in coordinate
  // order) with counts; deterministic lexicographic order
  std::vector<std::pair<std::vector<std::string>, std::size_t>> observed_counts;
};

// Summary of an incomplete dataset: realized patterns with empirical
// frequencies, per-pattern observed-value tables, and the partial-order
// structure of the realized patterns.
struct IngestSummary {
  std::size_t n_rows = 0;
  std::vector<std::string> columns;
  std::vector<PatternStats> patterns;  // observed-count desc, then bit-string desc
  std::vector<std::pair<std::size_t, std::size_t>> lattice;  // cover edges (indices)
  bool monotone_chain = false;  // realized patterns totally ordered under <=_p

  std::optional<std::size_t> index_of(const MissingnessPattern& r) const {
    for (std::size_t i = 0; i < patterns.size(); ++i)
      if (patterns[i].pattern == r) return i;
    return std::nullopt;
  }
};

namespace detail {

// One line of CSV; handles quoted fields with embedded commas and doubled
// quotes. No embedded newlines.
inline std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

// Reads a rectangular CSV with a header row, extracts the per-row missingness
// pattern (1 = cell present), and summarizes. When a model is supplied, cell
// values must belong to the declared domains and the column count must match.
inline IngestSummary ingest_csv(std::istream& in, const IngestOptions& opt = {},
                                const ModelDocument* model = nullptr) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing header row");
  IngestSummary summary;
  summary.columns = detail::split_csv(detail::strip_cr(line), 1);
  const std::size_t d = summary.columns.size();
  if (d == 0) throw ParseError("line 1: empty header");
  if (model && model->space.dim() != d) {
    throw ParseError("header has " + std::to_string(d) + " columns; the model declares " +
                     std::to_string(model->space.dim()) + " variables");
  }

  struct Bucket {
    std::size_t count = 0;
    std::map<std::vector<std::string>, std::size_t> observed;
  };
  std::map<MissingnessPattern, Bucket> buckets;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;  // trailing newline
    auto cells = detail::split_csv(line, line_no);
    if (cells.size() != d) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(d) +
                       " fields, got " + std::to_string(cells.size()));
    }
    std::vector<std::uint8_t> bits(d, 0);
    std::vector<std::string> observed;
    for (std::size_t i = 0; i < d; ++i) {
      const bool missing =
          cells[i] == opt.missing_marker || (opt.empty_is_missing && cells[i].empty());
      if (missing) continue;
      if (model && !model->space.domain(i).index_of(cells[i])) {
        throw ParseError("line " + std::to_string(line_no) + ", column \"" + summary.columns[i] +
                         "\": value \"" + cells[i] + "\" is not in the declared domain");
      }
      bits[i] = 1;
      observed.push_back(cells[i]);
    }
    auto& b = buckets[MissingnessPattern(std::move(bits))];
    b.count++;
    b.observed[observed]++;
    summary.n_rows++;
  }

  // canonical, permutation-stable order: most-observed patterns first
  std::vector<MissingnessPattern> order;
  for (const auto& [r, b] : buckets) order.push_back(r);
  std::sort(order.begin(), order.end(), [](const MissingnessPattern& a, const MissingnessPattern& b) {
    if (a.observed_count() != b.observed_count()) return a.observed_count() > b.observed_count();
    return a.to_string() > b.to_string();
  });

  for (const auto& r : order) {
    const auto& b = buckets.at(r);
    summary.patterns.push_back(PatternStats{
        r, b.count, static_cast<double>(b.count) / static_cast<double>(summary.n_rows),
        {b.observed.begin(), b.observed.end()}});
  }

  if (!summary.patterns.empty()) {
    std::vector<MissingnessPattern> ps;
    for (const auto& st : summary.patterns) ps.push_back(st.pattern);
    summary.lattice = lattice_edges(PatternSet(ps));
    summary.monotone_chain = true;
    for (std::size_t i = 0; i < ps.size() && summary.monotone_chain; ++i) {
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        if (!leq_p(ps[i], ps[j]) && !leq_p(ps[j], ps[i])) {
          summary.monotone_chain = false;
          break;
        }
      }
    }
  }
  return summary;
}

inline IngestSummary ingest_csv_file(const std::string& path, const IngestOptions& opt = {},
                                     const ModelDocument* model = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file \"" + path + "\"");
  try {
    return ingest_csv(in, opt, model);
  } catch (const ParseError& ex) {
    throw ParseError(path + ": " + ex.what());
  }
}

// Reads the first data row of an incomplete CSV as a realized unit: observed
// cells give y~ on the observed coordinates (missing coordinates are filled
// with the first domain value; only the observed part is ever consumed), the
// presence map gives r~. The pattern must belong to the model.
inline RealizedData read_realized_row(const std::string& path, const IngestOptions& opt,
                                      const ModelDocument& model) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file \"" + path + "\"");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": missing header row");
  auto header = detail::split_csv(detail::strip_cr(line), 1);
  const std::size_t d = model.space.dim();
  if (header.size() != d) {
    throw ParseError(path + ": header has " + std::to_string(header.size()) +
                     " columns; the model declares " + std::to_string(d));
  }
  if (!std::getline(in, line)) throw ParseError(path + ": no data row to impute");
  auto cells = detail::split_csv(detail::strip_cr(line), 2);
  if (cells.size() != d) {
    throw ParseError(path + ": line 2: expected " + std::to_string(d) + " fields, got " +
                     std::to_string(cells.size()));
  }
  std::vector<std::uint8_t> bits(d, 0);
  Outcome y;
  y.values.assign(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    const bool missing =
        cells[i] == opt.missing_marker || (opt.empty_is_missing && cells[i].empty());
    if (missing) continue;
    auto vi = model.space.domain(i).index_of(cells[i]);
    if (!vi) {
      throw ParseError(path + ": line 2, column \"" + header[i] + "\": value \"" + cells[i] +
                       "\" is not in the declared domain");
    }
    bits[i] = 1;
    y.values[i] = *vi;
  }
  MissingnessPattern r(std::move(bits));
  if (!model.space.patterns().contains(r)) {
    throw ParseError(path + ": realized pattern \"" + r.to_string() +
                     "\" is not declared in the model");
  }
  return RealizedData{std::move(y), std::move(r)};
}

}  // namespace missem
