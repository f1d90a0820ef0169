#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cdpp/consensus.hpp"
#include "cdpp/data.hpp"
#include "cdpp/error.hpp"

namespace cdpp::csv {

struct ReadOptions {
  bool header = false;
  char delimiter = 0;  // 0: detect among ',', ';' and '\t'
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '"')) s.remove_suffix(1);
  return s;
}

inline char detect_delimiter(const std::string& line) {
  std::size_t best_count = 0;
  char best = ',';
  for (char d : {',', ';', '\t'}) {
    const auto c = static_cast<std::size_t>(std::count(line.begin(), line.end(), d));
    if (c > best_count) {
      best_count = c;
      best = d;
    }
  }
  return best;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

// All non-blank lines, tagged with their 1-based line number.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!blank(line)) out.emplace_back(no, line);
  }
  return out;
}

inline std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) cdpp::detail::fail(ErrorKind::Parse, "cannot open '" + path + "'");
  return in;
}

}  // namespace detail

/// Numeric matrix from delimited text. Any non-numeric cell is fatal and
/// reported with its row and column.
inline DataMatrix read_matrix(std::istream& in, const ReadOptions& opts = {}) {
  auto lines = detail::read_lines(in);
  if (opts.header && !lines.empty()) lines.erase(lines.begin());
  if (lines.empty()) cdpp::detail::fail(ErrorKind::Parse, "no data rows");
  const char delim = opts.delimiter ? opts.delimiter : detail::detect_delimiter(lines.front().second);

  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  for (const auto& [no, line] : lines) {
    const auto cells = detail::split(line, delim);
    if (rows.empty()) width = cells.size();
    if (cells.size() != width) {
      cdpp::detail::fail(ErrorKind::Parse, "line " + std::to_string(no) + " has " + std::to_string(cells.size()) +
                                               " fields, expected " + std::to_string(width));
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      const auto cell = cells[c];
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), row[c]);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        cdpp::detail::fail(ErrorKind::Parse, "non-numeric cell '" + std::string(cell) + "' at line " +
                                                 std::to_string(no) + ", column " + std::to_string(c + 1));
      }
    }
    rows.push_back(std::move(row));
  }
  RowMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return DataMatrix(std::move(x));
}

inline DataMatrix read_matrix(const std::string& path, const ReadOptions& opts = {}) {
  auto in = detail::open(path);
  return read_matrix(in, opts);
}

/// Ground-truth labels from the first column; arbitrary tokens are mapped to
/// integer ids in order of first appearance.
inline std::vector<int> read_labels(std::istream& in, const ReadOptions& opts = {}) {
  auto lines = detail::read_lines(in);
  if (opts.header && !lines.empty()) lines.erase(lines.begin());
  if (lines.empty()) cdpp::detail::fail(ErrorKind::Parse, "no label rows");
  const char delim = opts.delimiter ? opts.delimiter : detail::detect_delimiter(lines.front().second);
  std::map<std::string, int> ids;
  std::vector<int> out;
  out.reserve(lines.size());
  for (const auto& [no, line] : lines) {
    const std::string token(detail::split(line, delim).front());
    if (token.empty()) cdpp::detail::fail(ErrorKind::Parse, "empty label at line " + std::to_string(no));
    out.push_back(ids.try_emplace(token, static_cast<int>(ids.size())).first->second);
  }
  return out;
}

inline std::vector<int> read_labels(const std::string& path, const ReadOptions& opts = {}) {
  auto in = detail::open(path);
  return read_labels(in, opts);
}

inline void write_matrix(std::ostream& out, const RowMatrix& x, int precision = 17) {
  out << std::setprecision(precision);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c) out << ',';
      out << x(r, c);
    }
    out << '\n';
  }
}

inline void write_labels(std::ostream& out, const std::vector<int>& labels) {
  for (int l : labels) out << l << '\n';
}

/// Dense row-major consensus matrix, six significant digits.
inline void write_consensus(std::ostream& out, const ConsensusMatrix& c) {
  out << std::setprecision(6);
  const Matrix& e = c.entries();
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    for (Eigen::Index col = 0; col < e.cols(); ++col) {
      if (col) out << ',';
      out << e(r, col);
    }
    out << '\n';
  }
}

}  // namespace cdpp::csv
