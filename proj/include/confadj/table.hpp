#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "confadj/error.hpp"

namespace confadj {

// Dense numeric table with row/column labels; rows and columns keep the
// file order.  Orientation (features-by-samples vs samples-by-covariates)
// is the caller's convention.
struct labeled_matrix {
  Eigen::MatrixXd values;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  std::string corner = "id"; // header of the label column

  labeled_matrix transposed() const {
    labeled_matrix t;
    t.values = values.transpose();
    t.row_ids = col_ids;
    t.col_ids = row_ids;
    t.corner = corner;
    return t;
  }
};

namespace detail {

inline char delimiter_for(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".tsv" || ext == ".txt") return '\t';
  if (ext == ".csv") return ',';
  throw error(errc::invalid_argument,
              "cannot infer delimiter from extension of \"" + path +
                  "\" (expected .tsv, .txt, or .csv)");
}

inline std::vector<std::string_view> split_fields(std::string_view line,
                                                  char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view field, double* value) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, *value);
  return res.ec == std::errc() && res.ptr == last;
}

inline void check_duplicates(const std::vector<std::string>& ids,
                             const std::string& path, const char* kind) {
  std::unordered_map<std::string_view, std::size_t> seen;
  seen.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto [it, inserted] = seen.emplace(ids[i], i);
    if (!inserted)
      throw error(errc::parse_failure,
                  std::string(path) + ": duplicate " + kind + " id \"" +
                      ids[i] + "\" at positions " +
                      std::to_string(it->second + 1) + " and " +
                      std::to_string(i + 1));
  }
}

} // namespace detail

// Reads a delimited table: first row = column ids, first column = row ids.
// Parsing is locale-independent (dot decimal separator).
inline labeled_matrix read_matrix(const std::string& path) {
  const char delim = detail::delimiter_for(path);
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_failure, "cannot open \"" + path + "\"");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  labeled_matrix out;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    if (line.empty()) continue; // tolerate trailing blank lines
    ++line_no;
    const auto fields = detail::split_fields(line, delim);
    if (line_no == 1) {
      require(fields.size() >= 2, errc::parse_failure,
              path + ": header must contain at least one column id");
      out.corner = std::string(fields[0]);
      for (std::size_t j = 1; j < fields.size(); ++j)
        out.col_ids.emplace_back(fields[j]);
      continue;
    }
    if (fields.size() != out.col_ids.size() + 1)
      throw error(errc::parse_failure,
                  path + ": row " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(out.col_ids.size() + 1));
    out.row_ids.emplace_back(fields[0]);
    auto& row = rows.emplace_back();
    row.reserve(out.col_ids.size());
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v;
      if (!detail::parse_double(fields[j], &v))
        throw error(errc::parse_failure,
                    path + ": row " + std::to_string(line_no) + " (\"" +
                        std::string(fields[0]) + "\"), column \"" +
                        out.col_ids[j - 1] + "\": cannot parse \"" +
                        std::string(fields[j]) + "\" as a number");
      row.push_back(v);
    }
  }
  require(!rows.empty(), errc::parse_failure, path + ": no data rows");
  detail::check_duplicates(out.row_ids, path, "row");
  detail::check_duplicates(out.col_ids, path, "column");

  out.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(out.col_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return out;
}

// Formats a double with 17 significant digits, enough for exact round-trip.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_matrix(const std::string& path, const labeled_matrix& m) {
  const char delim = detail::delimiter_for(path);
  require(static_cast<std::size_t>(m.values.rows()) == m.row_ids.size() &&
              static_cast<std::size_t>(m.values.cols()) == m.col_ids.size(),
          errc::dimension_mismatch,
          "write_matrix: label lengths disagree with the matrix shape");
  std::ofstream outf(path, std::ios::binary);
  require(outf.good(), errc::io_failure, "cannot write \"" + path + "\"");
  outf << m.corner;
  for (const auto& c : m.col_ids) outf << delim << c;
  outf << '\n';
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    outf << m.row_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.values.cols(); ++j)
      outf << delim << format_double(m.values(i, j));
    outf << '\n';
  }
  require(outf.good(), errc::io_failure, "write failed for \"" + path + "\"");
}

} // namespace confadj
