#include "nmfc/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nmfc/errors.hpp"

namespace nmfc {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

bool parse_long(std::string_view token, long long& out) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Reads the next line that is neither blank nor a '%' comment.
bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    return true;
  }
  return false;
}

}  // namespace

Matrix parse_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty MatrixMarket input", 1);
  ++line_no;
  const auto header = split_ws(line);
  if (header.size() != 5 || lower(header[0]) != "%%matrixmarket" || lower(header[1]) != "matrix") {
    throw ParseError("malformed MatrixMarket header", line_no);
  }
  const std::string format = lower(header[2]);
  const std::string field = lower(header[3]);
  const std::string symmetry = lower(header[4]);
  if ((format != "coordinate" && format != "array") || field != "real" || symmetry != "general") {
    throw ParseError("unsupported MatrixMarket type '" + format + " " + field + " " +
                         symmetry + "' (expected coordinate|array real general)",
                     line_no);
  }
  const bool coordinate = format == "coordinate";

  if (!next_content_line(in, line, line_no)) throw ParseError("missing size line", line_no + 1);
  const auto size_tokens = split_ws(line);
  long long rows = 0, cols = 0, nnz = 0;
  if (size_tokens.size() != (coordinate ? 3U : 2U) || !parse_long(size_tokens[0], rows) ||
      !parse_long(size_tokens[1], cols) || (coordinate && !parse_long(size_tokens[2], nnz))) {
    throw ParseError("malformed size line", line_no);
  }
  if (rows < 1 || cols < 1 || nnz < 0) {
    throw ParseError("dimensions must be positive", line_no);
  }

  Matrix m = Matrix::Zero(rows, cols);
  if (coordinate) {
    for (long long e = 0; e < nnz; ++e) {
      if (!next_content_line(in, line, line_no)) {
        throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(e),
                         line_no + 1);
      }
      const auto tok = split_ws(line);
      long long i = 0, j = 0;
      double v = 0.0;
      if (tok.size() != 3 || !parse_long(tok[0], i) || !parse_long(tok[1], j) ||
          !parse_double(tok[2], v)) {
        throw ParseError("malformed coordinate entry", line_no);
      }
      if (i < 1 || i > rows || j < 1 || j > cols) {
        throw ParseError("index (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") outside " + std::to_string(rows) + "x" + std::to_string(cols),
                         line_no);
      }
      m(i - 1, j - 1) += v;
    }
  } else {
    long long filled = 0;
    const long long total = rows * cols;
    while (filled < total) {
      if (!next_content_line(in, line, line_no)) {
        throw ParseError("expected " + std::to_string(total) + " values, found " +
                             std::to_string(filled),
                         line_no + 1);
      }
      for (auto tok : split_ws(line)) {
        double v = 0.0;
        if (filled >= total || !parse_double(tok, v)) {
          throw ParseError("malformed array value", line_no);
        }
        m(filled % rows, filled / rows) = v;
        ++filled;
      }
    }
  }
  if (next_content_line(in, line, line_no)) {
    throw ParseError("unexpected trailing data", line_no);
  }
  return m;
}

Matrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_matrix_market(in);
}

void format_matrix_market(std::ostream& out, const Matrix& m) {
  const Eigen::Index total = m.size();
  const Eigen::Index nnz = (m.array() != 0.0).count();
  if (2 * nnz < total) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (m(i, j) != 0.0) out << (i + 1) << ' ' << (j + 1) << ' ' << format_double(m(i, j)) << '\n';
      }
    }
  } else {
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) out << format_double(m(i, j)) << '\n';
    }
  }
}

void write_matrix_market(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_output(path);
  format_matrix_market(out, m);
  finish_output(out, path);
}

Matrix parse_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t blank_run = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) {
      ++blank_run;
      continue;
    }
    if (blank_run > 0 && !rows.empty()) throw ParseError("blank line inside CSV data", line_no - 1);
    blank_run = 0;
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      const auto cell = t.substr(start, comma == std::string_view::npos ? t.npos : comma - start);
      double v = 0.0;
      if (!parse_double(cell, v)) {
        throw ParseError("malformed number '" + std::string(trim(cell)) + "' in row " +
                             std::to_string(line_no),
                         line_no);
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw ParseError("ragged row " + std::to_string(line_no) + ": expected " +
                           std::to_string(rows.front().size()) + " values, got " +
                           std::to_string(values.size()),
                       line_no);
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("empty CSV input", line_no + 1);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_csv_matrix(in);
}

void write_csv_matrix(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_output(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  finish_output(out, path);
}

Partition parse_labels(std::istream& in) {
  std::vector<int> labels;
  std::map<long long, int> dense;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    long long raw = 0;
    if (!parse_long(t, raw)) {
      throw ParseError("label '" + std::string(t) + "' is not an integer", line_no);
    }
    const auto [it, inserted] = dense.try_emplace(raw, static_cast<int>(dense.size()));
    labels.push_back(it->second);
  }
  if (labels.empty()) throw ParseError("labels file is empty", line_no + 1);
  const int k = static_cast<int>(dense.size());
  return Partition(std::move(labels), k);
}

Partition read_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_labels(in);
}

void write_labels(const std::filesystem::path& path, const Partition& partition) {
  auto out = open_output(path);
  for (int label : partition.labels) out << label << '\n';
  finish_output(out, path);
}

Matrix read_matrix(const std::filesystem::path& path) {
  return lower(path.extension().string()) == ".mtx" ? read_matrix_market(path)
                                                    : read_csv_matrix(path);
}

}  // namespace nmfc
