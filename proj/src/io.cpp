#include "ratpcp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace ratpcp {

namespace {

std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view tok, const std::string& path, std::size_t line) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw FormatError(where(path, line) + "cannot parse number '" + std::string(tok) + "'");
  }
  if (!std::isfinite(value)) throw DataError(where(path, line) + "non-finite entry");
  return value;
}

long parse_index(std::string_view tok, const std::string& path, std::size_t line) {
  tok = trim(tok);
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw FormatError(where(path, line) + "cannot parse integer '" + std::string(tok) + "'");
  }
  return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path + ": cannot open file");
  return in;
}

RowMatrix load_matrix_market(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw FormatError(where(path, 1) + "empty file");
  ++lineno;
  std::string banner;
  for (char ch : line) banner.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  auto head = split_ws(banner);
  if (head.size() < 5 || head[0] != "%%matrixmarket" || head[1] != "matrix" || head[2] != "coordinate" ||
      head[3] != "real" || head[4] != "general") {
    throw FormatError(where(path, lineno) + "expected '%%MatrixMarket matrix coordinate real general'");
  }
  long rows = -1, cols = -1, entries = -1;
  std::vector<Triplet> trip;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '%') continue;
    auto tok = split_ws(body);
    if (rows < 0) {
      if (tok.size() != 3) throw FormatError(where(path, lineno) + "expected 'rows cols entries'");
      rows = parse_index(tok[0], path, lineno);
      cols = parse_index(tok[1], path, lineno);
      entries = parse_index(tok[2], path, lineno);
      if (rows <= 0 || cols <= 0 || entries < 0) throw FormatError(where(path, lineno) + "bad size line");
      trip.reserve(static_cast<std::size_t>(entries));
      continue;
    }
    if (tok.size() != 3) throw FormatError(where(path, lineno) + "expected 'row col value'");
    long i = parse_index(tok[0], path, lineno);
    long j = parse_index(tok[1], path, lineno);
    double v = parse_number(tok[2], path, lineno);
    if (i < 1 || i > rows || j < 1 || j > cols) throw FormatError(where(path, lineno) + "index out of range");
    trip.push_back({i - 1, j - 1, v});
  }
  if (rows < 0) throw FormatError(where(path, lineno) + "missing size line");
  if (static_cast<long>(trip.size()) != entries) {
    throw FormatError(where(path, lineno) + "expected " + std::to_string(entries) + " entries, found " +
                      std::to_string(trip.size()));
  }
  return RowMatrix::from_triplets(rows, cols, std::move(trip));
}

RowMatrix load_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (auto tok : split_commas(line)) row.push_back(parse_number(tok, path, lineno));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError(where(path, lineno) + "row has " + std::to_string(row.size()) + " columns, expected " +
                        std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(where(path, lineno + 1) + "empty file");
  DenseMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return RowMatrix::from_dense(m);
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

RowMatrix load_matrix(const std::string& path, MatrixFormat format) {
  if (format == MatrixFormat::automatic) {
    std::ifstream in = open_in(path);
    std::string first;
    std::getline(in, first);
    format = first.rfind("%%MatrixMarket", 0) == 0 ? MatrixFormat::matrix_market : MatrixFormat::csv;
  }
  return format == MatrixFormat::matrix_market ? load_matrix_market(path) : load_matrix_csv(path);
}

void save_matrix_csv(const RowMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path + ": cannot write file");
  DenseMatrix m = a.to_dense();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void save_matrix_market(const RowMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path + ": cannot write file");
  auto trip = a.triplets();
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << trip.size() << '\n';
  for (const auto& t : trip) out << t.row + 1 << ' ' << t.col + 1 << ' ' << format_double(t.value) << '\n';
}

Vector load_vector(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto tok = split_commas(line);
    if (tok.size() != 1) throw FormatError(where(path, lineno) + "expected a single column");
    values.push_back(parse_number(tok[0], path, lineno));
  }
  if (values.empty()) throw FormatError(where(path, lineno + 1) + "empty file");
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

void save_vector(const Vector& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path + ": cannot write file");
  for (Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
}

void save_trace(const ConvergenceTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path + ": cannot write file");
  out << kTraceHeader << '\n';
  for (const auto& p : trace.points) {
    out << trace.method << ',' << trace.seed << ',' << p.epoch << ',' << p.vec_products << ','
        << format_double(p.rel_error) << ',' << p.wall_ns << '\n';
  }
}

}  // namespace ratpcp
