#include "tau2/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace tau2::csv {
namespace {

double parse_token(std::string_view token, const std::string& where) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r')) {
    token.remove_suffix(1);
  }
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(where + "not a number: '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(where + "non-finite value");
  }
  return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

double parse_real(std::string_view token, std::size_t line) {
  return parse_token(token, "line " + std::to_string(line) + ": ");
}

}  // namespace

double parse_real(std::string_view token) { return parse_token(token, ""); }

std::string format_real(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Matrix read_matrix(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_real(rest.substr(0, comma), lineno));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                       " columns, got " + std::to_string(count));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("no data rows");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = values[i * cols + j];
  }
  return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

Vector read_vector(std::istream& in) {
  const Matrix m = read_matrix(in);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ParseError("expected a single row or column, got " + std::to_string(m.rows()) + "x" +
                   std::to_string(m.cols()));
}

Vector read_vector(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_vector(in);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  write_matrix(out, m);
}

void write_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_real(v[i]) << '\n';
}

void write_vector(const std::filesystem::path& path, const Vector& v) {
  auto out = open_out(path);
  write_vector(out, v);
}

}  // namespace tau2::csv
