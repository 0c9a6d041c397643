/* Copyright 2026 The qrcert Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "qrcert/cli/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "qrcert/errors.hpp"
#include "qrcert/lll_cert.hpp"

namespace qrcert::cli {

namespace {

bool is_integer_literal(std::string_view t) {
  std::size_t i = (!t.empty() && (t[0] == '+' || t[0] == '-')) ? 1 : 0;
  if (i == t.size()) return false;
  for (; i < t.size(); ++i)
    if (t[i] < '0' || t[i] > '9') return false;
  return true;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, std::size_t line) {
  double x = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last) fail(line, "invalid number '" + tok + "'");
  if (!std::isfinite(x)) fail(line, "non-finite entry '" + tok + "'");
  return x;
}

}  // namespace

IntervalMatrix MatrixFile::enclosure() const {
  return integer_mode ? ingest_interval(ints) : IntervalMatrix::point(floats);
}

FloatMatrix MatrixFile::nearest() const { return integer_mode ? ints.to_nearest() : floats; }

MatrixFile parse_matrix(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t rows = 0, cols = 0;
  bool have_header = false;
  std::vector<std::string> tokens;
  std::vector<std::size_t> token_lines;

  while (std::getline(in, line)) {
    ++lineno;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> here;
    for (std::string t; ls >> t;) here.push_back(t);
    if (!have_header) {
      if (here.size() != 2 || !is_integer_literal(here[0]) || !is_integer_literal(here[1]) ||
          here[0][0] == '-' || here[1][0] == '-')
        fail(lineno, "expected header 'rows cols'");
      rows = std::stoul(here[0]);
      cols = std::stoul(here[1]);
      if (rows == 0 || cols == 0 || rows > 100000 || cols > 100000)
        fail(lineno, "unsupported matrix size");
      have_header = true;
      continue;
    }
    if (here.size() != cols)
      fail(lineno, "expected " + std::to_string(cols) + " entries, found " +
                       std::to_string(here.size()));
    for (auto& t : here) {
      tokens.push_back(std::move(t));
      token_lines.push_back(lineno);
    }
    if (tokens.size() > rows * cols) fail(lineno, "more rows than declared");
  }
  if (!have_header) fail(lineno + 1, "unexpected end of file, no header");
  if (tokens.size() != rows * cols)
    fail(lineno + 1, "unexpected end of file, expected " + std::to_string(rows) + " rows, found " +
                         std::to_string(tokens.size() / cols));

  MatrixFile f;
  f.integer_mode = true;
  for (const auto& t : tokens) f.integer_mode = f.integer_mode && is_integer_literal(t);
  if (f.integer_mode) {
    f.ints = BigIntMatrix(rows, cols);
    for (std::size_t e = 0; e < tokens.size(); ++e) {
      const std::string& t = tokens[e];
      f.ints(e / cols, e % cols) = mpz_class(t[0] == '+' ? t.substr(1) : t, 10);
    }
  } else {
    std::vector<double> v(tokens.size());
    for (std::size_t e = 0; e < tokens.size(); ++e) v[e] = parse_double(tokens[e], token_lines[e]);
    f.floats = FloatMatrix(rows, cols, std::move(v));
  }
  return f;
}

MatrixFile parse_matrix(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_matrix(in);
}

MatrixFile read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_matrix(in);
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

namespace {

template <class Cell>
std::string write(std::size_t rows, std::size_t cols, std::string_view comment, Cell cell) {
  std::ostringstream os;
  if (!comment.empty()) {
    std::istringstream cs{std::string(comment)};
    for (std::string l; std::getline(cs, l);) os << "# " << l << '\n';
  }
  os << rows << ' ' << cols << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) os << (j ? " " : "") << cell(i, j);
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::string serialize(const BigIntMatrix& a, std::string_view comment) {
  return write(a.rows(), a.cols(), comment, [&](std::size_t i, std::size_t j) { return a(i, j).get_str(); });
}

std::string serialize(const FloatMatrix& a, std::string_view comment) {
  return write(a.rows(), a.cols(), comment, [&](std::size_t i, std::size_t j) {
    std::string s = format_double(a(i, j));
    // Keep float files in float mode even when every value is integral.
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  });
}

std::string serialize(const MatrixFile& f, std::string_view comment) {
  return f.integer_mode ? serialize(f.ints, comment) : serialize(f.floats, comment);
}

}  // namespace qrcert::cli
