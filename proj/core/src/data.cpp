/*
 * Copyright 2026 The clustersim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "clustersim/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace clustersim::data {

namespace {

std::string lower(std::string_view s) {
  std::string r(s);
  for (char& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return r;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint64_t parse_uint(std::string_view tok, const char* what, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
  return v;
}

double parse_real(std::string_view tok, std::size_t line) {
  // from_chars for double is missing in older libstdc++; strtod is locale-bound
  // but the classic locale is the only one this program runs under.
  std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) throw ParseError("invalid value '" + s + "'", line);
  return v;
}

}  // namespace

void CooMatrix::canonicalize() {
  std::stable_sort(entries.begin(), entries.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<CooEntry> out;
  out.reserve(entries.size());
  for (const CooEntry& e : entries) {
    if (!out.empty() && out.back().row == e.row && out.back().col == e.col) {
      out.back().value += e.value;
    } else {
      out.push_back(e);
    }
  }
  entries = std::move(out);
}

CooMatrix parse_matrix_market(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw ParseError("empty input", 0);
  const auto header = split_ws(line);
  if (header.empty() || lower(header[0]) != "%%matrixmarket") throw ParseError("missing %%MatrixMarket banner", 1);
  if (header.size() != 5) throw ParseError("banner must have 5 fields", 1);
  if (lower(header[1]) != "matrix") throw ParseError("unsupported object '" + std::string(header[1]) + "'", 1);
  if (lower(header[2]) != "coordinate")
    throw ParseError("unsupported format '" + std::string(header[2]) + "' (only coordinate)", 1);
  const std::string field = lower(header[3]);
  if (field != "real" && field != "integer" && field != "pattern")
    throw ParseError("unsupported field '" + std::string(header[3]) + "'", 1);
  const std::string symmetry = lower(header[4]);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("unsupported symmetry '" + std::string(header[4]) + "'", 1);
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  std::vector<std::string_view> toks;
  while (true) {
    if (!next_line(line)) throw ParseError("missing size line", line_no);
    toks = split_ws(line);
    if (!toks.empty() && toks[0].front() != '%') break;
  }
  if (toks.size() != 3) throw ParseError("size line must be 'rows cols nnz'", line_no);
  CooMatrix m;
  const std::uint64_t rows = parse_uint(toks[0], "row count", line_no);
  const std::uint64_t cols = parse_uint(toks[1], "column count", line_no);
  const std::uint64_t nnz = parse_uint(toks[2], "entry count", line_no);
  if (rows > 0xffffffffULL || cols > 0xffffffffULL) throw ParseError("dimensions exceed 32 bits", line_no);
  if (symmetric && rows != cols) throw ParseError("symmetric matrix must be square", line_no);
  m.rows = static_cast<std::uint32_t>(rows);
  m.cols = static_cast<std::uint32_t>(cols);
  m.entries.reserve(symmetric ? 2 * nnz : nnz);

  std::uint64_t seen = 0;
  while (next_line(line)) {
    toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '%') continue;
    if (seen == nnz) throw ParseError("more entries than the header declares (" + std::to_string(nnz) + ")", line_no);
    const std::size_t want = pattern ? 2 : 3;
    if (toks.size() != want)
      throw ParseError("expected " + std::to_string(want) + " fields, got " + std::to_string(toks.size()), line_no);
    const std::uint64_t r = parse_uint(toks[0], "row index", line_no);
    const std::uint64_t c = parse_uint(toks[1], "column index", line_no);
    if (r < 1 || r > rows || c < 1 || c > cols) throw ParseError("index out of range", line_no);
    const double v = pattern ? 1.0 : parse_real(toks[2], line_no);
    const auto r0 = static_cast<std::uint32_t>(r - 1);
    const auto c0 = static_cast<std::uint32_t>(c - 1);
    m.entries.push_back({r0, c0, v});
    if (symmetric && r0 != c0) m.entries.push_back({c0, r0, v});
    ++seen;
  }
  if (seen != nnz)
    throw ParseError("header declares " + std::to_string(nnz) + " entries, found " + std::to_string(seen),
                     line_no);
  m.canonicalize();
  return m;
}

CooMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_matrix_market(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

std::string write_matrix_market(const CooMatrix& m) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(m.rows) + " " + std::to_string(m.cols) + " " + std::to_string(m.entries.size()) + "\n";
  char buf[64];
  for (const CooEntry& e : m.entries) {
    std::snprintf(buf, sizeof buf, "%.17g", e.value);
    out += std::to_string(e.row + 1) + " " + std::to_string(e.col + 1) + " " + buf + "\n";
  }
  return out;
}

CooMatrix to_coo(const CsrMatrix& m) {
  CooMatrix c;
  c.rows = m.rows;
  c.cols = m.cols;
  c.entries.reserve(m.nnz());
  for (std::uint32_t r = 0; r < m.rows; ++r)
    for (std::uint32_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
      c.entries.push_back({r, m.col_idx[k], minifloat::decode(m.format, m.values[k])});
  return c;
}

CsrMatrix coo_to_csr(const CooMatrix& input, int index_width, Format format) {
  CooMatrix coo = input;
  coo.canonicalize();
  const int width = index_width == 0 ? min_index_width(coo.cols) : index_width;
  if (width != 8 && width != 16 && width != 32) throw ConfigError("index width must be 8, 16 or 32");
  const std::uint64_t max_index = width == 32 ? 0xffffffffULL : (1ULL << width) - 1;
  CsrMatrix m;
  m.rows = coo.rows;
  m.cols = coo.cols;
  m.format = format;
  m.index_width = width;
  m.row_ptr.assign(static_cast<std::size_t>(coo.rows) + 1, 0);
  m.col_idx.reserve(coo.entries.size());
  m.values.reserve(coo.entries.size());
  for (const CooEntry& e : coo.entries) {
    if (e.row >= coo.rows || e.col >= coo.cols) throw ConfigError("coo entry outside the matrix");
    if (e.col > max_index) {
      throw ConfigError("column index " + std::to_string(e.col) + " does not fit " + std::to_string(width) +
                        "-bit indices; use a wider index type");
    }
    ++m.row_ptr[e.row + 1];
    m.col_idx.push_back(e.col);
    m.values.push_back(minifloat::encode(format, e.value).raw());
  }
  for (std::uint32_t r = 0; r < coo.rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  m.validate();
  return m;
}

CsrMatrix gen_random_sparse(std::uint32_t rows, std::uint32_t cols, double density, std::uint64_t seed,
                            Format format, int index_width) {
  if (!(density > 0.0 && density <= 1.0)) throw ConfigError("density must be in (0, 1]");
  std::mt19937_64 pattern_rng(seed);
  std::mt19937_64 value_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.format = format;
  m.index_width = index_width == 0 ? min_index_width(cols) : index_width;
  m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      const double u = static_cast<double>(pattern_rng() >> 11) * 0x1p-53;
      if (u < density) {
        m.col_idx.push_back(c);
        m.values.push_back(minifloat::encode(format, uniform_signed(value_rng)).raw());
      }
    }
    m.row_ptr[r + 1] = static_cast<std::uint32_t>(m.col_idx.size());
  }
  m.validate();
  return m;
}

DenseTensor gen_grid(const std::vector<std::size_t>& dims, const GridInit& init, Format format) {
  DenseTensor t(dims, format);
  std::mt19937_64 rng(init.seed);
  for (std::size_t i = 0; i < t.size(); ++i) {
    double v = 0.0;
    switch (init.mode) {
      case GridMode::Constant: v = init.constant; break;
      case GridMode::Ramp: v = static_cast<double>(i); break;
      case GridMode::Random: v = uniform_signed(rng); break;
    }
    t.data[i] = minifloat::encode(format, v).raw();
  }
  return t;
}

}  // namespace clustersim::data
