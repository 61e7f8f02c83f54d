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

#include "clustersim/tensor.hpp"

#include <string>

#include "clustersim/errors.hpp"

namespace clustersim {

void CsrMatrix::validate() const {
  if (index_width != 8 && index_width != 16 && index_width != 32)
    throw ConfigError("csr: index width must be 8, 16 or 32");
  if (row_ptr.size() != static_cast<std::size_t>(rows) + 1) throw ConfigError("csr: row_ptr length != rows + 1");
  if (row_ptr.front() != 0) throw ConfigError("csr: row_ptr[0] != 0");
  if (row_ptr.back() != col_idx.size()) throw ConfigError("csr: row_ptr[rows] != nnz");
  if (values.size() != col_idx.size()) throw ConfigError("csr: values and col_idx lengths differ");
  const std::uint64_t max_index = index_width == 32 ? 0xffffffffULL : (1ULL << index_width) - 1;
  for (std::uint32_t r = 0; r < rows; ++r) {
    if (row_ptr[r + 1] < row_ptr[r]) throw ConfigError("csr: row_ptr decreases at row " + std::to_string(r));
    for (std::uint32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] >= cols) throw ConfigError("csr: column index out of range in row " + std::to_string(r));
      if (col_idx[k] > max_index) throw ConfigError("csr: column index exceeds the index width");
      if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1])
        throw ConfigError("csr: column indices not strictly increasing in row " + std::to_string(r));
    }
  }
  const std::uint64_t mask = minifloat::info(format).mask();
  for (std::uint64_t v : values)
    if ((v & ~mask) != 0) throw ConfigError("csr: value encoding wider than the format");
}

CsrMatrix CsrMatrix::transposed() const {
  CsrMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.format = format;
  t.index_width = min_index_width(rows) > index_width ? min_index_width(rows) : index_width;
  t.row_ptr.assign(static_cast<std::size_t>(cols) + 1, 0);
  for (std::uint32_t c : col_idx) ++t.row_ptr[c + 1];
  for (std::uint32_t c = 0; c < cols; ++c) t.row_ptr[c + 1] += t.row_ptr[c];
  t.col_idx.resize(nnz());
  t.values.resize(nnz());
  std::vector<std::uint32_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const std::uint32_t dst = next[col_idx[k]]++;
      t.col_idx[dst] = r;
      t.values[dst] = values[k];
    }
  }
  return t;
}

CsrMatrix CsrMatrix::converted(Format to) const {
  CsrMatrix c = *this;
  c.format = to;
  for (std::uint64_t& v : c.values) v = minifloat::convert(to, minifloat::Bits(format, v)).raw();
  return c;
}

CsrMatrix CsrMatrix::identity(std::uint32_t n, Format f, int index_width) {
  CsrMatrix m;
  m.rows = n;
  m.cols = n;
  m.format = f;
  m.index_width = index_width;
  m.row_ptr.resize(static_cast<std::size_t>(n) + 1);
  const std::uint64_t one = minifloat::encode(f, 1.0).raw();
  for (std::uint32_t i = 0; i <= n; ++i) m.row_ptr[i] = i;
  m.col_idx.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) m.col_idx[i] = i;
  m.values.assign(n, one);
  m.validate();
  return m;
}

int min_index_width(std::uint32_t cols) {
  if (cols <= 256) return 8;
  if (cols <= 65536) return 16;
  return 32;
}

DenseTensor::DenseTensor(std::vector<std::size_t> d, Format f) : dims(std::move(d)), format(f) {
  if (dims.empty() || dims.size() > 3) throw ConfigError("dense tensor: 1 to 3 dimensions supported");
  std::size_t n = 1;
  for (std::size_t x : dims) {
    if (x == 0) throw ConfigError("dense tensor: dimensions must be positive");
    n *= x;
  }
  data.assign(n, 0);
}

DenseTensor DenseTensor::converted(Format to) const {
  DenseTensor t = *this;
  t.format = to;
  for (std::uint64_t& v : t.data) v = minifloat::convert(to, minifloat::Bits(format, v)).raw();
  return t;
}

}  // namespace clustersim
