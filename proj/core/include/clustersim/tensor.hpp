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

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "clustersim/minifloat.hpp"

namespace clustersim {

using minifloat::Format;

/// Compressed sparse row matrix. Values are raw encodings in `format`;
/// `index_width` is the storage width of col_idx in the scratchpad.
struct CsrMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  int index_width = 32;
  Format format = Format::FP64;
  std::vector<std::uint32_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<std::uint64_t> values;

  std::size_t nnz() const { return col_idx.size(); }
  std::uint32_t row_nnz(std::uint32_t r) const { return row_ptr[r + 1] - row_ptr[r]; }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;

  /// The transpose, i.e. the CSC view of this matrix stored as CSR.
  CsrMatrix transposed() const;
  /// Values converted (rounded) to another format.
  CsrMatrix converted(Format to) const;

  static CsrMatrix identity(std::uint32_t n, Format f = Format::FP64, int index_width = 32);

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;
};

/// Smallest of 8/16/32 bits able to hold every column index of a matrix with
/// `cols` columns.
int min_index_width(std::uint32_t cols);

/// Row-major dense tensor of 1 to 3 dimensions.
struct DenseTensor {
  std::vector<std::size_t> dims;
  Format format = Format::FP64;
  std::vector<std::uint64_t> data;

  DenseTensor() = default;
  DenseTensor(std::vector<std::size_t> dims, Format f);

  std::size_t size() const { return data.size(); }
  std::uint64_t& at(std::size_t i, std::size_t j) { return data[i * dims[1] + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const { return data[i * dims[1] + j]; }
  std::uint64_t& at(std::size_t z, std::size_t y, std::size_t x) { return data[(z * dims[1] + y) * dims[2] + x]; }
  std::uint64_t at(std::size_t z, std::size_t y, std::size_t x) const {
    return data[(z * dims[1] + y) * dims[2] + x];
  }
  DenseTensor converted(Format to) const;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;
};

}  // namespace clustersim
