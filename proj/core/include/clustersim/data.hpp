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

// Operand ingestion and generation: Matrix Market I/O, COO to CSR, random
// sparse matrices and initialized grids.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "clustersim/errors.hpp"
#include "clustersim/tensor.hpp"

namespace clustersim::data {

/// Malformed operand text. Carries the 1-based line number (0 if not tied to
/// a line).
class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : IoError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct CooEntry {
  std::uint32_t row;
  std::uint32_t col;
  double value;

  friend bool operator==(const CooEntry&, const CooEntry&) = default;
};

struct CooMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<CooEntry> entries;

  /// Sorts entries row-major and sums duplicates.
  void canonicalize();
};

/// Coordinate-format Matrix Market (real, integer or pattern; general or
/// symmetric). Symmetric input is expanded; the result is canonical.
CooMatrix parse_matrix_market(std::string_view text);
CooMatrix read_matrix_market(const std::string& path);

/// Emits `coordinate real general` with round-trippable values.
std::string write_matrix_market(const CooMatrix& m);
CooMatrix to_coo(const CsrMatrix& m);

/// Values are rounded to `format`. `index_width` 0 picks the narrowest width
/// that fits.
CsrMatrix coo_to_csr(const CooMatrix& coo, int index_width = 0, Format format = Format::FP64);

/// Each entry present independently with probability `density`; values
/// uniform in (-1, 1). The pattern depends only on (rows, cols, density, seed).
CsrMatrix gen_random_sparse(std::uint32_t rows, std::uint32_t cols, double density, std::uint64_t seed,
                            Format format = Format::FP64, int index_width = 0);

enum class GridMode { Constant, Ramp, Random };

struct GridInit {
  GridMode mode = GridMode::Random;
  double constant = 0.0;
  std::uint64_t seed = 0;
};

/// Ramp fills 0, 1, 2, ... in row-major order; Random draws uniform (-1, 1).
DenseTensor gen_grid(const std::vector<std::size_t>& dims, const GridInit& init, Format format = Format::FP64);

/// Uniform double in (-1, 1) from a 64-bit generator; shared by generators.
template <class Rng>
double uniform_signed(Rng& rng) {
  while (true) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
    if (u != 0.0) return 2.0 * u - 1.0;
  }
}

}  // namespace clustersim::data
