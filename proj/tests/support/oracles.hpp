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

// Reference models used only by the tests. None of them call into the
// library's arithmetic: floating point goes through MPFR or the host FPU,
// streams and kernels through plain loops.

#include <cstdint>
#include <span>
#include <vector>

#include "clustersim/kernels.hpp"
#include "clustersim/minifloat.hpp"
#include "clustersim/streams.hpp"

namespace oracle {

using clustersim::minifloat::Format;

/// Value of an encoding from its sign/exponent/mantissa fields.
double decode(Format f, std::uint64_t raw);
bool is_nan(Format f, std::uint64_t raw);
std::uint64_t quiet_nan(Format f);

/// Exact a*b + c rounded once to f.
std::uint64_t fma(Format f, std::uint64_t a, std::uint64_t b, std::uint64_t c);
std::uint64_t mul(Format f, std::uint64_t a, std::uint64_t b);
std::uint64_t add(Format f, std::uint64_t a, std::uint64_t b);
std::uint64_t add3(Format f, std::uint64_t a, std::uint64_t b, std::uint64_t c);
std::uint64_t sdotp(Format src, Format dst, std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d,
                    std::uint64_t acc);
std::uint64_t convert(Format from, Format to, std::uint64_t x);
/// Round a double to f.
std::uint64_t encode(Format f, double x);

// Streams -------------------------------------------------------------------

std::vector<std::uint32_t> set_intersection(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);
std::vector<std::uint32_t> set_union(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);
/// Comparisons of a two-pointer merge that advances the smaller head, or both
/// on a tie. Intersection stops at the first exhausted side; union drains the
/// rest for free.
std::uint64_t two_pointer_comparisons(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                                      bool intersect);
std::vector<std::uint32_t> nested_loop_affine(const clustersim::streams::AffineConfig& cfg);

// Kernels (FP64, host arithmetic) ----------------------------------------------

/// Tap-ordered chain: first tap multiplied, the rest fused.
clustersim::DenseTensor stencil(const clustersim::kernels::StencilSpec& spec, const clustersim::DenseTensor& grid);
clustersim::DenseTensor spmm(const clustersim::CsrMatrix& a, const clustersim::DenseTensor& b);
/// Dense product accumulated in increasing k over the positions where both
/// operands store an entry; entries with no contributing k are dropped.
clustersim::CsrMatrix spmspm(const clustersim::CsrMatrix& a, const clustersim::CsrMatrix& b);
std::uint64_t sparse_dot(std::span<const std::uint32_t> idx, std::span<const std::uint64_t> val,
                         std::span<const std::uint64_t> b);
/// Per output entry comparison counts of the row-by-column intersection.
std::uint64_t spmspm_comparisons(const clustersim::CsrMatrix& a, const clustersim::CsrMatrix& b);

}  // namespace oracle
