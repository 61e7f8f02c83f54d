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

// Workload kernels in a plain-ISA baseline variant and a stream-unit variant.
// Each produces its functional result from a scratchpad image and the issue
// traces that the timing model turns into a KernelReport.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clustersim/machine.hpp"
#include "clustersim/tensor.hpp"

namespace clustersim::kernels {

using machine::ClusterConfig;
using machine::IssueTrace;
using machine::KernelReport;

enum class Variant { Baseline, Su };
const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Issue-slot costs that the instruction listings leave open.
struct TraceCosts {
  int su_setup = 1;       ///< SU_CONFIG slots to re-point one stream
  int loop_setup = 1;     ///< INT_OP slots to launch a hardware loop
  int loop_overhead = 2;  ///< INT_OP slots of software-loop bookkeeping per iteration
  int branch_penalty = 1; ///< STALL slots after a data-dependent branch
  int dot_setup = 3;      ///< INT_OP slots before a baseline dot product

  void validate() const;
};

struct KernelOptions {
  ClusterConfig cluster;
  TraceCosts costs;
  /// Tile extent: z-planes for stencils, rows of the left operand for sparse
  /// kernels. 0 picks the largest tile that fits.
  std::uint32_t tile = 0;
  /// Keep the issue traces of the first tile in the result.
  bool keep_traces = false;
};

// ---------------------------------------------------------------------------
// Stencils

struct Tap {
  int dz, dy, dx;
  double coeff;
};

struct StencilSpec {
  std::string name;
  std::vector<Tap> taps;

  int radius() const;
  void validate() const;

  /// j3d27pt, star7, star13 or box27.
  static StencilSpec by_name(const std::string& name);
  static std::vector<std::string> names();
};

struct StencilResult {
  DenseTensor out;
  KernelReport report;
  std::vector<IssueTrace> traces;
};

/// Interior points receive the tap-ordered FMA chain; boundary points are
/// copied from the input.
StencilResult stencil(const StencilSpec& spec, const DenseTensor& grid, Variant v, const KernelOptions& opt = {});
DenseTensor golden_stencil(const StencilSpec& spec, const DenseTensor& grid);

// ---------------------------------------------------------------------------
// Sparse-dense and sparse-sparse products

struct SpmmResult {
  DenseTensor out;
  KernelReport report;
  std::vector<IssueTrace> traces;
};

/// C = A * B with each C[i, j] accumulated in col_idx order. A and B share a
/// format; B.cols must be a multiple of the SIMD lane count.
SpmmResult spmm(const CsrMatrix& a, const DenseTensor& b, Variant v, const KernelOptions& opt = {});
DenseTensor golden_spmm(const CsrMatrix& a, const DenseTensor& b);

struct SpmspmResult {
  CsrMatrix out;
  KernelReport report;
  std::vector<IssueTrace> traces;
};

/// C = A * B as row-by-column sparse dot products over B's transpose. FP64.
SpmspmResult spmspm(const CsrMatrix& a, const CsrMatrix& b, Variant v, const KernelOptions& opt = {});
CsrMatrix golden_spmspm(const CsrMatrix& a, const CsrMatrix& b);

// ---------------------------------------------------------------------------
// Microkernels

struct SparseDotResult {
  std::uint64_t value = 0;  ///< raw encoding in the operand format
  KernelReport report;
  IssueTrace trace;
};

/// Sum of a_val[k] * b[a_idx[k]], accumulated into four interleaved partial
/// sums combined as (p0 + p1) + (p2 + p3). Runs on one worker.
SparseDotResult sparse_dot(std::span<const std::uint32_t> a_idx, std::span<const std::uint64_t> a_val,
                           const DenseTensor& b, Variant v, const KernelOptions& opt = {});
std::uint64_t golden_sparse_dot(std::span<const std::uint32_t> a_idx, std::span<const std::uint64_t> a_val,
                                const DenseTensor& b);

/// Back-to-back independent SIMD FMAs in a hardware loop on every worker.
KernelReport peak_fma(Format f, std::uint64_t iters, const KernelOptions& opt = {});

}  // namespace clustersim::kernels
