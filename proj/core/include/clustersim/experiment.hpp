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

// Experiment driver behind the command-line tool: resolves operands, runs
// kernel variants, validates against golden references and renders reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clustersim/config.hpp"
#include "clustersim/kernels.hpp"

namespace clustersim::cli {

enum class KernelKind { Stencil, Spmm, Spmspm, SparseDot, PeakFma };
const char* to_string(KernelKind k);
KernelKind parse_kernel(const std::string& s);

struct OperandSource {
  enum class Kind { None, File, Random };
  Kind kind = Kind::None;
  std::string path;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  double density = 0;

  /// Parses "rows,cols,density".
  static OperandSource random(const std::string& spec);
  static OperandSource file(const std::string& path);
  std::string id(std::uint64_t seed) const;
};

struct ExperimentSpec {
  KernelKind kernel = KernelKind::Spmm;
  std::vector<kernels::Variant> variants{kernels::Variant::Baseline, kernels::Variant::Su};
  std::vector<OperandSource> operands;
  std::vector<Format> formats{Format::FP64};
  std::vector<std::string> stencils{"j3d27pt"};
  SimConfig config;
  std::uint64_t seed = 0;
  std::uint32_t tile = 0;
  std::vector<std::size_t> grid{18, 18, 18};
  /// Dense columns for spmm (default 16); right-operand columns for spmspm
  /// (default: as many as the left operand has).
  std::uint32_t ncols = 0;
  double right_density = 0.01;
  std::uint64_t iters = 4096;

  /// Checks the spec is resolvable. Throws ConfigError.
  void validate() const;
  /// Number of runs a sweep expands to.
  std::size_t run_count() const;
};

struct Record {
  std::string kernel;
  std::string variant;
  std::string operand_id;
  std::string format;
  std::uint64_t cycles = 0;
  std::uint64_t flops = 0;
  std::uint64_t comparisons = 0;
  double fpu_util = 0;
  double comp_util = 0;
  double chip_gflops = 0;
  double chip_gcomps = 0;
  std::uint64_t dma_bytes = 0;
  std::uint64_t overlap_total_cycles = 0;
  bool validated = false;
  std::optional<double> speedup;  ///< baseline cycles / SU cycles, on SU rows
  std::string error;
  /// Non-empty when the functional result differs from the golden reference.
  std::string mismatch;
  /// Exit code this row alone would produce (0 when it ran and validated).
  int status = 0;
};

/// Runs every variant and format for one operand. Operand load failures throw;
/// per-run kernel failures are recorded in the row.
std::vector<Record> run_operand(const ExperimentSpec& spec, const OperandSource& src);

/// Rows of a full sweep in deterministic order. Operands that fail to load
/// yield one error row; independent operands run on `threads` workers.
std::vector<Record> run_sweep(const ExperimentSpec& spec, unsigned threads = 0);

/// JSON report: records plus the resolved configuration and seed. The
/// timestamp lives under "metadata" and is the only non-reproducible field.
std::string report_json(const ExperimentSpec& spec, const std::vector<Record>& records, bool with_metadata = true);
std::string report_csv(const ExperimentSpec& spec, const std::vector<Record>& records);

struct CompareRow {
  std::string kernel;
  std::string operand_id;
  std::string format;
  std::optional<std::uint64_t> baseline_cycles;
  std::optional<std::uint64_t> su_cycles;
  std::optional<double> speedup;
  double max_fpu_util = 0;
  double max_comp_util = 0;
  double chip_gflops = 0;
  double chip_gcomps = 0;
};

struct Comparison {
  std::vector<CompareRow> rows;
  bool has_speedup = false;
};

/// Joins records of one or more JSON reports on (kernel, operand, format).
/// With several reports every key must appear as both a baseline and an SU
/// row; otherwise throws ConfigError listing the unmatched keys.
Comparison compare_reports(const std::vector<std::string>& report_texts);
std::string comparison_table(const Comparison& c);
std::string comparison_json(const Comparison& c);

/// Maps an exception to the process exit code (1 validation, 2 config or
/// planning, 3 I/O).
int exit_code_for(const std::exception& e);

}  // namespace clustersim::cli
