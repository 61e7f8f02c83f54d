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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "clustersim/errors.hpp"
#include "clustersim/experiment.hpp"

using namespace clustersim;
using namespace clustersim::cli;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<std::string> matrices;
  std::vector<std::string> randoms;
  std::string kernel = "spmm";
  std::vector<std::string> variants{"BASELINE", "SU"};
  std::vector<std::string> formats{"FP64"};
  std::vector<std::string> stencils{"j3d27pt"};
  std::vector<std::size_t> grid{18, 18, 18};
  std::uint32_t tile = 0;
  std::uint32_t ncols = 0;
  double right_density = 0.01;
  std::uint64_t iters = 4096;
  unsigned threads = 0;
  std::string report_format;
};

void add_experiment_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "file of key = value overrides of the cluster configuration");
  cmd->add_option("--out", o.out, "report path (default: stdout)");
  cmd->add_option("--seed", o.seed, "generator seed");
  cmd->add_option("--matrix", o.matrices, "Matrix Market operand (repeatable)");
  cmd->add_option("--random", o.randoms, "generated operand rows,cols,density (repeatable)");
  cmd->add_option("--kernel", o.kernel, "stencil, spmm, spmspm, sparse_dot or peak_fma");
  cmd->add_option("--variant", o.variants, "BASELINE and/or SU")->delimiter(',');
  cmd->add_option("--fmt", o.formats, "FP64, FP32, FP16, FP16ALT, FP8, FP8ALT")->delimiter(',');
  cmd->add_option("--stencil", o.stencils, "stencil names for --kernel stencil")->delimiter(',');
  cmd->add_option("--grid", o.grid, "stencil grid extents z,y,x")->delimiter(',')->expected(3);
  cmd->add_option("--tile", o.tile, "tile rows or planes (0: largest that fits)");
  cmd->add_option("--ncols", o.ncols, "dense columns (spmm) or right-operand columns (spmspm)");
  cmd->add_option("--right-density", o.right_density, "density of the generated right operand (spmspm)");
  cmd->add_option("--iters", o.iters, "FMAs per worker for peak_fma");
}

ExperimentSpec build_spec(const Options& o) {
  ExperimentSpec s;
  s.kernel = parse_kernel(o.kernel);
  s.variants.clear();
  for (const std::string& v : o.variants) s.variants.push_back(kernels::parse_variant(v));
  s.formats.clear();
  for (const std::string& f : o.formats) {
    const auto parsed = minifloat::parse_format(f);
    if (!parsed) throw ConfigError("unknown format '" + f + "'");
    s.formats.push_back(*parsed);
  }
  for (const std::string& m : o.matrices) s.operands.push_back(OperandSource::file(m));
  for (const std::string& r : o.randoms) s.operands.push_back(OperandSource::random(r));
  s.stencils = o.stencils;
  s.grid = o.grid;
  s.seed = o.seed;
  s.tile = o.tile;
  s.ncols = o.ncols;
  s.right_density = o.right_density;
  s.iters = o.iters;
  if (!o.config.empty()) s.config = load_config(o.config);
  s.validate();
  return s;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_errors(const std::vector<Record>& rows) {
  for (const Record& r : rows) {
    if (!r.error.empty()) std::cerr << r.kernel << " " << r.variant << " " << r.operand_id << ": " << r.error << "\n";
    if (!r.mismatch.empty())
      std::cerr << r.kernel << " " << r.variant << " " << r.operand_id << ": validation failed, " << r.mismatch
                << "\n";
  }
}

int cmd_run(const Options& o) {
  ExperimentSpec spec = build_spec(o);
  const bool operand_kernel = spec.kernel == KernelKind::Spmm || spec.kernel == KernelKind::Spmspm ||
                              spec.kernel == KernelKind::SparseDot;
  if (operand_kernel && spec.operands.size() != 1) throw ConfigError("run takes exactly one operand; use sweep");
  if (spec.kernel == KernelKind::Stencil && spec.stencils.size() != 1)
    throw ConfigError("run takes exactly one stencil; use sweep");
  // Operand failures surface as the process exit code here rather than rows.
  std::vector<Record> rows = operand_kernel ? run_operand(spec, spec.operands.front()) : run_sweep(spec, 1);
  print_errors(rows);
  const std::string text = o.report_format == "csv" ? report_csv(spec, rows) : report_json(spec, rows);
  emit(o.out, text);
  for (const Record& r : rows)
    if (r.status != 0) return r.status;
  return 0;
}

int cmd_sweep(const Options& o) {
  ExperimentSpec spec = build_spec(o);
  std::vector<Record> rows = run_sweep(spec, o.threads);
  print_errors(rows);
  const std::string text = o.report_format == "json" ? report_json(spec, rows) : report_csv(spec, rows);
  emit(o.out, text);
  return 0;
}

int cmd_compare(const std::vector<std::string>& reports, const std::string& out) {
  std::vector<std::string> texts;
  for (const std::string& p : reports) texts.push_back(read_file(p));
  const Comparison c = compare_reports(texts);
  std::cout << comparison_table(c);
  if (!out.empty()) emit(out, comparison_json(c));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clustersim: functional and timing model of a streaming sparse/stencil cluster"};
  app.require_subcommand(1);

  Options run_opts, sweep_opts;
  CLI::App* run = app.add_subcommand("run", "run one experiment and write a JSON report");
  add_experiment_flags(run, run_opts);
  run->add_option("--report-format", run_opts.report_format, "json (default) or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* sweep = app.add_subcommand("sweep", "run the cartesian product of the listed operands and options");
  add_experiment_flags(sweep, sweep_opts);
  sweep->add_option("--threads", sweep_opts.threads, "worker threads (0: hardware concurrency)");
  sweep->add_option("--report-format", sweep_opts.report_format, "csv (default) or json")
      ->check(CLI::IsMember({"json", "csv"}));

  std::vector<std::string> reports;
  std::string compare_out;
  CLI::App* compare = app.add_subcommand("compare", "join baseline and SU rows of JSON reports");
  compare->add_option("reports", reports, "JSON report paths")->required();
  compare->add_option("--out", compare_out, "summary JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts);
    return cmd_compare(reports, compare_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
