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

#include "clustersim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "clustersim/data.hpp"

namespace clustersim::cli {

using kernels::Variant;
using json = nlohmann::ordered_json;

const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Stencil: return "stencil";
    case KernelKind::Spmm: return "spmm";
    case KernelKind::Spmspm: return "spmspm";
    case KernelKind::SparseDot: return "sparse_dot";
    case KernelKind::PeakFma: return "peak_fma";
  }
  return "?";
}

KernelKind parse_kernel(const std::string& s) {
  for (KernelKind k : {KernelKind::Stencil, KernelKind::Spmm, KernelKind::Spmspm, KernelKind::SparseDot,
                       KernelKind::PeakFma}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("unknown kernel '" + s + "' (expected stencil, spmm, spmspm, sparse_dot or peak_fma)");
}

OperandSource OperandSource::random(const std::string& spec) {
  OperandSource s;
  s.kind = Kind::Random;
  std::stringstream ss(spec);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ',')) parts.push_back(part);
  if (parts.size() != 3) throw ConfigError("--random expects rows,cols,density, got '" + spec + "'");
  try {
    std::size_t pos = 0;
    const unsigned long rows = std::stoul(parts[0], &pos);
    if (pos != parts[0].size()) throw std::invalid_argument("rows");
    const unsigned long cols = std::stoul(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument("cols");
    s.density = std::stod(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument("density");
    if (rows == 0 || cols == 0 || rows > 0xffffffffUL || cols > 0xffffffffUL) throw std::out_of_range("dims");
    s.rows = static_cast<std::uint32_t>(rows);
    s.cols = static_cast<std::uint32_t>(cols);
  } catch (const std::exception&) {
    throw ConfigError("--random expects rows,cols,density, got '" + spec + "'");
  }
  if (!(s.density > 0 && s.density <= 1)) throw ConfigError("--random density must be in (0, 1]");
  return s;
}

OperandSource OperandSource::file(const std::string& path) {
  OperandSource s;
  s.kind = Kind::File;
  s.path = path;
  return s;
}

std::string OperandSource::id(std::uint64_t seed) const {
  switch (kind) {
    case Kind::File: return std::filesystem::path(path).filename().string();
    case Kind::Random: {
      char buf[96];
      std::snprintf(buf, sizeof buf, "random-%ux%u-d%g-s%llu", rows, cols, density,
                    static_cast<unsigned long long>(seed));
      return buf;
    }
    case Kind::None: break;
  }
  return "-";
}

void ExperimentSpec::validate() const {
  config.validate();
  if (variants.empty()) throw ConfigError("no variants selected");
  if (formats.empty()) throw ConfigError("no formats selected");
  const bool sparse = kernel == KernelKind::Spmm || kernel == KernelKind::Spmspm || kernel == KernelKind::SparseDot;
  if (sparse && operands.empty()) throw ConfigError(std::string(to_string(kernel)) + " needs --matrix or --random");
  if (kernel == KernelKind::Stencil) {
    if (stencils.empty()) throw ConfigError("no stencils selected");
    for (const std::string& n : stencils) kernels::StencilSpec::by_name(n);
    if (grid.size() != 3) throw ConfigError("--grid expects three extents");
  }
  if (kernel == KernelKind::PeakFma && iters == 0) throw ConfigError("--iters must be positive");
  if (!(right_density > 0 && right_density <= 1)) throw ConfigError("--right-density must be in (0, 1]");
  if (run_count() >= 10000) throw ConfigError("sweep expands to " + std::to_string(run_count()) + " runs (limit 9999)");
}

std::size_t ExperimentSpec::run_count() const {
  const std::size_t v = kernel == KernelKind::PeakFma ? 1 : variants.size();
  std::size_t units = 1;
  if (kernel == KernelKind::Stencil) units = stencils.size();
  if (kernel == KernelKind::Spmm || kernel == KernelKind::Spmspm || kernel == KernelKind::SparseDot)
    units = operands.size();
  return units * formats.size() * v;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string first_dense_mismatch(const DenseTensor& got, const DenseTensor& want) {
  if (got.dims != want.dims) return "shape differs from the reference";
  for (std::size_t i = 0; i < got.data.size(); ++i) {
    if (got.data[i] != want.data[i]) {
      std::string where;
      std::size_t rest = i;
      for (std::size_t d = got.dims.size(); d-- > 0;) {
        where = std::to_string(rest % got.dims[d]) + (where.empty() ? "" : ",") + where;
        rest /= got.dims[d];
      }
      return "element [" + where + "]: got " + hex(got.data[i]) + ", expected " + hex(want.data[i]);
    }
  }
  return {};
}

std::string first_csr_mismatch(const CsrMatrix& got, const CsrMatrix& want) {
  if (got.rows != want.rows || got.cols != want.cols) return "shape differs from the reference";
  for (std::uint32_t r = 0; r < got.rows; ++r) {
    if (got.row_nnz(r) != want.row_nnz(r))
      return "row " + std::to_string(r) + ": " + std::to_string(got.row_nnz(r)) + " entries, expected " +
             std::to_string(want.row_nnz(r));
    for (std::uint32_t k = 0; k < got.row_nnz(r); ++k) {
      const std::uint32_t g = got.row_ptr[r] + k, w = want.row_ptr[r] + k;
      if (got.col_idx[g] != want.col_idx[w] || got.values[g] != want.values[w]) {
        return "element [" + std::to_string(r) + "," + std::to_string(want.col_idx[w]) + "]: got column " +
               std::to_string(got.col_idx[g]) + " value " + hex(got.values[g]) + ", expected " + hex(want.values[w]);
      }
    }
  }
  return {};
}

int status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Validation: return 1;
    case ErrorKind::Config:
    case ErrorKind::Planning: return 2;
    case ErrorKind::Io: return 3;
  }
  return 2;
}

void fill(Record& r, const machine::KernelReport& rep) {
  r.cycles = rep.cycles;
  r.flops = rep.flops;
  r.comparisons = rep.comparisons;
  r.fpu_util = rep.fpu_util;
  r.comp_util = rep.comp_util;
  r.chip_gflops = rep.chip_gflops;
  r.chip_gcomps = rep.chip_gcomps;
  r.dma_bytes = rep.dma_bytes;
  r.overlap_total_cycles = rep.overlap_total_cycles;
}

CsrMatrix load_matrix(const OperandSource& src, std::uint64_t seed, Format f) {
  switch (src.kind) {
    case OperandSource::Kind::File: return data::coo_to_csr(data::read_matrix_market(src.path), 0, f);
    case OperandSource::Kind::Random: return data::gen_random_sparse(src.rows, src.cols, src.density, seed, f);
    case OperandSource::Kind::None: break;
  }
  throw ConfigError("no operand given");
}

// Runs one (operand, format, variant) and validates it. `golden` is computed
// lazily and shared between the variants.
template <class Run>
Record guarded(const ExperimentSpec& spec, const std::string& operand, Format f, Variant v, Run&& run) {
  Record r;
  r.kernel = to_string(spec.kernel);
  r.variant = kernels::to_string(v);
  r.operand_id = operand;
  r.format = std::string(minifloat::to_string(f));
  try {
    run(r);
    r.validated = r.mismatch.empty();
    if (!r.validated) r.status = 1;
  } catch (const Error& e) {
    r.error = e.what();
    r.status = status_of(e.kind());
  } catch (const std::exception& e) {
    r.error = e.what();
    r.status = 2;
  }
  return r;
}

kernels::KernelOptions options(const ExperimentSpec& spec) {
  kernels::KernelOptions o;
  o.cluster = spec.config.cluster;
  o.costs = spec.config.costs;
  o.tile = spec.tile;
  return o;
}

void attach_speedups(std::vector<Record>& rows) {
  for (Record& su : rows) {
    if (su.variant != "SU" || !su.error.empty() || su.cycles == 0) continue;
    for (const Record& base : rows) {
      if (base.variant == "BASELINE" && base.error.empty() && base.operand_id == su.operand_id &&
          base.format == su.format && base.kernel == su.kernel) {
        su.speedup = static_cast<double>(base.cycles) / static_cast<double>(su.cycles);
      }
    }
  }
}

std::vector<Record> run_stencil(const ExperimentSpec& spec, const std::string& name) {
  std::vector<Record> rows;
  const kernels::StencilSpec st = kernels::StencilSpec::by_name(name);
  std::string id = name + ":" + std::to_string(spec.grid[0]) + "x" + std::to_string(spec.grid[1]) + "x" +
                   std::to_string(spec.grid[2]);
  for (Format f : spec.formats) {
    std::optional<DenseTensor> grid, golden;
    for (Variant v : spec.variants) {
      rows.push_back(guarded(spec, id, f, v, [&](Record& r) {
        if (f != Format::FP64) throw ConfigError("stencil: only FP64 is supported");
        if (!grid) grid = data::gen_grid(spec.grid, {data::GridMode::Random, 0.0, spec.seed}, f);
        const kernels::StencilResult res = kernels::stencil(st, *grid, v, options(spec));
        if (!golden) golden = kernels::golden_stencil(st, *grid);
        fill(r, res.report);
        r.mismatch = first_dense_mismatch(res.out, *golden);
      }));
    }
  }
  return rows;
}

std::vector<Record> run_peak(const ExperimentSpec& spec) {
  std::vector<Record> rows;
  const std::string id = "iters=" + std::to_string(spec.iters);
  for (Format f : spec.formats) {
    rows.push_back(guarded(spec, id, f, Variant::Su, [&](Record& r) {
      fill(r, kernels::peak_fma(f, spec.iters, options(spec)));
    }));
  }
  return rows;
}

}  // namespace

std::vector<Record> run_operand(const ExperimentSpec& spec, const OperandSource& src) {
  const std::string id = src.id(spec.seed);
  std::vector<Record> rows;
  // Loading failures propagate; the caller decides between an error row and
  // an exit code.
  if (src.kind == OperandSource::Kind::File) data::read_matrix_market(src.path);

  for (Format f : spec.formats) {
    std::optional<CsrMatrix> a;
    auto left = [&]() -> const CsrMatrix& {
      if (!a) a = load_matrix(src, spec.seed, f);
      return *a;
    };
    switch (spec.kernel) {
      case KernelKind::Spmm: {
        std::optional<DenseTensor> b, golden;
        for (Variant v : spec.variants) {
          rows.push_back(guarded(spec, id, f, v, [&](Record& r) {
            const std::size_t n = spec.ncols > 0 ? spec.ncols : 16;
            if (!b) b = data::gen_grid({left().cols, n}, {data::GridMode::Random, 0.0, spec.seed + 1}, f);
            const kernels::SpmmResult res = kernels::spmm(left(), *b, v, options(spec));
            if (!golden) golden = kernels::golden_spmm(left(), *b);
            fill(r, res.report);
            r.mismatch = first_dense_mismatch(res.out, *golden);
          }));
        }
        break;
      }
      case KernelKind::Spmspm: {
        std::optional<CsrMatrix> b, golden;
        for (Variant v : spec.variants) {
          rows.push_back(guarded(spec, id, f, v, [&](Record& r) {
            if (f != Format::FP64) throw ConfigError("spmspm: only FP64 is supported");
            const std::uint32_t n = spec.ncols > 0 ? spec.ncols : left().cols;
            if (!b) b = data::gen_random_sparse(left().cols, n, spec.right_density, spec.seed + 1, f);
            const kernels::SpmspmResult res = kernels::spmspm(left(), *b, v, options(spec));
            if (!golden) golden = kernels::golden_spmspm(left(), *b);
            fill(r, res.report);
            r.mismatch = first_csr_mismatch(res.out, *golden);
          }));
        }
        break;
      }
      case KernelKind::SparseDot: {
        std::optional<DenseTensor> b;
        for (Variant v : spec.variants) {
          rows.push_back(guarded(spec, id, f, v, [&](Record& r) {
            if (f != Format::FP64) throw ConfigError("sparse_dot: only FP64 is supported");
            const CsrMatrix& m = left();
            if (m.rows == 0) throw ConfigError("sparse_dot: operand has no rows");
            // The first row of the operand is the sparse vector.
            const std::span<const std::uint32_t> idx(m.col_idx.data(), m.row_ptr[1]);
            const std::span<const std::uint64_t> val(m.values.data(), m.row_ptr[1]);
            if (!b) b = data::gen_grid({m.cols}, {data::GridMode::Random, 0.0, spec.seed + 1}, f);
            const kernels::SparseDotResult res = kernels::sparse_dot(idx, val, *b, v, options(spec));
            fill(r, res.report);
            const std::uint64_t want = kernels::golden_sparse_dot(idx, val, *b);
            if (res.value != want) r.mismatch = "result " + hex(res.value) + ", expected " + hex(want);
          }));
        }
        break;
      }
      default: throw ConfigError("run_operand: kernel takes no matrix operand");
    }
  }
  attach_speedups(rows);
  return rows;
}

std::vector<Record> run_sweep(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();
  std::vector<std::function<std::vector<Record>()>> jobs;
  switch (spec.kernel) {
    case KernelKind::Stencil:
      for (const std::string& n : spec.stencils) jobs.emplace_back([&spec, n] {
        auto rows = run_stencil(spec, n);
        attach_speedups(rows);
        return rows;
      });
      break;
    case KernelKind::PeakFma: jobs.emplace_back([&spec] { return run_peak(spec); }); break;
    default:
      for (const OperandSource& src : spec.operands) {
        jobs.emplace_back([&spec, &src] {
          try {
            return run_operand(spec, src);
          } catch (const Error& e) {
            Record r;
            r.kernel = to_string(spec.kernel);
            r.operand_id = src.id(spec.seed);
            r.error = e.what();
            r.status = status_of(e.kind());
            return std::vector<Record>{r};
          }
        });
      }
  }

  std::vector<std::vector<Record>> results(jobs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) results[j] = jobs[j]();
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  std::vector<Record> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, p) : "nan";
}

json config_json(const ExperimentSpec& spec) {
  json c = json::object();
  for (const auto& [k, v] : materialize(spec.config)) c[k] = json::parse(v);
  c["tile"] = spec.tile;
  return c;
}

json record_json(const Record& r, const ExperimentSpec& spec, const json& cfg) {
  json j;
  j["kernel"] = r.kernel;
  j["variant"] = r.variant;
  j["operand_id"] = r.operand_id;
  j["format"] = r.format;
  j["cycles"] = r.cycles;
  j["flops"] = r.flops;
  j["comparisons"] = r.comparisons;
  j["fpu_util"] = r.fpu_util;
  j["comp_util"] = r.comp_util;
  j["chip_gflops"] = r.chip_gflops;
  j["chip_gcomps"] = r.chip_gcomps;
  j["dma_bytes"] = r.dma_bytes;
  j["overlap_total_cycles"] = r.overlap_total_cycles;
  j["validated"] = r.validated;
  j["speedup"] = r.speedup ? json(*r.speedup) : json(nullptr);
  j["error"] = r.error.empty() ? (r.mismatch.empty() ? json(nullptr) : json(r.mismatch)) : json(r.error);
  j["seed"] = spec.seed;
  j["config"] = cfg;
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string report_json(const ExperimentSpec& spec, const std::vector<Record>& records, bool with_metadata) {
  const json cfg = config_json(spec);
  json doc;
  doc["records"] = json::array();
  for (const Record& r : records) doc["records"].push_back(record_json(r, spec, cfg));
  if (with_metadata) doc["metadata"] = {{"timestamp", timestamp()}, {"tool", "clustersim 0.1.0"}};
  return doc.dump(2) + "\n";
}

std::string report_csv(const ExperimentSpec& spec, const std::vector<Record>& records) {
  std::string cfg;
  for (const auto& [k, v] : materialize(spec.config)) cfg += (cfg.empty() ? "" : ";") + k + "=" + v;
  cfg += ";tile=" + std::to_string(spec.tile);
  std::string out =
      "kernel,variant,operand_id,format,cycles,flops,comparisons,fpu_util,comp_util,chip_gflops,chip_gcomps,"
      "dma_bytes,overlap_total_cycles,validated,speedup,seed,config,error\n";
  for (const Record& r : records) {
    const std::string err = r.error.empty() ? r.mismatch : r.error;
    out += csv_field(r.kernel) + "," + csv_field(r.variant) + "," + csv_field(r.operand_id) + "," +
           csv_field(r.format) + "," + std::to_string(r.cycles) + "," + std::to_string(r.flops) + "," +
           std::to_string(r.comparisons) + "," + fmt_double(r.fpu_util) + "," + fmt_double(r.comp_util) + "," +
           fmt_double(r.chip_gflops) + "," + fmt_double(r.chip_gcomps) + "," + std::to_string(r.dma_bytes) + "," +
           std::to_string(r.overlap_total_cycles) + "," + (r.validated ? "true" : "false") + "," +
           (r.speedup ? fmt_double(*r.speedup) : "") + "," + std::to_string(spec.seed) + "," + csv_field(cfg) +
           "," + csv_field(err) + "\n";
  }
  return out;
}

Comparison compare_reports(const std::vector<std::string>& report_texts) {
  if (report_texts.empty()) throw ConfigError("compare: no reports given");
  struct Acc {
    CompareRow row;
    std::set<std::string> reports;
  };
  std::map<std::string, Acc> keyed;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < report_texts.size(); ++i) {
    json doc;
    try {
      doc = json::parse(report_texts[i]);
    } catch (const json::exception& e) {
      throw IoError("compare: report " + std::to_string(i + 1) + " is not valid JSON: " + e.what());
    }
    if (!doc.contains("records") || !doc["records"].is_array())
      throw IoError("compare: report " + std::to_string(i + 1) + " has no records array");
    for (const json& r : doc["records"]) {
      if (!r.value("error", json(nullptr)).is_null() && r.value("cycles", 0) == 0) continue;
      const std::string kernel = r.value("kernel", "");
      const std::string operand = r.value("operand_id", "");
      const std::string format = r.value("format", "");
      const std::string key = kernel + " | " + operand + " | " + format;
      auto [it, fresh] = keyed.try_emplace(key);
      if (fresh) {
        order.push_back(key);
        it->second.row.kernel = kernel;
        it->second.row.operand_id = operand;
        it->second.row.format = format;
      }
      CompareRow& row = it->second.row;
      const std::string variant = r.value("variant", "");
      const auto cycles = r.value("cycles", std::uint64_t{0});
      if (variant == "BASELINE") row.baseline_cycles = cycles;
      if (variant == "SU") row.su_cycles = cycles;
      row.max_fpu_util = std::max(row.max_fpu_util, r.value("fpu_util", 0.0));
      row.max_comp_util = std::max(row.max_comp_util, r.value("comp_util", 0.0));
      row.chip_gflops = std::max(row.chip_gflops, r.value("chip_gflops", 0.0));
      row.chip_gcomps = std::max(row.chip_gcomps, r.value("chip_gcomps", 0.0));
      it->second.reports.insert(std::to_string(i));
    }
  }
  if (report_texts.size() > 1) {
    std::vector<std::string> unmatched;
    for (const std::string& k : order) {
      const CompareRow& r = keyed[k].row;
      if (!r.baseline_cycles || !r.su_cycles) unmatched.push_back(k);
    }
    if (!unmatched.empty()) {
      std::string msg = "compare: unmatched keys (kernel | operand | format):";
      for (const std::string& k : unmatched) msg += "\n  " + k;
      throw ConfigError(msg);
    }
  }
  Comparison c;
  for (const std::string& k : order) {
    CompareRow row = keyed[k].row;
    if (row.baseline_cycles && row.su_cycles && *row.su_cycles > 0) {
      row.speedup = static_cast<double>(*row.baseline_cycles) / static_cast<double>(*row.su_cycles);
      c.has_speedup = true;
    }
    c.rows.push_back(row);
  }
  return c;
}

std::string comparison_table(const Comparison& c) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head = {"kernel", "operand", "format"};
  if (c.has_speedup) head.insert(head.end(), {"baseline_cycles", "su_cycles", "speedup"});
  head.insert(head.end(), {"max_fpu_util", "max_comp_util", "chip_gflops", "chip_gcomps"});
  cells.push_back(head);
  auto num = [](double v, int prec) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return std::string(buf);
  };
  for (const CompareRow& r : c.rows) {
    std::vector<std::string> line = {r.kernel, r.operand_id, r.format};
    if (c.has_speedup) {
      line.push_back(r.baseline_cycles ? std::to_string(*r.baseline_cycles) : "-");
      line.push_back(r.su_cycles ? std::to_string(*r.su_cycles) : "-");
      line.push_back(r.speedup ? num(*r.speedup, 2) : "-");
    }
    line.push_back(num(r.max_fpu_util, 3));
    line.push_back(num(r.max_comp_util, 3));
    line.push_back(num(r.chip_gflops, 1));
    line.push_back(num(r.chip_gcomps, 1));
    cells.push_back(line);
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  std::string out;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      const bool left = i < 3;
      const std::string pad(width[i] - line[i].size(), ' ');
      out += left ? line[i] + pad : pad + line[i];
      out += i + 1 < line.size() ? "  " : "\n";
    }
  }
  return out;
}

std::string comparison_json(const Comparison& c) {
  json doc;
  doc["rows"] = json::array();
  for (const CompareRow& r : c.rows) {
    json j;
    j["kernel"] = r.kernel;
    j["operand_id"] = r.operand_id;
    j["format"] = r.format;
    j["baseline_cycles"] = r.baseline_cycles ? json(*r.baseline_cycles) : json(nullptr);
    j["su_cycles"] = r.su_cycles ? json(*r.su_cycles) : json(nullptr);
    j["speedup"] = r.speedup ? json(*r.speedup) : json(nullptr);
    j["max_fpu_util"] = r.max_fpu_util;
    j["max_comp_util"] = r.max_comp_util;
    j["chip_gflops"] = r.chip_gflops;
    j["chip_gcomps"] = r.chip_gcomps;
    doc["rows"].push_back(j);
  }
  return doc.dump(2) + "\n";
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return status_of(err->kind());
  return 2;
}

}  // namespace clustersim::cli
