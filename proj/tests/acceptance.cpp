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

// Acceptance runner: one PASS/FAIL line per criterion, tolerances inline.
// Exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "clustersim/data.hpp"
#include "clustersim/experiment.hpp"
#include "clustersim/kernels.hpp"
#include "oracles.hpp"
#include "sweeps.hpp"

using namespace clustersim;
using namespace clustersim::kernels;
using clustersim::minifloat::kAllFormats;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string name_of(Format f) { return std::string(minifloat::to_string(f)); }

bool in(double x, double lo, double hi) { return x >= lo && x <= hi; }

std::string fixture(const std::string& name) { return std::string(CLUSTERSIM_TEST_DATA) + "/" + name; }

CsrMatrix load(const std::string& name) { return data::coo_to_csr(data::read_matrix_market(fixture(name))); }

DenseTensor random_grid(std::vector<std::size_t> dims, std::uint64_t seed, Format f = Format::FP64) {
  return data::gen_grid(dims, {data::GridMode::Random, 0.0, seed}, f);
}

struct Operand {
  std::string id;
  CsrMatrix m;
};

/// Reports of every simulated run, for the double-buffering check.
std::vector<std::pair<std::string, machine::KernelReport>> g_reports;

void keep(const std::string& id, const machine::KernelReport& r) { g_reports.emplace_back(id, r); }

// Bit-exactness failures found while collecting performance numbers.
Verdict g_exact;
std::size_t g_exact_checks = 0;

void expect_equal(bool same, const std::string& what) {
  ++g_exact_checks;
  g_exact.require(same, what + " differs");
}

bool same_csr(const CsrMatrix& a, const CsrMatrix& b) {
  return a.rows == b.rows && a.cols == b.cols && a.row_ptr == b.row_ptr && a.col_idx == b.col_idx &&
         a.values == b.values;
}

Verdict peak() {
  Verdict v;
  const double want[] = {768, 1536, 3072, 3072, 6144, 6144};
  for (Format f : kAllFormats) {
    const double got = peak_fma(f, 10000).chip_gflops;
    const double w = want[static_cast<int>(f)];
    v.require(std::abs(got - w) <= 0.005 * w, name_of(f) + " " + fmt("%.2f", got));
    if (f == Format::FP64 || f == Format::FP8) v.note(name_of(f) + " " + fmt("%.1f", got));
  }
  v.note("tolerance 0.5% of 768/1536/3072/6144 GFLOP/s");
  return v;
}

Verdict stencils() {
  Verdict v;
  const DenseTensor g = random_grid({18, 18, 18}, 1);
  for (const std::string& name : StencilSpec::names()) {
    const StencilSpec s = StencilSpec::by_name(name);
    const DenseTensor want = oracle::stencil(s, g);
    const StencilResult su = stencil(s, g, Variant::Su);
    const StencilResult base = stencil(s, g, Variant::Baseline);
    keep(name + " SU", su.report);
    keep(name + " BASELINE", base.report);
    expect_equal(su.out == want, "stencil " + name + " SU vs reference");
    expect_equal(base.out == want, "stencil " + name + " BASELINE vs reference");
    expect_equal(golden_stencil(s, g) == want, "stencil " + name + " golden vs reference");
    if (name == "j3d27pt") {
      const double speedup = static_cast<double>(base.report.cycles) / su.report.cycles;
      v.require(su.report.fpu_util >= 0.75, "util " + fmt("%.4f", su.report.fpu_util));
      v.require(in(speedup, 3.0, 4.5), "speedup " + fmt("%.3f", speedup));
      v.note("j3d27pt 18^3 util " + fmt("%.4f", su.report.fpu_util) + " (>= 0.75), speedup " +
             fmt("%.3f", speedup) + " (in [3.0, 4.5])");
    }
  }
  return v;
}

Verdict spmm_suite(const std::vector<Operand>& ops) {
  Verdict v;
  double best_util = 0, lo = 1e9, hi = 0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const CsrMatrix& a = ops[i].m;
    const DenseTensor b = random_grid({a.cols, 16}, 100 + i);
    const DenseTensor want = oracle::spmm(a, b);
    const SpmmResult su = spmm(a, b, Variant::Su);
    const SpmmResult base = spmm(a, b, Variant::Baseline);
    keep("spmm " + ops[i].id + " SU", su.report);
    keep("spmm " + ops[i].id + " BASELINE", base.report);
    expect_equal(su.out == want, "spmm " + ops[i].id + " SU vs reference");
    expect_equal(base.out == want, "spmm " + ops[i].id + " BASELINE vs reference");
    expect_equal(golden_spmm(a, b) == want, "spmm " + ops[i].id + " golden vs reference");
    const double speedup = static_cast<double>(base.report.cycles) / su.report.cycles;
    v.require(in(speedup, 3.5, 5.5), ops[i].id + " speedup " + fmt("%.3f", speedup));
    best_util = std::max(best_util, su.report.fpu_util);
    lo = std::min(lo, speedup);
    hi = std::max(hi, speedup);

    for (Format f : {Format::FP32, Format::FP16, Format::FP16ALT, Format::FP8, Format::FP8ALT}) {
      const CsrMatrix af = a.converted(f);
      const DenseTensor bf = b.converted(f);
      const DenseTensor g = golden_spmm(af, bf);
      const std::string id = "spmm " + ops[i].id + " " + name_of(f);
      expect_equal(spmm(af, bf, Variant::Su).out == g, id + " SU vs golden");
      expect_equal(spmm(af, bf, Variant::Baseline).out == g, id + " BASELINE vs golden");
    }
  }
  v.require(ops.size() >= 5, "fewer than 5 matrices");
  v.require(in(best_util, 0.32, 0.52), "best util " + fmt("%.4f", best_util));
  v.note(std::to_string(ops.size()) + " matrices, speedups " + fmt("%.3f", lo) + ".." + fmt("%.3f", hi) +
         " (in [3.5, 5.5]), best util " + fmt("%.4f", best_util) + " (in [0.32, 0.52])");
  return v;
}

Verdict spmspm_suite(const std::vector<Operand>& ops) {
  Verdict v;
  double best_util = 0, lo = 1e9, hi = 0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const CsrMatrix& a = ops[i].m;
    const CsrMatrix b = data::gen_random_sparse(a.cols, a.cols, 0.01, 200 + i);
    const CsrMatrix want = oracle::spmspm(a, b);
    const std::uint64_t cmp = oracle::spmspm_comparisons(a, b);
    const SpmspmResult su = spmspm(a, b, Variant::Su);
    const SpmspmResult base = spmspm(a, b, Variant::Baseline);
    keep("spmspm " + ops[i].id + " SU", su.report);
    keep("spmspm " + ops[i].id + " BASELINE", base.report);
    expect_equal(same_csr(su.out, want), "spmspm " + ops[i].id + " SU vs reference");
    expect_equal(same_csr(base.out, want), "spmspm " + ops[i].id + " BASELINE vs reference");
    expect_equal(same_csr(golden_spmspm(a, b), want), "spmspm " + ops[i].id + " golden vs reference");
    expect_equal(su.report.comparisons == cmp, "spmspm " + ops[i].id + " comparison count");
    const double speedup = static_cast<double>(base.report.cycles) / su.report.cycles;
    v.require(in(speedup, 2.8, 4.4), ops[i].id + " speedup " + fmt("%.3f", speedup));
    best_util = std::max(best_util, su.report.comp_util);
    lo = std::min(lo, speedup);
    hi = std::max(hi, speedup);

    // Sparse dot products over a few rows of the same operand.
    const DenseTensor x = random_grid({a.cols}, 300 + i);
    for (std::uint32_t r = 0; r < a.rows; r += std::max<std::uint32_t>(1, a.rows / 4)) {
      const std::span<const std::uint32_t> idx(a.col_idx.data() + a.row_ptr[r], a.row_nnz(r));
      const std::span<const std::uint64_t> val(a.values.data() + a.row_ptr[r], a.row_nnz(r));
      const std::uint64_t d = oracle::sparse_dot(idx, val, x.data);
      const std::string id = "sparse_dot " + ops[i].id + " row " + std::to_string(r);
      expect_equal(sparse_dot(idx, val, x, Variant::Su).value == d, id + " SU vs reference");
      expect_equal(sparse_dot(idx, val, x, Variant::Baseline).value == d, id + " BASELINE vs reference");
    }
  }
  // Chip rate at the reference utilization: one tile whose comparisons give
  // exactly 0.49 per worker-cycle.
  const machine::ClusterConfig cfg;
  const std::uint64_t cycles = 100000;
  machine::TileCost tile;
  tile.compute_cycles = cycles;
  const auto cmp_count = static_cast<std::uint64_t>(0.49 * cfg.n_workers * cycles);
  const machine::KernelReport at49 = machine::scale_to_chip(
      machine::build_report(Format::FP64, {tile}, 0, cmp_count, cfg, cfg.active_clusters_per_group), cfg);
  v.require(std::abs(at49.chip_gcomps - 188.0) <= 1.0, "chip rate at 0.49 " + fmt("%.2f", at49.chip_gcomps));
  v.require(in(best_util, 0.39, 0.59), "best comp util " + fmt("%.4f", best_util));
  v.note(std::to_string(ops.size()) + " matrices with 1% right operands, speedups " + fmt("%.3f", lo) + ".." +
         fmt("%.3f", hi) + " (in [2.8, 4.4]), best comp util " + fmt("%.4f", best_util) +
         " (in [0.39, 0.59]), chip rate at 0.49 " + fmt("%.2f", at49.chip_gcomps) + " GComp/s (188 +- 1)");
  return v;
}

Verdict minifloats() {
  Verdict v;
  sweeps::Outcome all;
  auto take = [&](const std::string& what, const sweeps::Outcome& o) {
    v.require(o.ok(), what + ": " + std::to_string(o.mismatches) + " mismatches, first " + o.first);
    all.merge(o);
  };
  for (Format f : {Format::FP8, Format::FP8ALT}) {
    const sweeps::Outcome o = sweeps::exhaustive_binary(f);
    v.require(o.cases == 2 * 65536, "exhaustive pair count");
    take(std::string("exhaustive mul/add ") + name_of(f), o);
  }
  for (Format f : {Format::FP16, Format::FP16ALT, Format::FP8, Format::FP8ALT})
    take(std::string("conversions from ") + name_of(f), sweeps::exhaustive_convert(f));
  const std::uint64_t n = 1000000;
  for (Format f : kAllFormats) {
    const auto k = static_cast<std::uint64_t>(f);
    take(std::string("fma ") + name_of(f), sweeps::random_fma(f, n, 1000 + k));
    take(std::string("add3 ") + name_of(f), sweeps::random_add3(f, n, 2000 + k));
  }
  for (auto [src, dst] : {std::pair{Format::FP8, Format::FP16}, std::pair{Format::FP8ALT, Format::FP16ALT},
                          std::pair{Format::FP16, Format::FP32}, std::pair{Format::FP16ALT, Format::FP32}}) {
    take(std::string("sdotp ") + name_of(src), sweeps::random_sdotp(src, dst, n, 3000));
  }
  v.note(std::to_string(all.cases) + " cases bit-exact against the MPFR oracle (10^6 random per op and format)");
  return v;
}

Verdict stream_oracles() {
  Verdict v;
  const sweeps::Outcome m = sweeps::random_merges(10000, 41);
  const sweeps::Outcome a = sweeps::random_affine(10000, 42);
  const sweeps::Outcome i = sweeps::random_indirect(2000, 43);
  v.require(m.ok(), "merges: " + m.first);
  v.require(a.ok(), "affine: " + a.first);
  v.require(i.ok(), "indirect: " + i.first);
  v.note(std::to_string(m.cases) + " merge, " + std::to_string(a.cases) + " affine, " + std::to_string(i.cases) +
         " indirect cases, zero mismatches");
  return v;
}

Verdict double_buffering() {
  Verdict v;
  std::size_t multi = 0, equal = 0;
  for (const auto& [id, r] : g_reports) {
    if (r.tiles.size() < 2) continue;
    ++multi;
    std::vector<machine::TilePhase> ph;
    for (const machine::TileCost& t : r.tiles) {
      machine::TilePhase p{t.compute_cycles, 0, 0};
      for (const auto& q : t.dma_in) p.dma_in += machine::dma_cycles(q, machine::ClusterConfig{}, r.active_clusters);
      for (const auto& q : t.dma_out) p.dma_out += machine::dma_cycles(q, machine::ClusterConfig{}, r.active_clusters);
      ph.push_back(p);
    }
    std::uint64_t serial = 0, hidden = 0;
    for (std::size_t t = 0; t < ph.size(); ++t) {
      serial += ph[t].compute + ph[t].dma_in + ph[t].dma_out;
      const std::uint64_t next_in = t + 1 < ph.size() ? ph[t + 1].dma_in : 0;
      const std::uint64_t prev_out = t > 0 ? ph[t - 1].dma_out : 0;
      hidden += std::min(ph[t].compute, next_in + prev_out);
    }
    v.require(r.serial_total_cycles == serial, id + ": serial total");
    v.require(r.overlap_total_cycles <= r.serial_total_cycles, id + ": overlapped exceeds serial");
    v.require(r.serial_total_cycles - r.overlap_total_cycles == hidden, id + ": hidden time");
    if (r.overlap_total_cycles == r.serial_total_cycles) {
      ++equal;
      v.require(hidden == 0, id + ": equal totals without a degenerate schedule");
    }
  }
  v.require(multi > 0, "no multi-tile runs");
  v.note(std::to_string(multi) + " multi-tile runs, overlapped <= serial, " + std::to_string(equal) +
         " equal (all degenerate)");
  return v;
}

Verdict determinism() {
  Verdict v;
  cli::ExperimentSpec s;
  s.kernel = cli::KernelKind::Spmm;
  s.seed = 9;
  s.operands = {cli::OperandSource::file(fixture("bilinear_2048x512.mtx")),
                cli::OperandSource::random("1024,256,0.01"), cli::OperandSource::random("512,512,0.02")};
  s.formats = {Format::FP64, Format::FP16};
  const std::string first = cli::report_csv(s, cli::run_sweep(s, 1));
  const std::string second = cli::report_csv(s, cli::run_sweep(s, 1));
  const std::string threaded = cli::report_csv(s, cli::run_sweep(s, 4));
  v.require(first == second, "repeat differs");
  v.require(first == threaded, "threaded sweep differs");
  v.note(std::to_string(first.size()) + "-byte CSV identical across 3 sweeps (1, 1 and 4 threads)");
  return v;
}

}  // namespace

int main() {
  std::vector<Operand> spmm_ops, spmspm_ops;
  for (const char* f : {"bspline3_2048x512.mtx", "bspline4_2560x512.mtx", "bilinear_2048x512.mtx"})
    spmm_ops.push_back({f, load(f)});
  spmm_ops.push_back({"random-2048x512-d0.008", data::gen_random_sparse(2048, 512, 0.008, 11)});
  spmm_ops.push_back({"random-3072x384-d0.01", data::gen_random_sparse(3072, 384, 0.01, 12)});
  spmm_ops.push_back({"random-4096x256-d0.0102", data::gen_random_sparse(4096, 256, 0.0102, 13)});
  for (const char* f : {"laplace9_20x20.mtx", "laplace7_8x8x8.mtx"}) spmspm_ops.push_back({f, load(f)});
  spmspm_ops.push_back({"random-400x400-d0.025", data::gen_random_sparse(400, 400, 0.025, 21)});
  spmspm_ops.push_back({"random-400x400-d0.03", data::gen_random_sparse(400, 400, 0.03, 22)});
  spmspm_ops.push_back({"random-512x512-d0.02", data::gen_random_sparse(512, 512, 0.02, 23)});

  struct Item {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Item> items = {
      {1, "peak arithmetic", peak},
      {2, "stencil utilization", stencils},
      {3, "spmm speedup", [&] { return spmm_suite(spmm_ops); }},
      {4, "spmspm comparator rate", [&] { return spmspm_suite(spmspm_ops); }},
      {5, "minifloat oracle equivalence", minifloats},
      {6, "stream oracles", stream_oracles},
      {7, "functional bit-exactness", [] {
         g_exact.require(g_exact_checks > 0, "no comparisons ran");
         g_exact.note(std::to_string(g_exact_checks) + " output comparisons across stencils, spmm in all formats, "
                      "spmspm and sparse_dot, all bit-identical");
         return g_exact;
       }},
      {8, "double buffering", double_buffering},
      {9, "sweep determinism", determinism},
  };
  int failed = 0;
  for (const Item& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = it.run();
    } catch (const std::exception& e) {
      v.require(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", it.id, it.name, v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
  return failed == 0 ? 0 : 1;
}
