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

#include <doctest.h>

#include <cstring>
#include <set>
#include <tuple>

#include "clustersim/data.hpp"
#include "clustersim/kernels.hpp"
#include "oracles.hpp"

using namespace clustersim;
using namespace clustersim::kernels;

namespace {

std::uint64_t bits(double d) {
  std::uint64_t u;
  std::memcpy(&u, &d, 8);
  return u;
}

double value(std::uint64_t u) {
  double d;
  std::memcpy(&d, &u, 8);
  return d;
}

KernelOptions with_tile(std::uint32_t tile) {
  KernelOptions o;
  o.tile = tile;
  return o;
}

DenseTensor random_grid(std::vector<std::size_t> dims, std::uint64_t seed) {
  return data::gen_grid(dims, {data::GridMode::Random, 0.0, seed});
}

std::uint64_t intersections(const CsrMatrix& a, const CsrMatrix& b) {
  const CsrMatrix bt = b.transposed();
  std::uint64_t n = 0;
  for (std::uint32_t i = 0; i < a.rows; ++i)
    for (std::uint32_t j = 0; j < bt.rows; ++j)
      n += oracle::set_intersection(
               std::span<const std::uint32_t>(a.col_idx.data() + a.row_ptr[i], a.row_nnz(i)),
               std::span<const std::uint32_t>(bt.col_idx.data() + bt.row_ptr[j], bt.row_nnz(j)))
               .size();
  return n;
}

std::uint64_t interior(const DenseTensor& g, int r) {
  return (g.dims[0] - 2 * r) * (g.dims[1] - 2 * r) * (g.dims[2] - 2 * r);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("stencil suite") {
  CHECK(StencilSpec::by_name("j3d27pt").taps.size() == 27);
  CHECK(StencilSpec::by_name("box27").taps.size() == 27);
  CHECK(StencilSpec::by_name("star7").taps.size() == 7);
  CHECK(StencilSpec::by_name("star13").taps.size() == 13);
  CHECK(StencilSpec::by_name("star13").radius() == 2);
  CHECK_THROWS_AS(StencilSpec::by_name("j2d5pt"), ConfigError);
  for (const std::string& n : StencilSpec::names()) {
    double sum = 0;
    for (const Tap& t : StencilSpec::by_name(n).taps) sum += t.coeff;
    CHECK(sum == doctest::Approx(1.0));
  }
  // The j3d27pt box covers every offset in [-1, 1]^3 exactly once.
  std::set<std::tuple<int, int, int>> seen;
  for (const Tap& t : StencilSpec::by_name("j3d27pt").taps) seen.insert({t.dz, t.dy, t.dx});
  CHECK(seen.size() == 27);
}

TEST_CASE("stencil examples") {
  StencilSpec zero = StencilSpec::by_name("j3d27pt");
  for (Tap& t : zero.taps) t.coeff = 0.0;
  const DenseTensor g = random_grid({3, 3, 3}, 1);
  for (Variant v : {Variant::Baseline, Variant::Su}) {
    const StencilResult r = stencil(zero, g, v);
    CHECK(value(r.out.at(1, 1, 1)) == 0.0);
    CHECK(r.out.at(0, 0, 0) == g.at(0, 0, 0));
  }

  const DenseTensor c = data::gen_grid({6, 7, 8}, {data::GridMode::Constant, 3.0, 0});
  for (Variant v : {Variant::Baseline, Variant::Su}) {
    const DenseTensor out = stencil(StencilSpec::by_name("j3d27pt"), c, v).out;
    for (std::uint64_t x : out.data) REQUIRE(value(x) == 3.0);
  }

  const StencilSpec j = StencilSpec::by_name("j3d27pt");
  const DenseTensor r16 = random_grid({18, 18, 18}, 2);
  const DenseTensor want = oracle::stencil(j, r16);
  CHECK(golden_stencil(j, r16) == want);
  const StencilResult su = stencil(j, r16, Variant::Su);
  const StencilResult base = stencil(j, r16, Variant::Baseline);
  CHECK(su.out == want);
  CHECK(base.out == want);
  CHECK(su.report.flops == 2 * 27 * 16 * 16 * 16);
  CHECK(su.report.cycles < base.report.cycles);
}

TEST_CASE("stencils are bit-exact across variants, shapes and tilings") {
  const std::vector<std::vector<std::size_t>> shapes{{5, 6, 7}, {12, 9, 10}, {20, 16, 16}};
  for (const std::string& name : StencilSpec::names()) {
    const StencilSpec s = StencilSpec::by_name(name);
    for (const auto& dims : shapes) {
      const DenseTensor g = random_grid(dims, dims[0]);
      const DenseTensor want = oracle::stencil(s, g);
      for (std::uint32_t tile : {0u, 1u, 3u}) {
        for (Variant v : {Variant::Baseline, Variant::Su}) {
          const StencilResult r = stencil(s, g, v, with_tile(tile));
          INFO(name << " tile " << tile << " " << to_string(v));
          REQUIRE(r.out == want);
          CHECK(r.report.flops == 2 * s.taps.size() * interior(g, s.radius()));
        }
      }
    }
  }
}

TEST_CASE("stencil planning and argument errors") {
  const StencilSpec j = StencilSpec::by_name("j3d27pt");
  CHECK_THROWS_AS(stencil(j, random_grid({18, 18, 18}, 1), Variant::Su, with_tile(100)), PlanningError);
  CHECK_THROWS_AS(stencil(j, random_grid({4, 200, 200}, 1), Variant::Su), PlanningError);
  CHECK_THROWS_AS(stencil(j, random_grid({2, 5, 5}, 1), Variant::Su), ConfigError);
  CHECK_THROWS_AS(stencil(j, random_grid({5, 5}, 1), Variant::Su), ConfigError);
}

TEST_CASE("spmm examples") {
  const DenseTensor b = random_grid({8, 16}, 3);
  for (Variant v : {Variant::Baseline, Variant::Su}) {
    const SpmmResult r = spmm(CsrMatrix::identity(8), b, v);
    CHECK(r.out == b);
  }
  data::CooMatrix m;
  m.rows = m.cols = 4;
  m.entries = {{0, 0, 1}, {0, 3, 2}, {1, 1, 3}, {1, 2, 4}, {2, 0, 5}, {2, 2, 6}, {3, 1, 7}, {3, 3, 8}};
  m.canonicalize();
  const SpmmResult small = spmm(data::coo_to_csr(m), random_grid({4, 4}, 4), Variant::Su);
  CHECK(small.report.flops == 64);

  const CsrMatrix a = data::gen_random_sparse(64, 64, 0.05, 5);
  const DenseTensor bb = random_grid({64, 16}, 6);
  const DenseTensor want = oracle::spmm(a, bb);
  CHECK(golden_spmm(a, bb) == want);
  for (Variant v : {Variant::Baseline, Variant::Su}) CHECK(spmm(a, bb, v).out == want);

  CHECK_THROWS_AS(spmm(a, random_grid({63, 16}, 1), Variant::Su), ConfigError);
}

TEST_CASE("spmm is bit-exact across formats and tilings") {
  const CsrMatrix a64 = data::gen_random_sparse(200, 96, 0.04, 7);
  for (Format f : minifloat::kAllFormats) {
    const CsrMatrix a = a64.converted(f);
    const DenseTensor b = random_grid({96, 16}, 8).converted(f);
    const DenseTensor want = golden_spmm(a, b);
    if (f == Format::FP64) CHECK(want == oracle::spmm(a, b));
    for (std::uint32_t tile : {0u, 1u, 7u, 64u}) {
      for (Variant v : {Variant::Baseline, Variant::Su}) {
        const SpmmResult r = spmm(a, b, v, with_tile(tile));
        INFO(minifloat::to_string(f) << " tile " << tile << " " << to_string(v));
        REQUIRE(r.out == want);
        CHECK(r.report.flops == 2 * a.nnz() * 16);
      }
    }
  }
}

TEST_CASE("spmm with empty rows writes positive zeros") {
  CsrMatrix a = data::gen_random_sparse(40, 32, 0.05, 9);
  const DenseTensor b = random_grid({32, 8}, 10);
  for (Variant v : {Variant::Baseline, Variant::Su}) {
    const SpmmResult r = spmm(a, b, v);
    for (std::uint32_t i = 0; i < a.rows; ++i)
      if (a.row_nnz(i) == 0)
        for (std::size_t j = 0; j < 8; ++j) REQUIRE(r.out.at(i, j) == 0);
    CHECK(r.out == oracle::spmm(a, b));
  }
}

TEST_CASE("spmspm examples") {
  const CsrMatrix a = data::gen_random_sparse(30, 30, 0.1, 11);
  for (Variant v : {Variant::Baseline, Variant::Su}) {
    const SpmspmResult r = spmspm(a, CsrMatrix::identity(30), v);
    CHECK(r.out.row_ptr == a.row_ptr);
    CHECK(r.out.col_idx == a.col_idx);
    CHECK(r.out.values == a.values);
  }

  // A only touches even columns, B only stores odd rows.
  data::CooMatrix left, right;
  left.rows = left.cols = right.rows = right.cols = 10;
  for (std::uint32_t i = 0; i < 10; ++i) {
    left.entries.push_back({i, 2 * (i % 5), 1.0});
    right.entries.push_back({2 * (i % 5) + 1, i, 1.0});
  }
  left.canonicalize();
  right.canonicalize();
  for (Variant v : {Variant::Baseline, Variant::Su}) {
    const SpmspmResult r = spmspm(data::coo_to_csr(left), data::coo_to_csr(right), v);
    CHECK(r.out.nnz() == 0);
    CHECK(r.report.flops == 0);
    CHECK(r.report.comparisons > 0);
  }

  const CsrMatrix x = data::gen_random_sparse(64, 64, 0.01, 12);
  const CsrMatrix y = data::gen_random_sparse(64, 64, 0.01, 13);
  const CsrMatrix want = oracle::spmspm(x, y);
  for (Variant v : {Variant::Baseline, Variant::Su}) {
    const SpmspmResult r = spmspm(x, y, v);
    CHECK(r.out.row_ptr == want.row_ptr);
    CHECK(r.out.col_idx == want.col_idx);
    CHECK(r.out.values == want.values);
    CHECK(r.report.comparisons == oracle::spmspm_comparisons(x, y));
    CHECK(r.report.flops == 2 * intersections(x, y));
  }
}

TEST_CASE("spmspm is bit-exact across variants and tilings") {
  const CsrMatrix a = data::gen_random_sparse(120, 90, 0.08, 14);
  const CsrMatrix b = data::gen_random_sparse(90, 150, 0.05, 15);
  const CsrMatrix want = oracle::spmspm(a, b);
  const CsrMatrix golden = golden_spmspm(a, b);
  CHECK(golden.col_idx == want.col_idx);
  CHECK(golden.values == want.values);
  const std::uint64_t cmp = oracle::spmspm_comparisons(a, b);
  for (std::uint32_t tile : {0u, 1u, 16u, 40u}) {
    for (Variant v : {Variant::Baseline, Variant::Su}) {
      const SpmspmResult r = spmspm(a, b, v, with_tile(tile));
      INFO("tile " << tile << " " << to_string(v));
      REQUIRE(r.out.row_ptr == want.row_ptr);
      REQUIRE(r.out.col_idx == want.col_idx);
      REQUIRE(r.out.values == want.values);
      CHECK(r.report.comparisons == cmp);
      CHECK_NOTHROW(r.out.validate());
    }
  }
}

TEST_CASE("spmspm rejects row tiles that overflow the scratchpad") {
  const CsrMatrix a = data::gen_random_sparse(120, 90, 0.08, 14);
  const CsrMatrix b = data::gen_random_sparse(90, 150, 0.05, 15);
  CHECK_THROWS_AS(spmspm(a, b, Variant::Su, with_tile(120)), PlanningError);
}

TEST_CASE("spmspm argument errors") {
  const CsrMatrix a = data::gen_random_sparse(10, 12, 0.3, 16);
  CHECK_THROWS_AS(spmspm(a, data::gen_random_sparse(11, 10, 0.3, 17), Variant::Su), ConfigError);
  CsrMatrix unsorted = data::gen_random_sparse(12, 10, 0.5, 18);
  for (std::uint32_t r = 0; r < unsorted.rows; ++r) {
    if (unsorted.row_nnz(r) >= 2) {
      std::swap(unsorted.col_idx[unsorted.row_ptr[r]], unsorted.col_idx[unsorted.row_ptr[r] + 1]);
      break;
    }
  }
  CHECK_THROWS_AS(spmspm(a, unsorted, Variant::Su), ConfigError);
  CHECK_THROWS_AS(spmspm(a.converted(Format::FP32), data::gen_random_sparse(12, 10, 0.3, 19, Format::FP32),
                         Variant::Su),
                  ConfigError);
}

TEST_CASE("sparse_dot examples") {
  const DenseTensor b = random_grid({100}, 20);
  const std::vector<std::uint32_t> none;
  const std::vector<std::uint64_t> no_vals;
  for (Variant v : {Variant::Baseline, Variant::Su}) {
    CHECK(value(sparse_dot(none, no_vals, b, v).value) == 0.0);
    const std::vector<std::uint32_t> unit{37};
    const std::vector<std::uint64_t> one{bits(1.0)};
    CHECK(sparse_dot(unit, one, b, v).value == b.data[37]);
  }
  const std::vector<std::uint32_t> bad{5, 100};
  const std::vector<std::uint64_t> vals{bits(1.0), bits(2.0)};
  CHECK_THROWS_AS(sparse_dot(bad, vals, b, Variant::Su), ConfigError);
  const std::vector<std::uint32_t> unsorted{7, 3};
  CHECK_THROWS_AS(sparse_dot(unsorted, vals, b, Variant::Su), ConfigError);
}

TEST_CASE("sparse_dot matches the oracle and approaches the five-slot ratio") {
  const std::uint32_t len = 4000;
  const DenseTensor b = random_grid({len}, 21);
  const CsrMatrix row = data::gen_random_sparse(1, len, 0.5, 22);
  const std::span<const std::uint32_t> idx(row.col_idx);
  const std::span<const std::uint64_t> val(row.values);
  const std::uint64_t want = oracle::sparse_dot(idx, val, b.data);
  CHECK(golden_sparse_dot(idx, val, b) == want);
  const SparseDotResult su = sparse_dot(idx, val, b, Variant::Su);
  const SparseDotResult base = sparse_dot(idx, val, b, Variant::Baseline);
  CHECK(su.value == want);
  CHECK(base.value == want);
  const double ratio = static_cast<double>(base.report.compute_cycles) / su.report.compute_cycles;
  CHECK(ratio == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("peak_fma reproduces the chip peaks") {
  const double peaks[] = {768, 1536, 3072, 3072, 6144, 6144};
  for (Format f : minifloat::kAllFormats) {
    const KernelReport r = peak_fma(f, 10000);
    CHECK(r.chip_gflops == doctest::Approx(peaks[static_cast<int>(f)]).epsilon(0.005));
    CHECK(r.fpu_util <= 1.0);
  }
  CHECK(peak_fma(Format::FP64, 1).fpu_util < 1.0);
  CHECK_THROWS_AS(peak_fma(Format::FP64, 0), ConfigError);
}

TEST_CASE("SU variants are never slower and traces are well formed") {
  KernelOptions keep;
  keep.keep_traces = true;
  const CsrMatrix a = data::gen_random_sparse(256, 128, 0.03, 23);
  const SpmmResult su = spmm(a, random_grid({128, 16}, 24), Variant::Su, keep);
  const SpmmResult base = spmm(a, random_grid({128, 16}, 24), Variant::Baseline, keep);
  CHECK(su.report.cycles <= base.report.cycles);
  REQUIRE_FALSE(su.traces.empty());
  bool looped = false;
  for (const IssueTrace& t : su.traces) {
    CHECK_NOTHROW(t.validate());
    for (const machine::Slot& s : t.slots) looped |= s.kind == machine::SlotKind::LoopBegin;
  }
  CHECK(looped);

  const CsrMatrix x = data::gen_random_sparse(60, 60, 0.1, 25);
  const CsrMatrix y = data::gen_random_sparse(60, 60, 0.05, 26);
  CHECK(spmspm(x, y, Variant::Su).report.cycles <= spmspm(x, y, Variant::Baseline).report.cycles);
  const DenseTensor g = random_grid({10, 10, 10}, 27);
  for (const std::string& n : StencilSpec::names()) {
    const StencilSpec s = StencilSpec::by_name(n);
    CHECK(stencil(s, g, Variant::Su).report.cycles <= stencil(s, g, Variant::Baseline).report.cycles);
  }
}

TEST_CASE("trace cost knobs are validated and take effect") {
  KernelOptions o;
  o.costs.loop_overhead = -1;
  CHECK_THROWS_AS(spmm(CsrMatrix::identity(4), random_grid({4, 4}, 1), Variant::Su, o), ConfigError);
  const CsrMatrix a = data::gen_random_sparse(64, 64, 0.05, 28);
  const DenseTensor b = random_grid({64, 16}, 29);
  KernelOptions cheap, dear;
  dear.costs.dot_setup = 10;
  CHECK(spmm(a, b, Variant::Baseline, dear).report.compute_cycles >
        spmm(a, b, Variant::Baseline, cheap).report.compute_cycles);
  CHECK(parse_variant("su") == Variant::Su);
  CHECK_THROWS_AS(parse_variant("fast"), ConfigError);
}

}  // TEST_SUITE
