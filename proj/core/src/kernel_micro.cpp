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

#include <algorithm>
#include <cctype>

#include "kernel_common.hpp"

namespace clustersim::kernels {

using namespace detail;

const char* to_string(Variant v) { return v == Variant::Baseline ? "BASELINE" : "SU"; }

Variant parse_variant(const std::string& s) {
  std::string u;
  for (char ch : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (u == "BASELINE") return Variant::Baseline;
  if (u == "SU") return Variant::Su;
  throw ConfigError("unknown variant '" + s + "' (expected BASELINE or SU)");
}

void TraceCosts::validate() const {
  auto check = [](int v, const char* name) {
    if (v < 0 || v > 1000) throw ConfigError(std::string("trace costs: ") + name + " must be in 0..1000");
  };
  check(su_setup, "su_setup");
  check(loop_setup, "loop_setup");
  check(loop_overhead, "loop_overhead");
  check(branch_penalty, "branch_penalty");
  check(dot_setup, "dot_setup");
}

namespace {

void check_dot(std::span<const std::uint32_t> a_idx, std::span<const std::uint64_t> a_val, const DenseTensor& b) {
  if (b.dims.size() != 1) throw ConfigError("sparse_dot: b must be a vector");
  if (b.format != Format::FP64) throw ConfigError("sparse_dot: only FP64 operands are supported");
  if (a_idx.size() != a_val.size()) throw ConfigError("sparse_dot: index and value lengths differ");
  for (std::size_t k = 0; k < a_idx.size(); ++k) {
    if (a_idx[k] >= b.size()) {
      throw ConfigError("sparse_dot: index " + std::to_string(a_idx[k]) + " at position " + std::to_string(k) +
                        " is out of range for a vector of length " + std::to_string(b.size()));
    }
    if (k > 0 && a_idx[k] <= a_idx[k - 1])
      throw ConfigError("sparse_dot: indices not strictly increasing at position " + std::to_string(k));
  }
}

std::uint64_t combine(std::uint64_t p[4]) {
  using minifloat::Bits;
  const Format f = Format::FP64;
  const Bits lo = minifloat::add(Bits(f, p[0]), Bits(f, p[1]));
  const Bits hi = minifloat::add(Bits(f, p[2]), Bits(f, p[3]));
  return minifloat::add(lo, hi).raw();
}

}  // namespace

std::uint64_t golden_sparse_dot(std::span<const std::uint32_t> a_idx, std::span<const std::uint64_t> a_val,
                                const DenseTensor& b) {
  check_dot(a_idx, a_val, b);
  std::uint64_t p[4] = {};
  for (std::size_t k = 0; k < a_idx.size(); ++k) p[k % 4] = madd(Format::FP64, a_val[k], b.data[a_idx[k]], p[k % 4], k < 4);
  return combine(p);
}

SparseDotResult sparse_dot(std::span<const std::uint32_t> a_idx, std::span<const std::uint64_t> a_val,
                           const DenseTensor& b, Variant v, const KernelOptions& opt) {
  check_options(opt);
  check_dot(a_idx, a_val, b);
  const Format f = Format::FP64;
  const auto n = static_cast<std::uint32_t>(a_idx.size());
  const int iw = min_index_width(static_cast<std::uint32_t>(std::min<std::size_t>(b.size(), 0xffffffffu)));
  const int ib = iw / 8;

  SpmLayout layout(opt.cluster.spm_bytes);
  Address idx_base, val_base, b_base, out_at;
  try {
    idx_base = layout.alloc(static_cast<std::uint64_t>(n) * ib);
    val_base = layout.alloc(static_cast<std::uint64_t>(n) * 8);
    b_base = layout.alloc(b.size() * 8);
    out_at = layout.alloc(8);
  } catch (const PlanningError&) {
    throw PlanningError("sparse_dot: operands exceed the " + std::to_string(opt.cluster.spm_bytes) +
                        "-byte scratchpad");
  }
  Spm spm(opt.cluster.spm_bytes);
  for (std::uint32_t k = 0; k < n; ++k) {
    spm.write(static_cast<Address>(idx_base + k * ib), ib, a_idx[k]);
    spm.write(static_cast<Address>(val_base + k * 8), 8, a_val[k]);
  }
  for (std::size_t i = 0; i < b.size(); ++i) spm.write(static_cast<Address>(b_base + i * 8), 8, b.data[i]);

  const TraceCosts& c = opt.costs;
  TraceBuilder tb(opt.cluster.fpu_latency);
  std::uint64_t p[4] = {};
  auto fma_slot = [&](std::uint32_t k, const Slot& s) {
    const int reg = static_cast<int>(k % 4);
    if (k < 4) {
      tb.fpu(s, reg);
    } else {
      tb.fpu(s, reg, {reg});
    }
  };
  if (v == Variant::Su) {
    tb.su_config(3 * c.su_setup);
    tb.int_op(c.loop_setup);
    if (n > 0) {
      streams::IndirectConfig ic;
      ic.index = {idx_base, iw, n};
      ic.data_base = b_base;
      ic.elem_bytes = 8;
      const std::vector<Address> gather = streams::indirect_addresses(ic, spm);
      tb.loop_begin();
      WordFetch idx_fetch;
      for (std::uint32_t k = 0; k < n; ++k) {
        const Address val_at = static_cast<Address>(val_base + k * 8);
        const Address idx_at = static_cast<Address>(idx_base + k * ib);
        p[k % 4] = madd(f, spm.read(val_at, 8), spm.read(gather[k], 8), p[k % 4], k < 4);
        Slot s = Slot::of(SlotKind::FpuFma, f).with(gather[k]).with(val_at);
        if (idx_fetch.touch(idx_at)) s.with(idx_at);
        fma_slot(k, s);
      }
      tb.loop_end();
    }
  } else {
    tb.int_op(c.dot_setup);
    for (std::uint32_t k = 0; k < n; ++k) {
      const Address idx_at = static_cast<Address>(idx_base + k * ib);
      const Address val_at = static_cast<Address>(val_base + k * 8);
      const auto i = static_cast<std::uint32_t>(spm.read(idx_at, ib));
      const Address b_at = static_cast<Address>(b_base + i * 8ull);
      p[k % 4] = madd(f, spm.read(val_at, 8), spm.read(b_at, 8), p[k % 4], k < 4);
      tb.load(idx_at);
      tb.int_op();
      tb.load(val_at);
      tb.load(b_at);
      fma_slot(k, Slot::of(SlotKind::FpuFma, f));
    }
  }
  tb.fpu(Slot::of(SlotKind::FpuAdd, f), 4, {0, 1});
  tb.fpu(Slot::of(SlotKind::FpuAdd, f), 5, {2, 3});
  tb.fpu(Slot::of(SlotKind::FpuAdd, f), 6, {4, 5});
  tb.consume(Slot::of(SlotKind::Store).with(out_at), 6);
  spm.write(out_at, 8, combine(p));

  SparseDotResult res;
  res.value = spm.read(out_at, 8);
  std::vector<IssueTrace> traces{tb.take()};
  std::vector<DmaRequest> in, out;
  add_dma(in, static_cast<std::uint64_t>(n) * ib);
  add_dma(in, static_cast<std::uint64_t>(n) * 8);
  add_dma(in, b.size() * 8);
  add_dma_out(out, 8);
  KernelOptions keep = opt;
  keep.keep_traces = true;
  TileRun run(keep);
  run.add(std::move(traces), std::move(in), std::move(out));
  res.report = run.finish(f);
  res.trace = std::move(run.take_traces().front());
  return res;
}

KernelReport peak_fma(Format f, std::uint64_t iters, const KernelOptions& opt) {
  check_options(opt);
  if (iters == 0) throw ConfigError("peak_fma: iters must be positive");
  if (iters > (std::uint64_t{1} << 26)) throw ConfigError("peak_fma: iters above 2^26");
  // Rotating over as many accumulators as the FPU latency keeps every FMA
  // independent of the ones still in flight.
  const int accs = std::min(opt.cluster.fpu_latency, TraceBuilder::kRegisters);
  TraceBuilder tb(opt.cluster.fpu_latency);
  tb.int_op(opt.costs.loop_setup);
  tb.loop_begin();
  for (std::uint64_t i = 0; i < iters; ++i) {
    const int reg = static_cast<int>(i % accs);
    if (i < static_cast<std::uint64_t>(accs)) {
      tb.fpu(Slot::of(SlotKind::FpuFma, f), reg);
    } else {
      tb.fpu(Slot::of(SlotKind::FpuFma, f), reg, {reg});
    }
  }
  tb.loop_end();
  // The loop touches no scratchpad, so workers never interact and every one
  // of them runs this trace in the same number of cycles.
  const machine::WorkerStats w = machine::simulate_worker(tb.take(), opt.cluster);
  machine::TileCost tile;
  tile.compute_cycles = w.cycles;
  const machine::KernelReport cluster =
      machine::build_report(f, {tile}, w.flops * opt.cluster.n_workers, 0, opt.cluster,
                            opt.cluster.active_clusters_per_group);
  return machine::scale_to_chip(cluster, opt.cluster);
}

}  // namespace clustersim::kernels
