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

#include "kernel_common.hpp"

namespace clustersim::kernels {

using namespace detail;

namespace {

void check(const CsrMatrix& a, const CsrMatrix& b) {
  a.validate();
  b.validate();
  if (a.format != Format::FP64 || b.format != Format::FP64)
    throw ConfigError("spmspm: only FP64 operands are supported");
  if (a.cols != b.rows) {
    throw ConfigError("spmspm: dimension mismatch, A is " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                      " and B is " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
  }
}

// Bytes of a CSR row block [r0, r1) in the scratchpad.
std::uint64_t block_bytes(const CsrMatrix& m, std::uint32_t r0, std::uint32_t r1) {
  const std::uint64_t nnz = m.row_ptr[r1] - m.row_ptr[r0];
  return align8((r1 - r0 + 1) * 4ull) + align8(nnz * (m.index_width / 8)) + align8(nnz * 8);
}

std::vector<std::uint32_t> split(const CsrMatrix& m, std::uint64_t budget, std::uint32_t fixed, const char* what) {
  std::vector<std::uint32_t> bounds{0};
  while (bounds.back() < m.rows) {
    const std::uint32_t r0 = bounds.back();
    std::uint32_t r1 = r0;
    if (fixed > 0) {
      r1 = std::min(m.rows, r0 + fixed);
    } else {
      while (r1 < m.rows && block_bytes(m, r0, r1 + 1) <= budget) ++r1;
      if (r1 == r0) r1 = r0 + 1;
    }
    if (block_bytes(m, r0, r1) > budget) {
      throw PlanningError(std::string("spmspm: ") + what + " block starting at " + std::to_string(r0) + " needs " +
                          std::to_string(block_bytes(m, r0, r1)) + " bytes, budget " + std::to_string(budget));
    }
    bounds.push_back(r1);
  }
  return bounds;
}

// Scratchpad placement of a CSR block.
struct Block {
  Address ptr, idx, val;
  int ib;
  std::uint32_t first;  // global nnz offset of the block

  Address idx_at(std::uint32_t e) const { return static_cast<Address>(idx + (e - first) * ib); }
  Address val_at(std::uint32_t e) const { return static_cast<Address>(val + (e - first) * 8ull); }
};

Block place(Spm& spm, Address base, const CsrMatrix& m, std::uint32_t r0, std::uint32_t r1) {
  Block b;
  const std::uint32_t first = m.row_ptr[r0];
  const std::uint64_t nnz = m.row_ptr[r1] - first;
  b.ib = m.index_width / 8;
  b.first = first;
  b.ptr = base;
  b.idx = static_cast<Address>(base + align8((r1 - r0 + 1) * 4ull));
  b.val = static_cast<Address>(b.idx + align8(nnz * b.ib));
  for (std::uint32_t r = r0; r <= r1; ++r) spm.write(b.ptr + (r - r0) * 4, 4, m.row_ptr[r]);
  for (std::uint32_t e = first; e < m.row_ptr[r1]; ++e) {
    spm.write(b.idx_at(e), b.ib, m.col_idx[e]);
    spm.write(b.val_at(e), 8, m.values[e]);
  }
  return b;
}

}  // namespace

CsrMatrix golden_spmspm(const CsrMatrix& a, const CsrMatrix& b) {
  check(a, b);
  const CsrMatrix bt = b.transposed();
  CsrMatrix c;
  c.rows = a.rows;
  c.cols = b.cols;
  c.format = Format::FP64;
  c.index_width = min_index_width(b.cols);
  c.row_ptr.assign(static_cast<std::size_t>(a.rows) + 1, 0);
  for (std::uint32_t i = 0; i < a.rows; ++i) {
    for (std::uint32_t j = 0; j < bt.rows; ++j) {
      std::uint32_t p = a.row_ptr[i], q = bt.row_ptr[j];
      bool any = false;
      std::uint64_t acc = 0;
      while (p < a.row_ptr[i + 1] && q < bt.row_ptr[j + 1]) {
        if (a.col_idx[p] == bt.col_idx[q]) {
          acc = madd(Format::FP64, a.values[p], bt.values[q], acc, !any);
          any = true;
          ++p;
          ++q;
        } else if (a.col_idx[p] < bt.col_idx[q]) {
          ++p;
        } else {
          ++q;
        }
      }
      if (any) {
        c.col_idx.push_back(j);
        c.values.push_back(acc);
      }
    }
    c.row_ptr[i + 1] = static_cast<std::uint32_t>(c.col_idx.size());
  }
  return c;
}

SpmspmResult spmspm(const CsrMatrix& a, const CsrMatrix& b, Variant v, const KernelOptions& opt) {
  check_options(opt);
  check(a, b);
  if (a.rows == 0 || b.cols == 0) throw ConfigError("spmspm: empty operand");
  // The transpose is prepared outside the timed region.
  const CsrMatrix bt = b.transposed();
  const std::uint64_t spm_bytes = opt.cluster.spm_bytes;
  const std::uint64_t budget = (spm_bytes / 8) & ~std::uint64_t{7};
  const std::vector<std::uint32_t> b_bounds = split(bt, budget, 0, "right column");
  const int out_ib = min_index_width(b.cols) / 8;

  // Upper bound on stored entries of each output row within one column block.
  std::vector<std::uint64_t> row_work(a.rows, 0);
  for (std::uint32_t i = 0; i < a.rows; ++i)
    for (std::uint32_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) row_work[i] += b.row_nnz(a.col_idx[e]);
  auto c_capacity = [&](std::uint32_t i, std::uint32_t c0, std::uint32_t c1) {
    return std::min<std::uint64_t>(row_work[i], c1 - c0);
  };
  auto footprint = [&](std::uint32_t r0, std::uint32_t r1, std::uint32_t c0, std::uint32_t c1) {
    std::uint64_t cap = 0;
    for (std::uint32_t i = r0; i < r1; ++i) cap += c_capacity(i, c0, c1);
    const std::uint64_t c_bytes = align8(cap * 8) + align8(cap * out_ib) + align8((r1 - r0) * 4ull);
    return 2 * (block_bytes(a, r0, r1) + block_bytes(bt, c0, c1) + c_bytes);
  };

  std::vector<std::uint32_t> a_bounds;
  if (opt.tile > 0) {
    a_bounds = split(a, spm_bytes, opt.tile, "left row");
  } else {
    // Shrink the row blocks until every tile, output included, fits.
    for (std::uint64_t a_budget = budget;; a_budget /= 2) {
      a_bounds.assign(1, 0);
      while (a_bounds.back() < a.rows) {
        std::uint32_t r1 = a_bounds.back() + 1;
        while (r1 < a.rows && block_bytes(a, a_bounds.back(), r1 + 1) <= a_budget) ++r1;
        a_bounds.push_back(r1);
      }
      bool fits = true;
      for (std::size_t i = 0; fits && i + 1 < a_bounds.size(); ++i)
        for (std::size_t j = 0; fits && j + 1 < b_bounds.size(); ++j)
          fits = footprint(a_bounds[i], a_bounds[i + 1], b_bounds[j], b_bounds[j + 1]) <= spm_bytes;
      if (fits || a_bounds.size() == a.rows + 1u) break;
    }
  }

  const TraceCosts& c = opt.costs;
  const int nw = opt.cluster.n_workers;
  const Format f = Format::FP64;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> rows(a.rows);
  TileRun run(opt);
  auto builders = make_builders(opt);
  std::size_t tile_no = 0;

  for (std::size_t ab = 0; ab + 1 < a_bounds.size(); ++ab) {
    const std::uint32_t r0 = a_bounds[ab], r1 = a_bounds[ab + 1];
    for (std::size_t bb = 0; bb + 1 < b_bounds.size(); ++bb, ++tile_no) {
      const std::uint32_t c0 = b_bounds[bb], c1 = b_bounds[bb + 1];
      std::uint64_t c_cap = 0;
      std::vector<std::uint64_t> row_cap(r1 - r0);
      for (std::uint32_t i = r0; i < r1; ++i) {
        row_cap[i - r0] = c_capacity(i, c0, c1);
        c_cap += row_cap[i - r0];
      }
      const std::uint64_t need = footprint(r0, r1, c0, c1);
      if (need > spm_bytes) {
        throw PlanningError("spmspm: tile of rows " + std::to_string(r0) + ".." + std::to_string(r1 - 1) +
                            " needs " + std::to_string(need) + " bytes double-buffered, " +
                            std::to_string(spm_bytes) + " available");
      }
      const Address base = static_cast<Address>((tile_no % 2) * (spm_bytes / 2));
      Spm spm(spm_bytes);
      const Block ba = place(spm, base, a, r0, r1);
      const Address b_base = static_cast<Address>(base + block_bytes(a, r0, r1));
      const Block bc = place(spm, b_base, bt, c0, c1);
      const Address cv_base = static_cast<Address>(b_base + block_bytes(bt, c0, c1));
      const Address ci_base = static_cast<Address>(cv_base + align8(c_cap * 8));
      const Address cn_base = static_cast<Address>(ci_base + align8(c_cap * out_ib));
      std::uint64_t c_used = 0;
      std::uint64_t c_stored = 0;

      for (std::uint32_t i = r0; i < r1; ++i) {
        TraceBuilder& tb = builders[(i - r0) % nw];
        const std::uint32_t a0 = a.row_ptr[i], a1 = a.row_ptr[i + 1];
        const std::uint64_t slot0 = c_used;
        std::uint64_t stored = 0;
        tb.load(ba.ptr + (i - r0) * 4);
        tb.load(ba.ptr + (i - r0) * 4 + 4);
        tb.int_op(c.loop_overhead);
        if (a0 != a1) {
          for (std::uint32_t j = c0; j < c1; ++j) {
            const std::uint32_t b0 = bt.row_ptr[j], b1 = bt.row_ptr[j + 1];
            tb.load(bc.ptr + (j - c0) * 4);
            tb.load(bc.ptr + (j - c0) * 4 + 4);
            if (b0 == b1) {
              tb.int_op(c.loop_overhead);
              continue;
            }
            // Functional merge through the stream unit, then the slot replay.
            streams::MergeConfig mc;
            mc.mode = streams::MergeMode::Intersect;
            mc.left = {ba.idx_at(a0), a.index_width, a1 - a0};
            mc.right = {bc.idx_at(b0), bt.index_width, b1 - b0};
            const streams::MergeResult merged = streams::merge_streams(mc, spm);
            std::uint64_t acc = 0;
            for (std::size_t m = 0; m < merged.items.size(); ++m) {
              const std::uint32_t p = a0 + *merged.items[m].left_pos;
              const std::uint32_t q = b0 + *merged.items[m].right_pos;
              acc = madd(f, spm.read(ba.val_at(p), 8), spm.read(bc.val_at(q), 8), acc, m == 0);
            }

            const Address out_v = static_cast<Address>(cv_base + (slot0 + stored) * 8);
            const Address out_i = static_cast<Address>(ci_base + (slot0 + stored) * out_ib);
            std::uint32_t p = a0, q = b0;
            bool any = false;
            std::uint64_t comparisons = 0;
            if (v == Variant::Su) {
              tb.su_config(4 * c.su_setup);
              tb.int_op(c.loop_setup);
              tb.loop_begin();
              WordFetch fa, fb;
              while (p < a1 && q < b1) {
                ++comparisons;
                Slot s = Slot::of(SlotKind::Comparison, f);
                if (fa.touch(ba.idx_at(p))) s.with(ba.idx_at(p));
                if (fb.touch(bc.idx_at(q))) s.with(bc.idx_at(q));
                const std::uint32_t x = a.col_idx[p], y = bt.col_idx[q];
                if (x == y) {
                  s.fused_fma = true;
                  s.with(ba.val_at(p)).with(bc.val_at(q));
                  if (any) {
                    tb.fpu(s, 0, {0});
                  } else {
                    tb.fpu(s, 0);
                  }
                  any = true;
                  ++p;
                  ++q;
                } else {
                  tb.push(s);
                  (x < y ? p : q)++;
                }
              }
              tb.loop_end();
              if (any) tb.consume(Slot::of(SlotKind::Store).with(out_v).with(out_i), 0);
              tb.int_op(c.loop_overhead);
            } else {
              tb.int_op(c.dot_setup);
              tb.load(ba.idx_at(p));
              tb.load(bc.idx_at(q));
              while (p < a1 && q < b1) {
                ++comparisons;
                tb.push(Slot::of(SlotKind::Comparison, f));
                tb.int_op();
                tb.stall(c.branch_penalty);
                const std::uint32_t x = a.col_idx[p], y = bt.col_idx[q];
                if (x == y) {
                  tb.load(ba.val_at(p));
                  tb.load(bc.val_at(q));
                  if (any) {
                    tb.fpu(Slot::of(SlotKind::FpuFma, f), 0, {0});
                  } else {
                    tb.fpu(Slot::of(SlotKind::FpuFma, f), 0);
                  }
                  any = true;
                  ++p;
                  ++q;
                  tb.int_op();
                  if (p < a1) tb.load(ba.idx_at(p)); else tb.int_op();
                  tb.int_op();
                  if (q < b1) tb.load(bc.idx_at(q)); else tb.int_op();
                } else if (x < y) {
                  ++p;
                  tb.int_op();
                  if (p < a1) tb.load(ba.idx_at(p)); else tb.int_op();
                } else {
                  ++q;
                  tb.int_op();
                  if (q < b1) tb.load(bc.idx_at(q)); else tb.int_op();
                }
                tb.int_op();
              }
              if (any) {
                tb.consume(Slot::of(SlotKind::Store).with(out_v), 0);
                tb.push(Slot::of(SlotKind::Store).with(out_i));
                tb.int_op();
              }
              tb.int_op(c.loop_overhead);
            }
            if (comparisons != merged.comparisons || any != !merged.items.empty())
              throw std::logic_error("spmspm: slot replay disagrees with the merge stream");
            if (any) {
              spm.write(out_v, 8, acc);
              spm.write(out_i, out_ib, j);
              rows[i].emplace_back(j, spm.read(out_v, 8));
              ++stored;
            }
          }
        }
        spm.write(static_cast<Address>(cn_base + (i - r0) * 4), 4, stored);
        c_used += row_cap[i - r0];
        c_stored += stored;
      }

      std::vector<DmaRequest> in, dout;
      if (bb == 0) {
        add_dma(in, (r1 - r0 + 1) * 4ull);
        add_dma(in, (a.row_ptr[r1] - a.row_ptr[r0]) * (a.index_width / 8ull));
        add_dma(in, (a.row_ptr[r1] - a.row_ptr[r0]) * 8ull);
      }
      add_dma(in, (c1 - c0 + 1) * 4ull);
      add_dma(in, (bt.row_ptr[c1] - bt.row_ptr[c0]) * (bt.index_width / 8ull));
      add_dma(in, (bt.row_ptr[c1] - bt.row_ptr[c0]) * 8ull);
      add_dma_out(dout, c_stored * 8);
      add_dma_out(dout, c_stored * out_ib);
      add_dma_out(dout, (r1 - r0) * 4ull);
      run.add(take_all(builders), std::move(in), std::move(dout));
    }
  }

  // Compaction into CSR is untimed.
  SpmspmResult res;
  res.out.rows = a.rows;
  res.out.cols = b.cols;
  res.out.format = f;
  res.out.index_width = out_ib * 8;
  res.out.row_ptr.assign(static_cast<std::size_t>(a.rows) + 1, 0);
  for (std::uint32_t i = 0; i < a.rows; ++i) {
    for (const auto& [j, val] : rows[i]) {
      res.out.col_idx.push_back(j);
      res.out.values.push_back(val);
    }
    res.out.row_ptr[i + 1] = static_cast<std::uint32_t>(res.out.col_idx.size());
  }
  res.report = run.finish(f);
  res.traces = run.take_traces();
  return res;
}

}  // namespace clustersim::kernels
