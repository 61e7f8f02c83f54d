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

// B is held in column panels of four 64-bit words: panel p stores rows of
// 32 bytes, so a gathered row is one shifted index plus a four-word block.
constexpr int kPanelWords = 4;
constexpr int kPanelShift = 5;

struct Shape {
  Format f;
  int lanes;
  std::uint32_t m, k, n;
  std::uint32_t words;   // 64-bit words per C row
  std::uint32_t panels;
  int ib, eb;
};

Shape check(const CsrMatrix& a, const DenseTensor& b) {
  a.validate();
  if (b.dims.size() != 2) throw ConfigError("spmm: B must be 2-dimensional");
  if (a.format != b.format) throw ConfigError("spmm: A and B formats differ");
  if (a.cols != b.dims[0]) {
    throw ConfigError("spmm: dimension mismatch, A is " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                      " and B is " + std::to_string(b.dims[0]) + "x" + std::to_string(b.dims[1]));
  }
  Shape s;
  s.f = a.format;
  s.lanes = minifloat::lanes(s.f);
  s.m = a.rows;
  s.k = a.cols;
  s.n = static_cast<std::uint32_t>(b.dims[1]);
  if (s.m == 0) throw ConfigError("spmm: A has no rows");
  if (s.n % s.lanes != 0)
    throw ConfigError("spmm: B columns must be a multiple of the " + std::to_string(s.lanes) + " SIMD lanes");
  s.words = s.n / s.lanes;
  s.panels = (s.words + kPanelWords - 1) / kPanelWords;
  s.ib = a.index_width / 8;
  s.eb = elem_bytes(s.f);
  return s;
}

std::uint64_t lane_of(std::uint64_t word, int lane, int width) {
  const std::uint64_t mask = width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
  return (word >> (lane * width)) & mask;
}

}  // namespace

DenseTensor golden_spmm(const CsrMatrix& a, const DenseTensor& b) {
  const Shape s = check(a, b);
  DenseTensor c({s.m, s.n}, s.f);
  for (std::uint32_t i = 0; i < s.m; ++i)
    for (std::uint32_t j = 0; j < s.n; ++j) {
      std::uint64_t acc = 0;
      for (std::uint32_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e)
        acc = madd(s.f, a.values[e], b.at(a.col_idx[e], j), acc, e == a.row_ptr[i]);
      c.at(i, j) = acc;
    }
  return c;
}

SpmmResult spmm(const CsrMatrix& a, const DenseTensor& b, Variant v, const KernelOptions& opt) {
  check_options(opt);
  const Shape s = check(a, b);
  const std::uint64_t spm_bytes = opt.cluster.spm_bytes;
  const std::uint64_t b_bytes = static_cast<std::uint64_t>(s.panels) * s.k * kPanelWords * 8;

  auto tile_bytes = [&](std::uint32_t r0, std::uint32_t r1) {
    const std::uint64_t nnz = a.row_ptr[r1] - a.row_ptr[r0];
    return align8((r1 - r0 + 1) * 4ull) + align8(nnz * s.ib) + align8(nnz * s.eb) +
           static_cast<std::uint64_t>(r1 - r0) * s.words * 8;
  };
  if (b_bytes >= spm_bytes) {
    throw PlanningError("spmm: B needs " + std::to_string(b_bytes) + " bytes of scratchpad, " +
                        std::to_string(spm_bytes) + " available");
  }
  const std::uint64_t half = ((spm_bytes - b_bytes) / 2) & ~std::uint64_t{7};

  std::vector<std::uint32_t> bounds{0};
  while (bounds.back() < s.m) {
    const std::uint32_t r0 = bounds.back();
    std::uint32_t r1 = r0;
    if (opt.tile > 0) {
      r1 = std::min(s.m, r0 + opt.tile);
    } else {
      while (r1 < s.m && tile_bytes(r0, r1 + 1) <= half) ++r1;
      if (r1 == r0) r1 = r0 + 1;
    }
    if (tile_bytes(r0, r1) > half) {
      throw PlanningError("spmm: rows " + std::to_string(r0) + ".." + std::to_string(r1 - 1) + " need " +
                          std::to_string(tile_bytes(r0, r1)) + " bytes per buffer, " + std::to_string(half) +
                          " available");
    }
    bounds.push_back(r1);
  }

  const Address b_base = 0;
  const Address buf[2] = {static_cast<Address>(b_bytes), static_cast<Address>(b_bytes + half)};
  const TraceCosts& c = opt.costs;
  const int nw = opt.cluster.n_workers;
  const int width = minifloat::width(s.f);

  // Panel-major image of B, identical for every tile.
  Spm b_image(spm_bytes);
  for (std::uint32_t row = 0; row < s.k; ++row)
    for (std::uint32_t q = 0; q < s.words; ++q) {
      std::uint64_t word = 0;
      for (int l = 0; l < s.lanes; ++l) word |= b.at(row, q * s.lanes + l) << (l * width);
      const Address at = b_base + ((q / kPanelWords) * s.k + row) * kPanelWords * 8 + (q % kPanelWords) * 8;
      b_image.write(at, 8, word);
    }

  DenseTensor out({s.m, s.n}, s.f);
  TileRun run(opt);
  auto builders = make_builders(opt);
  for (std::size_t t = 0; t + 1 < bounds.size(); ++t) {
    const std::uint32_t r0 = bounds[t], r1 = bounds[t + 1];
    const std::uint32_t nnz0 = a.row_ptr[r0];
    const std::uint64_t nnz = a.row_ptr[r1] - nnz0;
    const Address ptr_base = buf[t % 2];
    const Address idx_base = static_cast<Address>(ptr_base + align8((r1 - r0 + 1) * 4ull));
    const Address val_base = static_cast<Address>(idx_base + align8(nnz * s.ib));
    const Address c_base = static_cast<Address>(val_base + align8(nnz * s.eb));

    Spm spm = b_image;
    for (std::uint32_t i = r0; i <= r1; ++i) spm.write(ptr_base + (i - r0) * 4, 4, a.row_ptr[i]);
    for (std::uint64_t e = 0; e < nnz; ++e) {
      spm.write(static_cast<Address>(idx_base + e * s.ib), s.ib, a.col_idx[nnz0 + e]);
      spm.write(static_cast<Address>(val_base + e * s.eb), s.eb, a.values[nnz0 + e]);
    }

    for (std::uint32_t i = r0; i < r1; ++i) {
      TraceBuilder& tb = builders[(i - r0) % nw];
      const std::uint32_t e0 = a.row_ptr[i] - nnz0;
      const std::uint32_t r = a.row_nnz(i);
      const Address row_ptr_at = ptr_base + (i - r0) * 4;
      const Address c_row = static_cast<Address>(c_base + static_cast<std::uint64_t>(i - r0) * s.words * 8);
      tb.load(row_ptr_at);
      tb.load(row_ptr_at + 4);
      tb.int_op(c.loop_overhead);

      for (std::uint32_t p = 0; p < s.panels; ++p) {
        const std::uint32_t w = std::min<std::uint32_t>(kPanelWords, s.words - p * kPanelWords);
        const Address panel = b_base + p * s.k * kPanelWords * 8;
        std::vector<std::uint64_t> acc(static_cast<std::size_t>(w) * s.lanes, 0);
        auto accumulate = [&](std::uint32_t e, std::uint32_t j, Address b_addr, Address val_addr) {
          const std::uint64_t av = spm.read(val_addr, s.eb);
          const std::uint64_t word = spm.read(b_addr, 8);
          for (int l = 0; l < s.lanes; ++l) {
            std::uint64_t& x = acc[j * s.lanes + l];
            x = madd(s.f, av, lane_of(word, l, width), x, e == 0);
          }
        };

        if (v == Variant::Su) {
          tb.su_config(3 * c.su_setup);
          if (r > 0) {
            streams::IndirectConfig ic;
            ic.index = {static_cast<Address>(idx_base + e0 * s.ib), a.index_width, r};
            ic.data_base = panel;
            ic.elem_bytes = 8;
            ic.index_shift = kPanelShift;
            ic.block = w;
            const std::vector<Address> gather = streams::indirect_addresses(ic, spm);
            streams::AffineConfig vc;
            vc.base = static_cast<Address>(val_base + e0 * s.eb);
            vc.elem_bytes = s.eb;
            vc.rank = 2;
            vc.bounds = {w, r, 1, 1};
            vc.strides = {0, s.eb, 0, 0};
            const std::vector<Address> vals = streams::affine_addresses(vc, spm.size());

            tb.int_op(c.loop_setup);
            tb.loop_begin();
            WordFetch idx_fetch, val_fetch;
            for (std::uint32_t e = 0; e < r; ++e) {
              const Address idx_at = static_cast<Address>(idx_base + (e0 + e) * s.ib);
              for (std::uint32_t j = 0; j < w; ++j) {
                const Address b_addr = gather[e * w + j];
                const Address val_addr = vals[e * w + j];
                accumulate(e, j, b_addr, val_addr);
                Slot sl = Slot::of(SlotKind::FpuFma, s.f).with(b_addr);
                if (val_fetch.touch(val_addr)) sl.with(val_addr);
                if (idx_fetch.touch(idx_at)) sl.with(idx_at);
                if (e == 0) {
                  tb.fpu(sl, static_cast<int>(j));
                } else {
                  tb.fpu(sl, static_cast<int>(j), {static_cast<int>(j)});
                }
              }
            }
            tb.loop_end();
          }
          for (std::uint32_t j = 0; j < w; ++j) {
            const Slot st = Slot::of(SlotKind::Store).with(c_row + (p * kPanelWords + j) * 8);
            if (r > 0) {
              tb.consume(st, static_cast<int>(j));
            } else {
              tb.push(st);
            }
          }
          tb.int_op(c.loop_overhead);
        } else {
          for (std::uint32_t j = 0; j < w; ++j) {
            tb.int_op(c.dot_setup);
            for (std::uint32_t e = 0; e < r; ++e) {
              const Address idx_at = static_cast<Address>(idx_base + (e0 + e) * s.ib);
              const Address val_at = static_cast<Address>(val_base + (e0 + e) * s.eb);
              const auto col = static_cast<std::uint32_t>(spm.read(idx_at, s.ib));
              const Address b_addr = panel + (col << kPanelShift) + j * 8;
              accumulate(e, j, b_addr, val_at);
              tb.load(idx_at);
              tb.int_op();
              tb.load(val_at);
              tb.load(b_addr);
              const Slot sl = Slot::of(SlotKind::FpuFma, s.f);
              if (e == 0) {
                tb.fpu(sl, 0);
              } else {
                tb.fpu(sl, 0, {0});
              }
            }
            const Slot st = Slot::of(SlotKind::Store).with(c_row + (p * kPanelWords + j) * 8);
            if (r > 0) {
              tb.consume(st, 0);
            } else {
              tb.push(st);
            }
            tb.int_op(c.loop_overhead);
          }
        }

        for (std::uint32_t j = 0; j < w; ++j) {
          std::uint64_t word = 0;
          for (int l = 0; l < s.lanes; ++l) word |= acc[j * s.lanes + l] << (l * width);
          spm.write(c_row + (p * kPanelWords + j) * 8, 8, word);
        }
      }
    }

    for (std::uint32_t i = r0; i < r1; ++i)
      for (std::uint32_t q = 0; q < s.words; ++q) {
        const std::uint64_t word = spm.read(static_cast<Address>(c_base + ((i - r0) * s.words + q) * 8ull), 8);
        for (int l = 0; l < s.lanes; ++l) out.at(i, q * s.lanes + l) = lane_of(word, l, width);
      }

    std::vector<DmaRequest> in, dout;
    if (t == 0) add_dma(in, b_bytes);
    add_dma(in, (r1 - r0 + 1) * 4ull);
    add_dma(in, nnz * s.ib);
    add_dma(in, nnz * s.eb);
    add_dma_out(dout, static_cast<std::uint64_t>(r1 - r0) * s.words * 8);
    run.add(take_all(builders), std::move(in), std::move(dout));
  }

  SpmmResult res;
  res.out = std::move(out);
  res.report = run.finish(s.f);
  res.traces = run.take_traces();
  return res;
}

}  // namespace clustersim::kernels
