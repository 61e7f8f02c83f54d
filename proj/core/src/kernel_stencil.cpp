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
#include <cstdlib>
#include <set>
#include <tuple>

#include "kernel_common.hpp"

namespace clustersim::kernels {

using namespace detail;

int StencilSpec::radius() const {
  int r = 0;
  for (const Tap& t : taps) r = std::max({r, std::abs(t.dz), std::abs(t.dy), std::abs(t.dx)});
  return r;
}

void StencilSpec::validate() const {
  if (taps.empty()) throw ConfigError("stencil '" + name + "': no taps");
  if (radius() > 4) throw ConfigError("stencil '" + name + "': radius above 4");
  std::set<std::tuple<int, int, int>> seen;
  for (const Tap& t : taps) {
    if (!seen.insert({t.dz, t.dy, t.dx}).second) throw ConfigError("stencil '" + name + "': duplicate tap");
  }
}

std::vector<std::string> StencilSpec::names() { return {"j3d27pt", "star7", "star13", "box27"}; }

StencilSpec StencilSpec::by_name(const std::string& name) {
  StencilSpec s;
  s.name = name;
  if (name == "j3d27pt" || name == "box27") {
    // j3d27pt weights by distance class: 1/2, 1/16, 1/128, 1/256 (sum 1).
    static constexpr double kWeight[] = {0.5, 1.0 / 16, 1.0 / 128, 1.0 / 256};
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const double c = name == "box27" ? 1.0 / 27 : kWeight[std::abs(dz) + std::abs(dy) + std::abs(dx)];
          s.taps.push_back({dz, dy, dx, c});
        }
    return s;
  }
  if (name == "star7" || name == "star13") {
    const int reach = name == "star7" ? 1 : 2;
    const double arm = name == "star7" ? 1.0 / 8 : 1.0 / 16;
    s.taps.push_back({0, 0, 0, 0.25});
    for (int axis = 0; axis < 3; ++axis) {
      for (int d = 1; d <= reach; ++d) {
        for (int sign : {-1, 1}) {
          Tap t{0, 0, 0, arm};
          (axis == 0 ? t.dz : axis == 1 ? t.dy : t.dx) = sign * d;
          s.taps.push_back(t);
        }
      }
    }
    return s;
  }
  throw ConfigError("unknown stencil '" + name + "'");
}

namespace {

struct Geometry {
  std::size_t nz, ny, nx;  // full grid
  std::size_t iz, iy, ix;  // interior extents
  int r;
  std::size_t pitch;  // padded row pitch in elements
  int index_width;
  std::vector<std::uint32_t> offsets;

  std::uint64_t in_bytes(std::size_t depth) const { return (depth + 2 * r) * ny * pitch * 8; }
  std::uint64_t out_bytes(std::size_t depth) const { return depth * iy * ix * 8; }
  std::uint64_t index_bytes() const { return align8(offsets.size() * (index_width / 8)); }
  std::uint64_t footprint(std::size_t depth) const {
    return 2 * (align8(in_bytes(depth)) + align8(out_bytes(depth))) + index_bytes();
  }
};

Geometry plan(const StencilSpec& spec, const DenseTensor& grid) {
  spec.validate();
  if (grid.dims.size() != 3) throw ConfigError("stencil: grid must be 3-dimensional");
  if (grid.format != Format::FP64) throw ConfigError("stencil: only FP64 grids are supported");
  Geometry g;
  g.r = spec.radius();
  g.nz = grid.dims[0];
  g.ny = grid.dims[1];
  g.nx = grid.dims[2];
  const std::size_t halo = 2 * static_cast<std::size_t>(g.r);
  if (g.nz <= halo || g.ny <= halo || g.nx <= halo)
    throw ConfigError("stencil: grid must exceed the stencil halo on every side");
  g.iz = g.nz - halo;
  g.iy = g.ny - halo;
  g.ix = g.nx - halo;
  // An odd pitch keeps vertically adjacent points off the same bank.
  g.pitch = g.nx | 1;
  std::uint64_t max_off = 0;
  for (const Tap& t : spec.taps) {
    const std::uint64_t off = ((static_cast<std::uint64_t>(t.dz + g.r) * g.ny) + (t.dy + g.r)) * g.pitch + (t.dx + g.r);
    max_off = std::max(max_off, off);
    g.offsets.push_back(static_cast<std::uint32_t>(off));
  }
  g.index_width = max_off < 65536 ? 16 : 32;
  return g;
}

}  // namespace

DenseTensor golden_stencil(const StencilSpec& spec, const DenseTensor& grid) {
  const Geometry g = plan(spec, grid);
  DenseTensor out = grid;
  const Format f = Format::FP64;
  std::vector<std::uint64_t> coeff;
  for (const Tap& t : spec.taps) coeff.push_back(minifloat::encode(f, t.coeff).raw());
  for (std::size_t z = g.r; z < g.nz - g.r; ++z)
    for (std::size_t y = g.r; y < g.ny - g.r; ++y)
      for (std::size_t x = g.r; x < g.nx - g.r; ++x) {
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < spec.taps.size(); ++k) {
          const Tap& t = spec.taps[k];
          const std::uint64_t v = grid.at(z + t.dz, y + t.dy, x + t.dx);
          acc = madd(f, coeff[k], v, acc, k == 0);
        }
        out.at(z, y, x) = acc;
      }
  return out;
}

StencilResult stencil(const StencilSpec& spec, const DenseTensor& grid, Variant v, const KernelOptions& opt) {
  check_options(opt);
  const Geometry g = plan(spec, grid);
  const Format f = Format::FP64;
  const std::uint64_t spm_bytes = opt.cluster.spm_bytes;

  std::size_t depth = 0;
  if (opt.tile > 0) {
    depth = std::min<std::size_t>(opt.tile, g.iz);
    if (g.footprint(depth) > spm_bytes) {
      throw PlanningError("stencil: a tile of " + std::to_string(depth) + " planes needs " +
                          std::to_string(g.footprint(depth)) + " bytes of scratchpad, " +
                          std::to_string(spm_bytes) + " available");
    }
  } else {
    std::size_t max_depth = 0;
    while (max_depth < g.iz && g.footprint(max_depth + 1) <= spm_bytes) ++max_depth;
    if (max_depth == 0) {
      throw PlanningError("stencil: a single plane needs " + std::to_string(g.footprint(1)) +
                          " bytes of scratchpad, " + std::to_string(spm_bytes) + " available");
    }
    const std::size_t n_tiles = (g.iz + max_depth - 1) / max_depth;
    depth = (g.iz + n_tiles - 1) / n_tiles;
  }

  SpmLayout layout(spm_bytes);
  const Address idx_base = layout.alloc(g.index_bytes());
  Address in_buf[2], out_buf[2];
  for (int b = 0; b < 2; ++b) {
    in_buf[b] = layout.alloc(g.in_bytes(depth));
    out_buf[b] = layout.alloc(g.out_bytes(depth));
  }

  std::vector<std::uint64_t> coeff;
  for (const Tap& t : spec.taps) coeff.push_back(minifloat::encode(f, t.coeff).raw());
  const std::size_t n_taps = spec.taps.size();
  const int ib = g.index_width / 8;
  const TraceCosts& c = opt.costs;
  const int nw = opt.cluster.n_workers;

  DenseTensor out = grid;
  TileRun run(opt);
  auto builders = make_builders(opt);
  std::size_t tile_no = 0;
  for (std::size_t z0 = 0; z0 < g.iz; z0 += depth, ++tile_no) {
    const std::size_t d = std::min(depth, g.iz - z0);
    const Address in_base = in_buf[tile_no % 2];
    const Address out_base = out_buf[tile_no % 2];

    Spm spm(spm_bytes);
    for (std::size_t k = 0; k < n_taps; ++k) spm.write(static_cast<Address>(idx_base + k * ib), ib, g.offsets[k]);
    for (std::size_t z = 0; z < d + 2 * g.r; ++z)
      for (std::size_t y = 0; y < g.ny; ++y)
        for (std::size_t x = 0; x < g.nx; ++x)
          spm.write(static_cast<Address>(in_base + ((z * g.ny + y) * g.pitch + x) * 8), 8, grid.at(z0 + z, y, x));

    const std::size_t lines = d * g.iy;
    for (std::size_t line = 0; line < lines; ++line) {
      TraceBuilder& tb = builders[line % nw];
      const std::size_t zl = line / g.iy;
      const std::size_t yl = line % g.iy;
      tb.int_op(c.loop_overhead);
      if (v == Variant::Su) tb.su_config(c.su_setup);
      for (std::size_t x0 = 0; x0 < g.ix; x0 += 4) {
        const std::uint32_t block = static_cast<std::uint32_t>(std::min<std::size_t>(4, g.ix - x0));
        const Address corner = static_cast<Address>(in_base + ((zl * g.ny + yl) * g.pitch + x0) * 8);
        const Address out_at = static_cast<Address>(out_base + ((zl * g.iy + yl) * g.ix + x0) * 8);
        std::uint64_t acc[4] = {};
        if (v == Variant::Su) {
          streams::IndirectConfig ic;
          ic.index = {idx_base, g.index_width, static_cast<std::uint32_t>(n_taps)};
          ic.data_base = corner;
          ic.elem_bytes = 8;
          ic.index_shift = 3;
          ic.block = block;
          const std::vector<Address> addr = streams::indirect_addresses(ic, spm);
          tb.su_config(c.su_setup);
          tb.int_op(c.loop_setup);
          tb.loop_begin();
          WordFetch idx_fetch;
          for (std::size_t t = 0; t < n_taps; ++t) {
            for (std::uint32_t k = 0; k < block; ++k) {
              const Address a = addr[t * block + k];
              acc[k] = madd(f, coeff[t], spm.read(a, 8), acc[k], t == 0);
              Slot s = Slot::of(SlotKind::FpuFma, f).with(a);
              if (k == 0 && idx_fetch.touch(static_cast<Address>(idx_base + t * ib))) s.with(static_cast<Address>(idx_base + t * ib));
              if (t + 1 == n_taps) s.with(static_cast<Address>(out_at + k * 8));
              if (t == 0) {
                tb.fpu(s, static_cast<int>(k));
              } else {
                tb.fpu(s, static_cast<int>(k), {static_cast<int>(k)});
              }
            }
          }
          tb.loop_end();
          for (std::uint32_t k = 0; k < block; ++k) spm.write(static_cast<Address>(out_at + k * 8), 8, acc[k]);
        } else {
          for (std::uint32_t k = 0; k < block; ++k) {
            for (std::size_t t = 0; t < n_taps; ++t) {
              const Address a = static_cast<Address>(corner + (k + static_cast<std::uint64_t>(g.offsets[t])) * 8);
              acc[k] = madd(f, coeff[t], spm.read(a, 8), acc[k], t == 0);
              tb.int_op();
              tb.load(a);
              const Slot s = Slot::of(SlotKind::FpuFma, f);
              if (t == 0) {
                tb.fpu(s, 0);
              } else {
                tb.fpu(s, 0, {0});
              }
            }
            tb.consume(Slot::of(SlotKind::Store).with(static_cast<Address>(out_at + k * 8)), 0);
            tb.int_op(c.loop_overhead);
            spm.write(static_cast<Address>(out_at + k * 8), 8, acc[k]);
          }
        }
      }
    }

    for (std::size_t z = 0; z < d; ++z)
      for (std::size_t y = 0; y < g.iy; ++y)
        for (std::size_t x = 0; x < g.ix; ++x)
          out.at(z0 + z + g.r, y + g.r, x + g.r) =
              spm.read(static_cast<Address>(out_base + ((z * g.iy + y) * g.ix + x) * 8), 8);

    std::vector<DmaRequest> in, dout;
    if (tile_no == 0) add_dma(in, g.index_bytes());
    const auto in_rows = static_cast<std::uint32_t>((d + 2 * g.r) * g.ny);
    in.push_back(DmaRequest::d2(in_rows, g.nx * 8));
    dout.push_back(DmaRequest::d2(static_cast<std::uint32_t>(d * g.iy), g.ix * 8, machine::MemSpace::Spm,
                                  machine::MemSpace::Hbm));
    run.add(take_all(builders), std::move(in), std::move(dout));
  }

  StencilResult r;
  r.out = std::move(out);
  r.report = run.finish(f);
  r.traces = run.take_traces();
  return r;
}

}  // namespace clustersim::kernels
