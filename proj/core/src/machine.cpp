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

#include "clustersim/machine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "clustersim/errors.hpp"

namespace clustersim::machine {

void ClusterConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw ConfigError(std::string("cluster config: ") + name + " must be positive");
  };
  positive(n_workers, "n_workers");
  positive(static_cast<double>(spm_bytes), "spm_bytes");
  positive(spm_banks, "spm_banks");
  positive(freq_hz, "freq_hz");
  positive(group_bw_bytes_per_s, "group_bw_bytes_per_s");
  positive(n_clusters_per_group, "n_clusters_per_group");
  positive(n_groups_per_chiplet, "n_groups_per_chiplet");
  positive(n_chiplets, "n_chiplets");
  positive(cluster_port_bytes_per_cycle, "cluster_port_bytes_per_cycle");
  positive(fpu_latency, "fpu_latency");
  if (active_clusters_per_group < 1 || active_clusters_per_group > n_clusters_per_group)
    throw ConfigError("cluster config: active_clusters_per_group must be in 1..n_clusters_per_group");
  if (dma_startup_cycles < 0) throw ConfigError("cluster config: dma_startup_cycles must be non-negative");
  if (spm_bytes > std::numeric_limits<Address>::max())
    throw ConfigError("cluster config: spm_bytes exceeds the 32-bit address space");
}

double chip_peak_flops(const ClusterConfig& cfg, Format f) {
  return static_cast<double>(cfg.total_workers()) * 2.0 * minifloat::lanes(f) * cfg.freq_hz;
}

const char* to_string(SlotKind k) {
  switch (k) {
    case SlotKind::IntOp: return "INT_OP";
    case SlotKind::Load: return "LOAD";
    case SlotKind::Store: return "STORE";
    case SlotKind::FpuFma: return "FPU_FMA";
    case SlotKind::FpuSdotp: return "FPU_SDOTP";
    case SlotKind::FpuAdd3: return "FPU_ADD3";
    case SlotKind::FpuAdd: return "FPU_ADD";
    case SlotKind::SuConfig: return "SU_CONFIG";
    case SlotKind::Comparison: return "COMPARISON";
    case SlotKind::Stall: return "STALL";
    case SlotKind::LoopBegin: return "LOOP_BEGIN";
    case SlotKind::LoopEnd: return "LOOP_END";
  }
  return "?";
}

Slot& Slot::with(Address a) {
  if (n_access >= access.size()) throw ConfigError("slot: more than four SPM accesses");
  access[n_access++] = a;
  return *this;
}

bool is_fpu(SlotKind k) {
  return k == SlotKind::FpuFma || k == SlotKind::FpuSdotp || k == SlotKind::FpuAdd3 || k == SlotKind::FpuAdd;
}

bool loop_legal(SlotKind k) { return is_fpu(k) || k == SlotKind::Comparison || k == SlotKind::Stall; }

std::uint64_t slot_flops(const Slot& s) {
  const std::uint64_t l = minifloat::lanes(s.format);
  switch (s.kind) {
    case SlotKind::FpuFma:
    case SlotKind::FpuSdotp:
    case SlotKind::FpuAdd3: return 2 * l;
    case SlotKind::FpuAdd: return l;
    case SlotKind::Comparison: return s.fused_fma ? 2 * l : 0;
    default: return 0;
  }
}

void IssueTrace::validate() const {
  bool in_loop = false;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const SlotKind k = slots[i].kind;
    if (k == SlotKind::LoopBegin) {
      if (in_loop) throw ConfigError("issue trace: nested hardware loop at slot " + std::to_string(i));
      in_loop = true;
    } else if (k == SlotKind::LoopEnd) {
      if (!in_loop) throw ConfigError("issue trace: loop end without begin at slot " + std::to_string(i));
      in_loop = false;
    } else if (in_loop && !loop_legal(k)) {
      throw ConfigError(std::string("issue trace: ") + to_string(k) + " inside hardware loop at slot " +
                        std::to_string(i));
    }
  }
  if (in_loop) throw ConfigError("issue trace: unterminated hardware loop");
}

namespace {

// Per-cycle bank arbitration over a reusable scratch table.
class Arbiter {
 public:
  Arbiter(int banks, int workers) : best_(banks, kNone), served_(banks, 0), workers_(workers) {}

  // Adds one stall per losing access to `stalls[worker]`; returns the total.
  std::uint64_t resolve(std::span<const SpmAccess> acc, const ClusterConfig& cfg, int priority,
                        std::span<std::uint32_t> stalls) {
    for (const SpmAccess& a : acc) {
      const int b = bank_of(a.addr, cfg);
      best_[b] = std::min(best_[b], key(a.worker, priority));
    }
    std::uint64_t total = 0;
    for (const SpmAccess& a : acc) {
      const int b = bank_of(a.addr, cfg);
      if (!served_[b] && key(a.worker, priority) == best_[b]) {
        served_[b] = 1;
      } else {
        ++stalls[a.worker];
        ++total;
      }
    }
    for (const SpmAccess& a : acc) {
      const int b = bank_of(a.addr, cfg);
      best_[b] = kNone;
      served_[b] = 0;
    }
    return total;
  }

 private:
  static constexpr int kNone = std::numeric_limits<int>::max();
  int key(int worker, int priority) const { return ((worker - priority) % workers_ + workers_) % workers_; }

  std::vector<int> best_;
  std::vector<std::uint8_t> served_;
  int workers_;
};

}  // namespace

ContentionResult spm_contention(std::span<const SpmAccess> accesses, const ClusterConfig& cfg, int priority) {
  int workers = cfg.n_workers;
  for (const SpmAccess& a : accesses) {
    if (a.worker < 0) throw ConfigError("spm_contention: negative worker id");
    workers = std::max(workers, a.worker + 1);
  }
  ContentionResult r;
  r.per_worker.assign(workers, 0);
  Arbiter arb(cfg.spm_banks, workers);
  r.stalls = arb.resolve(accesses, cfg, priority, r.per_worker);
  return r;
}

ClusterStats simulate_cluster(std::span<const IssueTrace> traces, const ClusterConfig& cfg) {
  cfg.validate();
  for (const IssueTrace& t : traces) t.validate();
  const int n = static_cast<int>(traces.size());
  ClusterStats out;
  out.workers.resize(n);
  if (n == 0) return out;

  std::vector<std::size_t> pc(n, 0);
  std::vector<std::uint32_t> pending(n, 0);
  std::vector<std::uint8_t> finished(n, 0);
  std::vector<SpmAccess> accesses;
  accesses.reserve(static_cast<std::size_t>(n) * 4);
  Arbiter arb(cfg.spm_banks, n);

  std::uint64_t cycle = 0;
  int remaining = n;
  while (remaining > 0) {
    accesses.clear();
    for (int w = 0; w < n; ++w) {
      if (finished[w]) continue;
      WorkerStats& ws = out.workers[w];
      if (pending[w] > 0) {
        --pending[w];
        ++ws.conflict_stalls;
        continue;
      }
      const std::vector<Slot>& slots = traces[w].slots;
      while (pc[w] < slots.size() &&
             (slots[pc[w]].kind == SlotKind::LoopBegin || slots[pc[w]].kind == SlotKind::LoopEnd)) {
        ++pc[w];
      }
      if (pc[w] == slots.size()) {
        finished[w] = 1;
        ws.cycles = cycle;
        --remaining;
        continue;
      }
      const Slot& s = slots[pc[w]++];
      ++ws.issued;
      ++ws.by_kind[static_cast<int>(s.kind)];
      const std::uint64_t f = slot_flops(s);
      ws.flops += f;
      if (is_fpu(s.kind) || (s.kind == SlotKind::Comparison && s.fused_fma)) ++ws.fpu_full_width;
      if (s.kind == SlotKind::Comparison) ++ws.comparisons;
      for (int k = 0; k < s.n_access; ++k) accesses.push_back({w, s.access[k]});
    }
    if (remaining == 0) break;
    if (!accesses.empty()) arb.resolve(accesses, cfg, static_cast<int>(cycle % n), pending);
    ++cycle;
  }

  for (const WorkerStats& ws : out.workers) {
    out.cycles = std::max(out.cycles, ws.cycles);
    out.flops += ws.flops;
    out.comparisons += ws.comparisons;
    out.conflict_stalls += ws.conflict_stalls;
  }
  return out;
}

WorkerStats simulate_worker(const IssueTrace& trace, const ClusterConfig& cfg) {
  return simulate_cluster(std::span<const IssueTrace>(&trace, 1), cfg).workers.front();
}

double worker_fpu_util(const WorkerStats& s, Format f) {
  if (s.cycles == 0) return 0.0;
  return static_cast<double>(s.flops) / (2.0 * minifloat::lanes(f) * static_cast<double>(s.cycles));
}

void DmaRequest::validate() const {
  if (rows == 0 || row_bytes == 0) throw ConfigError("dma request: zero-byte transfer");
  if (kind == DmaKind::D1 && rows != 1) throw ConfigError("dma request: 1D transfer with more than one row");
  if (src == dst) throw ConfigError("dma request: source and destination are the same memory");
}

double dma_bytes_per_cycle(const ClusterConfig& cfg, int active) {
  if (active < 1) throw ConfigError("dma: active cluster count must be positive");
  const double share = cfg.group_bw_bytes_per_s / cfg.freq_hz / active;
  return std::min(static_cast<double>(cfg.cluster_port_bytes_per_cycle), share);
}

std::uint64_t dma_cycles(const DmaRequest& req, const ClusterConfig& cfg, int active) {
  req.validate();
  const double bpc = dma_bytes_per_cycle(cfg, active);
  const auto transfer = static_cast<std::uint64_t>(std::ceil(static_cast<double>(req.total_bytes()) / bpc));
  const bool short_rows =
      req.kind == DmaKind::D2 && req.row_bytes < static_cast<std::uint64_t>(cfg.cluster_port_bytes_per_cycle);
  const std::uint64_t startups = short_rows ? req.rows : 1;
  return transfer + startups * static_cast<std::uint64_t>(cfg.dma_startup_cycles);
}

OverlapResult overlap_schedule(std::span<const TilePhase> tiles) {
  if (tiles.empty()) throw ConfigError("overlap_schedule: at least one tile required");
  OverlapResult r;
  const std::size_t n = tiles.size();
  r.overlapped = tiles.front().dma_in + tiles.back().dma_out;
  for (std::size_t t = 0; t < n; ++t) {
    const std::uint64_t next_in = t + 1 < n ? tiles[t + 1].dma_in : 0;
    const std::uint64_t prev_out = t > 0 ? tiles[t - 1].dma_out : 0;
    r.overlapped += std::max(tiles[t].compute, next_in + prev_out);
    r.serial += tiles[t].dma_in + tiles[t].compute + tiles[t].dma_out;
  }
  return r;
}

KernelReport build_report(Format f, std::vector<TileCost> tiles, std::uint64_t flops, std::uint64_t comparisons,
                          const ClusterConfig& cfg, int active, std::uint64_t conflict_stalls) {
  cfg.validate();
  KernelReport r;
  r.format = f;
  r.flops = flops;
  r.comparisons = comparisons;
  r.conflict_stalls = conflict_stalls;
  r.active_clusters = active;
  std::vector<TilePhase> phases;
  phases.reserve(tiles.size());
  for (const TileCost& t : tiles) {
    TilePhase p;
    p.compute = t.compute_cycles;
    for (const DmaRequest& q : t.dma_in) {
      p.dma_in += dma_cycles(q, cfg, active);
      r.dma_bytes += q.total_bytes();
    }
    for (const DmaRequest& q : t.dma_out) {
      p.dma_out += dma_cycles(q, cfg, active);
      r.dma_bytes += q.total_bytes();
    }
    r.compute_cycles += p.compute;
    r.dma_cycles += p.dma_in + p.dma_out;
    phases.push_back(p);
  }
  if (!phases.empty()) {
    const OverlapResult o = overlap_schedule(phases);
    r.overlap_total_cycles = o.overlapped;
    r.serial_total_cycles = o.serial;
  }
  r.cycles = r.overlap_total_cycles;
  r.tiles = std::move(tiles);
  if (r.cycles > 0) {
    const double worker_cycles = static_cast<double>(cfg.n_workers) * static_cast<double>(r.cycles);
    r.fpu_util = static_cast<double>(flops) / (2.0 * minifloat::lanes(f) * worker_cycles);
    r.comp_util = static_cast<double>(comparisons) / worker_cycles;
  }
  r.chip_gflops = r.fpu_util * chip_peak_flops(cfg, f) / 1e9;
  r.chip_gcomps = r.comp_util * cfg.total_workers() * cfg.freq_hz / 1e9;
  return r;
}

KernelReport scale_to_chip(const KernelReport& cluster, const ClusterConfig& cfg) {
  return build_report(cluster.format, cluster.tiles, cluster.flops, cluster.comparisons, cfg,
                      cfg.n_clusters_per_group, cluster.conflict_stalls);
}

}  // namespace clustersim::machine
