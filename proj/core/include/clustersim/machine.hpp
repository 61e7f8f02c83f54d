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

// Timing model of one compute cluster: eight single-issue worker cores
// sharing a banked scratchpad, a hardware loop buffer, a DMA engine with
// group-level bandwidth sharing, and analytic scaling to the full chip.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clustersim/minifloat.hpp"
#include "clustersim/streams.hpp"

namespace clustersim::machine {

using minifloat::Format;
using streams::Address;

struct ClusterConfig {
  int n_workers = 8;
  std::uint64_t spm_bytes = 128 * 1024;
  int spm_banks = 32;  ///< 64-bit wide, word interleaved
  double freq_hz = 1.0e9;
  double group_bw_bytes_per_s = 64.0 * 1024 * 1024 * 1024;
  int n_clusters_per_group = 4;
  int n_groups_per_chiplet = 6;
  int n_chiplets = 2;
  /// Clusters of a group moving data concurrently; sets each cluster's fair
  /// share of the group bandwidth.
  int active_clusters_per_group = 4;
  int cluster_port_bytes_per_cycle = 64;  ///< 512-bit data interconnect
  int dma_startup_cycles = 100;
  /// Cycles from FPU issue until a dependent FPU op may issue.
  int fpu_latency = 4;

  int total_clusters() const { return n_chiplets * n_groups_per_chiplet * n_clusters_per_group; }
  int total_workers() const { return total_clusters() * n_workers; }
  /// Workers plus one DMA control core per cluster.
  int total_cores() const { return total_clusters() * (n_workers + 1); }

  void validate() const;
};

/// Chip-wide peak FLOP/s for a format (full-width SIMD FMA on every worker).
double chip_peak_flops(const ClusterConfig& cfg, Format f);

// ---------------------------------------------------------------------------
// Issue traces

enum class SlotKind : std::uint8_t {
  IntOp,
  Load,
  Store,
  FpuFma,
  FpuSdotp,
  FpuAdd3,
  FpuAdd,
  SuConfig,
  Comparison,
  Stall,
  LoopBegin,  ///< start of a hardware-loop region (zero cost)
  LoopEnd,
};
inline constexpr int kSlotKinds = 12;
const char* to_string(SlotKind k);

/// One issue slot. Up to four scratchpad word accesses are attached to the
/// slot; they arbitrate for banks in the cycle the slot issues.
struct Slot {
  SlotKind kind = SlotKind::IntOp;
  Format format = Format::FP64;
  std::uint8_t n_access = 0;
  /// Comparison slot whose matched operand pair feeds an FMA in the same
  /// cycle (stream-fed merge with concurrent accumulation).
  bool fused_fma = false;
  std::array<Address, 4> access{};

  static Slot of(SlotKind k, Format f = Format::FP64) { return Slot{k, f, 0, false, {}}; }
  Slot& with(Address a);
};

bool is_fpu(SlotKind k);
/// Slots allowed inside a hardware-loop region.
bool loop_legal(SlotKind k);
/// Floating-point operations performed by a slot.
std::uint64_t slot_flops(const Slot& s);

struct IssueTrace {
  std::vector<Slot> slots;

  /// Checks loop markers are balanced, unnested and enclose only FPU-class or
  /// stream-driven slots. Throws ConfigError.
  void validate() const;
};

struct WorkerStats {
  std::uint64_t cycles = 0;
  std::uint64_t issued = 0;           ///< non-marker slots
  std::uint64_t conflict_stalls = 0;  ///< bank-conflict cycles
  std::uint64_t flops = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t fpu_full_width = 0;  ///< cycles issuing a full-width FPU op
  std::array<std::uint64_t, kSlotKinds> by_kind{};

  std::uint64_t count(SlotKind k) const { return by_kind[static_cast<int>(k)]; }
};

struct ClusterStats {
  std::uint64_t cycles = 0;  ///< max over workers
  std::uint64_t flops = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t conflict_stalls = 0;
  std::vector<WorkerStats> workers;
};

/// One worker running alone: every slot costs one cycle, hardware-loop bodies
/// carry no loop overhead, and only intra-slot bank conflicts stall.
WorkerStats simulate_worker(const IssueTrace& trace, const ClusterConfig& cfg);

/// All workers advance in lockstep and compete for SPM banks each cycle.
ClusterStats simulate_cluster(std::span<const IssueTrace> traces, const ClusterConfig& cfg);

/// Per-worker FPU utilization for one trace (flops / (2 * lanes * cycles)).
double worker_fpu_util(const WorkerStats& s, Format f);

// ---------------------------------------------------------------------------
// Scratchpad contention

struct SpmAccess {
  int worker;
  Address addr;
};

struct ContentionResult {
  std::uint64_t stalls = 0;
  std::vector<std::uint32_t> per_worker;
};

inline int bank_of(Address addr, const ClusterConfig& cfg) { return static_cast<int>((addr / 8) % cfg.spm_banks); }

/// Accesses issued in one cycle: each bank serves one, every excess access
/// costs its requester one stall cycle. `priority` rotates which worker wins a
/// contested bank (lowest (worker - priority) mod n_workers).
ContentionResult spm_contention(std::span<const SpmAccess> accesses, const ClusterConfig& cfg, int priority = 0);

// ---------------------------------------------------------------------------
// DMA

enum class DmaKind { D1, D2 };
enum class MemSpace { Spm, Hbm };

struct DmaRequest {
  DmaKind kind = DmaKind::D1;
  std::uint32_t rows = 1;
  std::uint64_t row_bytes = 0;
  MemSpace src = MemSpace::Hbm;
  MemSpace dst = MemSpace::Spm;

  std::uint64_t total_bytes() const { return static_cast<std::uint64_t>(rows) * row_bytes; }
  void validate() const;

  static DmaRequest d1(std::uint64_t bytes, MemSpace src = MemSpace::Hbm, MemSpace dst = MemSpace::Spm) {
    return {DmaKind::D1, 1, bytes, src, dst};
  }
  static DmaRequest d2(std::uint32_t rows, std::uint64_t row_bytes, MemSpace src = MemSpace::Hbm,
                       MemSpace dst = MemSpace::Spm) {
    return {DmaKind::D2, rows, row_bytes, src, dst};
  }
};

/// Sustained bytes per cycle for one cluster with `active` clusters of its
/// group transferring concurrently.
double dma_bytes_per_cycle(const ClusterConfig& cfg, int active);
std::uint64_t dma_cycles(const DmaRequest& req, const ClusterConfig& cfg, int active);
inline std::uint64_t dma_cycles(const DmaRequest& req, const ClusterConfig& cfg) {
  return dma_cycles(req, cfg, cfg.active_clusters_per_group);
}

// ---------------------------------------------------------------------------
// Double buffering

struct TilePhase {
  std::uint64_t compute = 0;
  std::uint64_t dma_in = 0;
  std::uint64_t dma_out = 0;
};

struct OverlapResult {
  std::uint64_t overlapped = 0;
  std::uint64_t serial = 0;
};

/// Software-pipelined double buffering: tile t computes while tile t+1 loads
/// and tile t-1 drains.
OverlapResult overlap_schedule(std::span<const TilePhase> tiles);

// ---------------------------------------------------------------------------
// Reports

struct TileCost {
  std::uint64_t compute_cycles = 0;
  std::vector<DmaRequest> dma_in;
  std::vector<DmaRequest> dma_out;
};

struct KernelReport {
  Format format = Format::FP64;
  std::uint64_t cycles = 0;  ///< end-to-end, double-buffered
  std::uint64_t compute_cycles = 0;
  std::uint64_t flops = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t conflict_stalls = 0;
  double fpu_util = 0;
  double comp_util = 0;
  double chip_gflops = 0;
  double chip_gcomps = 0;
  std::uint64_t dma_bytes = 0;
  std::uint64_t dma_cycles = 0;
  std::uint64_t overlap_total_cycles = 0;
  std::uint64_t serial_total_cycles = 0;
  int active_clusters = 0;
  std::vector<TileCost> tiles;
};

/// Assembles a per-cluster report from tile costs, scheduling DMA with
/// `active` clusters sharing the group bandwidth.
KernelReport build_report(Format f, std::vector<TileCost> tiles, std::uint64_t flops, std::uint64_t comparisons,
                          const ClusterConfig& cfg, int active, std::uint64_t conflict_stalls = 0);

/// Every cluster of the chip runs an equal share: DMA is rescheduled with all
/// clusters of a group active, and throughput scales by the cluster count.
KernelReport scale_to_chip(const KernelReport& cluster, const ClusterConfig& cfg);

}  // namespace clustersim::machine
