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

#include <cstdint>
#include <vector>

#include "clustersim/errors.hpp"
#include "clustersim/kernels.hpp"
#include "clustersim/streams.hpp"
#include "clustersim/trace_builder.hpp"

namespace clustersim::kernels::detail {

using machine::DmaRequest;
using streams::Spm;

inline std::uint64_t align8(std::uint64_t n) { return (n + 7) & ~std::uint64_t{7}; }

/// Bump allocator over the scratchpad address space.
class SpmLayout {
 public:
  explicit SpmLayout(std::uint64_t capacity) : capacity_(capacity) {}
  Address alloc(std::uint64_t bytes) {
    const std::uint64_t at = next_;
    next_ = align8(next_ + bytes);
    if (next_ > capacity_) throw PlanningError("scratchpad layout exceeds " + std::to_string(capacity_) + " bytes");
    return static_cast<Address>(at);
  }
  std::uint64_t used() const { return next_; }

 private:
  std::uint64_t capacity_;
  std::uint64_t next_ = 0;
};

inline int elem_bytes(Format f) { return minifloat::width(f) / 8; }

/// acc = a * b when `first`, else fma(a, b, acc), all on raw encodings.
inline std::uint64_t madd(Format f, std::uint64_t a, std::uint64_t b, std::uint64_t acc, bool first) {
  const minifloat::Bits x(f, a), y(f, b);
  return first ? minifloat::mul(x, y).raw() : minifloat::fma(x, y, minifloat::Bits(f, acc)).raw();
}

inline void add_dma(std::vector<DmaRequest>& v, std::uint64_t bytes) {
  if (bytes > 0) v.push_back(DmaRequest::d1(bytes));
}
inline void add_dma_out(std::vector<DmaRequest>& v, std::uint64_t bytes) {
  if (bytes > 0) v.push_back(DmaRequest::d1(bytes, machine::MemSpace::Spm, machine::MemSpace::Hbm));
}

/// Collects per-tile simulation results into a report.
class TileRun {
 public:
  explicit TileRun(const KernelOptions& opt) : opt_(opt) {}

  void add(std::vector<IssueTrace> traces, std::vector<DmaRequest> in, std::vector<DmaRequest> out) {
    const machine::ClusterStats s = machine::simulate_cluster(traces, opt_.cluster);
    flops_ += s.flops;
    comparisons_ += s.comparisons;
    conflicts_ += s.conflict_stalls;
    tiles_.push_back({s.cycles, std::move(in), std::move(out)});
    if (opt_.keep_traces && kept_.empty()) kept_ = std::move(traces);
  }

  KernelReport finish(Format f) {
    return machine::build_report(f, std::move(tiles_), flops_, comparisons_, opt_.cluster,
                                 opt_.cluster.active_clusters_per_group, conflicts_);
  }
  std::vector<IssueTrace> take_traces() { return std::move(kept_); }

 private:
  const KernelOptions& opt_;
  std::vector<machine::TileCost> tiles_;
  std::vector<IssueTrace> kept_;
  std::uint64_t flops_ = 0;
  std::uint64_t comparisons_ = 0;
  std::uint64_t conflicts_ = 0;
};

inline std::vector<TraceBuilder> make_builders(const KernelOptions& opt) {
  return std::vector<TraceBuilder>(opt.cluster.n_workers, TraceBuilder(opt.cluster.fpu_latency));
}

inline std::vector<IssueTrace> take_all(std::vector<TraceBuilder>& b) {
  std::vector<IssueTrace> out;
  out.reserve(b.size());
  for (TraceBuilder& t : b) out.push_back(t.take());
  return out;
}

inline void check_options(const KernelOptions& opt) {
  opt.cluster.validate();
  opt.costs.validate();
}

}  // namespace clustersim::kernels::detail
