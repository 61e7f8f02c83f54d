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

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "clustersim/machine.hpp"

namespace clustersim::kernels {

using streams::Address;
using machine::IssueTrace;
using machine::Slot;
using machine::SlotKind;

/// Appends slots to one worker's trace. FPU results become usable
/// `fpu_latency` cycles after issue; consumers that arrive earlier get STALL
/// slots in front of them.
class TraceBuilder {
 public:
  static constexpr int kRegisters = 64;

  explicit TraceBuilder(int fpu_latency) : latency_(fpu_latency) {}

  std::uint64_t cycle() const { return cycle_; }

  void int_op(int n = 1) { repeat(SlotKind::IntOp, n); }
  void su_config(int n = 1) { repeat(SlotKind::SuConfig, n); }
  void stall(int n = 1) { repeat(SlotKind::Stall, n); }
  void load(Address a) { push(Slot::of(SlotKind::Load).with(a)); }
  void loop_begin() { slots_.push_back(Slot::of(SlotKind::LoopBegin)); }
  void loop_end() { slots_.push_back(Slot::of(SlotKind::LoopEnd)); }

  /// FPU-class slot (or fused comparison) writing `dst` and reading `srcs`.
  void fpu(const Slot& s, int dst, std::initializer_list<int> srcs = {});
  /// Slot that consumes register `src` without producing an FPU result.
  void consume(const Slot& s, int src);
  /// Slot with no register dependencies.
  void push(const Slot& s);

  IssueTrace take();

 private:
  void repeat(SlotKind k, int n);
  void wait(int reg);

  int latency_;
  std::uint64_t cycle_ = 0;
  std::vector<Slot> slots_;
  std::array<std::uint64_t, kRegisters> ready_{};
};

/// Models a stream unit fetching 64-bit words: only a change of word costs an
/// SPM access.
class WordFetch {
 public:
  bool touch(Address a) {
    const Address w = a & ~Address{7};
    if (valid_ && w == last_) return false;
    valid_ = true;
    last_ = w;
    return true;
  }
  void reset() { valid_ = false; }

 private:
  bool valid_ = false;
  Address last_ = 0;
};

}  // namespace clustersim::kernels
