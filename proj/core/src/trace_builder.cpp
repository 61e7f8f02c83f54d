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

#include "clustersim/trace_builder.hpp"

#include "clustersim/errors.hpp"

namespace clustersim::kernels {

void TraceBuilder::repeat(SlotKind k, int n) {
  for (int i = 0; i < n; ++i) push(Slot::of(k));
}

void TraceBuilder::push(const Slot& s) {
  slots_.push_back(s);
  ++cycle_;
}

void TraceBuilder::wait(int reg) {
  if (reg < 0 || reg >= kRegisters) throw ConfigError("trace builder: register out of range");
  while (cycle_ < ready_[reg]) push(Slot::of(SlotKind::Stall));
}

void TraceBuilder::fpu(const Slot& s, int dst, std::initializer_list<int> srcs) {
  for (int r : srcs) wait(r);
  if (dst < 0 || dst >= kRegisters) throw ConfigError("trace builder: register out of range");
  ready_[dst] = cycle_ + latency_;
  push(s);
}

void TraceBuilder::consume(const Slot& s, int src) {
  wait(src);
  push(s);
}

IssueTrace TraceBuilder::take() {
  IssueTrace t{std::move(slots_)};
  slots_.clear();
  cycle_ = 0;
  ready_.fill(0);
  return t;
}

}  // namespace clustersim::kernels
