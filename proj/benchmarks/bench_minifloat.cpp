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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "clustersim/minifloat.hpp"

using namespace clustersim::minifloat;

namespace {

std::vector<Bits> operands(Format f, std::size_t n) {
  std::mt19937_64 rng(7);
  std::vector<Bits> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.emplace_back(f, rng() & info(f).mask());
  return v;
}

void BM_fma(benchmark::State& state) {
  const auto f = static_cast<Format>(state.range(0));
  const std::vector<Bits> v = operands(f, 4096);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fma(v[i & 4095], v[(i + 1) & 4095], v[(i + 2) & 4095]));
    ++i;
  }
  state.SetLabel(to_string(f).data());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_fma)->DenseRange(0, 5);

void BM_add3(benchmark::State& state) {
  const auto f = static_cast<Format>(state.range(0));
  const std::vector<Bits> v = operands(f, 4096);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(add3(v[i & 4095], v[(i + 1) & 4095], v[(i + 2) & 4095]));
    ++i;
  }
  state.SetLabel(to_string(f).data());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_add3)->DenseRange(0, 5);

}  // namespace
