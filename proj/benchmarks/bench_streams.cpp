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

#include <algorithm>
#include <random>
#include <vector>

#include "clustersim/streams.hpp"

using namespace clustersim::streams;

namespace {

std::vector<std::uint32_t> sorted_indices(std::size_t n, std::uint32_t range, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = static_cast<std::uint32_t>(rng() % range);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void BM_merge(benchmark::State& state) {
  const auto mode = state.range(1) ? MergeMode::Union : MergeMode::Intersect;
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<std::uint32_t> a = sorted_indices(n, static_cast<std::uint32_t>(4 * n), 1);
  const std::vector<std::uint32_t> b = sorted_indices(n, static_cast<std::uint32_t>(4 * n), 2);
  for (auto _ : state) benchmark::DoNotOptimize(merge_indices(mode, a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size() + b.size()));
}
BENCHMARK(BM_merge)->ArgsProduct({{64, 1024, 16384}, {0, 1}});

}  // namespace
